#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scarlet/error.hpp"

namespace scarlet {

enum class PassageSource { corpus, synthetic_noise };

struct Passage {
  std::string id;
  std::string text;
  PassageSource source = PassageSource::corpus;
  std::size_t word_count = 0;

  bool operator==(const Passage&) const = default;
};

/// Builds a passage and fills in the word count. Throws InvalidInput on
/// empty id or empty text.
Passage make_passage(std::string id, std::string text,
                     PassageSource source = PassageSource::corpus);

struct TaskSpec {
  std::string task_id;
  std::string task_instruction;
  std::string retrieval_instruction;
  std::string example_input;
  std::string example_output;

  bool operator==(const TaskSpec&) const = default;
};

void validate(const TaskSpec& task);

struct QueryText {
  std::optional<std::string> instruction;
  std::string input;
  std::string rendered;

  bool operator==(const QueryText&) const = default;
};

struct SharedContext {
  std::string context_id;
  std::vector<Passage> passages;
  std::string seed_ref;

  bool operator==(const SharedContext&) const = default;
};

void validate(const SharedContext& context);

enum class FilterVerdict { kept, rejected, unfiltered };

struct SyntheticExample {
  std::string task_id;
  std::string input;
  std::string ground_truth;
  std::string context_id;
  FilterVerdict filter_verdict = FilterVerdict::unfiltered;

  bool operator==(const SyntheticExample&) const = default;
};

/// Seed instance drawn from a task's training split.
struct SeedExample {
  std::string task_id;
  std::string input;
  std::string ground_truth;

  bool operator==(const SeedExample&) const = default;
};

struct GenerationTarget {
  QueryText query;
  std::string ground_truth;
  std::vector<std::string> tokenized_truth;

  bool operator==(const GenerationTarget&) const = default;
};

/// Whitespace-tokenizes `ground_truth`. Throws InvalidInput if that yields
/// no tokens.
GenerationTarget make_target(QueryText query, std::string ground_truth);

struct TrainingPairSet {
  QueryText query;
  std::vector<Passage> positives;
  std::vector<Passage> negatives;

  bool operator==(const TrainingPairSet&) const = default;
};

void validate(const TrainingPairSet& pairs);

// ---------------------------------------------------------------------------
// Text helpers

/// Maximal runs of non-whitespace characters.
std::vector<std::string_view> split_words(std::string_view text);

/// Lowercase and strip leading/trailing ASCII punctuation; may return "".
std::string normalize_token(std::string_view word);

/// split_words + normalize_token, dropping tokens that normalize to "".
std::vector<std::string> normalized_tokens(std::string_view text);

/// Lowercase and collapse whitespace runs to single spaces, trimmed.
std::string normalize_text(std::string_view text);

std::string join(const std::vector<std::string>& parts, std::string_view sep);

// ---------------------------------------------------------------------------
// Operations

/// Hard-cut segmentation into consecutive runs of at most `max_words` words.
/// Segment ids are "<id_prefix>-<index>" (or "<index>" with an empty prefix).
std::vector<Passage> segment_document(std::string_view text, std::size_t max_words,
                                      std::string_view id_prefix = {});

enum class QueryMode { instructed, bare };

/// Retriever-facing query: retrieval_instruction + " " + input when
/// instructed, input alone when bare.
QueryText make_query(const TaskSpec& task, std::string_view input, QueryMode mode);

/// Generator-facing query built from task_instruction.
QueryText make_generator_query(const TaskSpec& task, std::string_view input);

std::string_view to_string(PassageSource source);
std::string_view to_string(FilterVerdict verdict);
PassageSource passage_source_from_string(std::string_view s);
FilterVerdict filter_verdict_from_string(std::string_view s);

}  // namespace scarlet
