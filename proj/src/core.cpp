#include "scarlet/core.hpp"

#include <algorithm>
#include <cctype>
#include <unordered_set>

namespace scarlet {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "InvalidInput";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::OracleUnavailable: return "OracleUnavailable";
    case ErrorCode::ProtocolError: return "ProtocolError";
    case ErrorCode::DegenerateDesign: return "DegenerateDesign";
    case ErrorCode::SingularDesign: return "SingularDesign";
    case ErrorCode::RankParseError: return "RankParseError";
    case ErrorCode::SynthesisParseError: return "SynthesisParseError";
    case ErrorCode::InsufficientSeparation: return "InsufficientSeparation";
    case ErrorCode::EmptyContext: return "EmptyContext";
    case ErrorCode::InvalidGain: return "InvalidGain";
    case ErrorCode::NonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::MissingInput: return "MissingInput";
    case ErrorCode::SchemaError: return "SchemaError";
  }
  return "Unknown";
}

namespace {

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }
bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<std::string_view> split_words(std::string_view text) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > start) words.push_back(text.substr(start, i - start));
  }
  return words;
}

std::string normalize_token(std::string_view word) {
  std::size_t b = 0, e = word.size();
  while (b < e && is_punct(word[b])) ++b;
  while (e > b && is_punct(word[e - 1])) --e;
  std::string out(word.substr(b, e - b));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> normalized_tokens(std::string_view text) {
  std::vector<std::string> out;
  for (auto w : split_words(text)) {
    auto t = normalize_token(w);
    if (!t.empty()) out.push_back(std::move(t));
  }
  return out;
}

std::string normalize_text(std::string_view text) {
  std::string out;
  for (auto w : split_words(text)) {
    if (!out.empty()) out.push_back(' ');
    out.append(w);
  }
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out.append(sep);
    out.append(parts[i]);
  }
  return out;
}

Passage make_passage(std::string id, std::string text, PassageSource source) {
  if (id.empty()) throw Error(ErrorCode::InvalidInput, "passage id is empty");
  auto words = split_words(text);
  if (words.empty())
    throw Error(ErrorCode::InvalidInput, "passage '" + id + "' has empty text");
  Passage p;
  p.id = std::move(id);
  p.word_count = words.size();
  p.text = std::move(text);
  p.source = source;
  return p;
}

void validate(const TaskSpec& task) {
  if (task.task_id.empty() || task.task_instruction.empty() ||
      task.retrieval_instruction.empty() || task.example_input.empty() ||
      task.example_output.empty())
    throw Error(ErrorCode::InvalidInput, "task '" + task.task_id + "' has an empty field");
}

void validate(const SharedContext& context) {
  if (context.passages.empty())
    throw Error(ErrorCode::EmptyContext, "context '" + context.context_id + "' is empty");
  std::unordered_set<std::string> seen;
  for (const auto& p : context.passages)
    if (!seen.insert(p.id).second)
      throw Error(ErrorCode::InvalidInput,
                  "duplicate passage id '" + p.id + "' in context '" + context.context_id + "'");
}

GenerationTarget make_target(QueryText query, std::string ground_truth) {
  GenerationTarget t;
  for (auto w : split_words(ground_truth)) t.tokenized_truth.emplace_back(w);
  if (t.tokenized_truth.empty())
    throw Error(ErrorCode::InvalidInput, "ground truth has no tokens");
  t.query = std::move(query);
  t.ground_truth = std::move(ground_truth);
  return t;
}

void validate(const TrainingPairSet& pairs) {
  if (pairs.positives.empty() || pairs.negatives.empty())
    throw Error(ErrorCode::InvalidInput, "training pair set has an empty side");
  std::unordered_set<std::string> pos;
  for (const auto& p : pairs.positives) pos.insert(p.id);
  for (const auto& n : pairs.negatives)
    if (pos.count(n.id))
      throw Error(ErrorCode::InvalidInput, "passage '" + n.id + "' is both positive and negative");
}

std::vector<Passage> segment_document(std::string_view text, std::size_t max_words,
                                      std::string_view id_prefix) {
  if (max_words == 0) throw Error(ErrorCode::InvalidInput, "max_words must be >= 1");
  auto words = split_words(text);
  std::vector<Passage> out;
  for (std::size_t start = 0; start < words.size(); start += max_words) {
    std::size_t end = std::min(words.size(), start + max_words);
    std::string seg;
    for (std::size_t i = start; i < end; ++i) {
      if (i > start) seg.push_back(' ');
      seg.append(words[i]);
    }
    std::string id = id_prefix.empty() ? std::to_string(out.size())
                                       : std::string(id_prefix) + "-" + std::to_string(out.size());
    out.push_back(make_passage(std::move(id), std::move(seg)));
  }
  return out;
}

QueryText make_query(const TaskSpec& task, std::string_view input, QueryMode mode) {
  if (input.empty()) throw Error(ErrorCode::InvalidInput, "query input is empty");
  QueryText q;
  q.input = std::string(input);
  if (mode == QueryMode::instructed) {
    q.instruction = task.retrieval_instruction;
    q.rendered = task.retrieval_instruction + " " + q.input;
  } else {
    q.rendered = q.input;
  }
  return q;
}

QueryText make_generator_query(const TaskSpec& task, std::string_view input) {
  if (input.empty()) throw Error(ErrorCode::InvalidInput, "query input is empty");
  QueryText q;
  q.input = std::string(input);
  q.instruction = task.task_instruction;
  q.rendered = task.task_instruction + " " + q.input;
  return q;
}

std::string_view to_string(PassageSource source) {
  return source == PassageSource::corpus ? "corpus" : "synthetic_noise";
}

std::string_view to_string(FilterVerdict verdict) {
  switch (verdict) {
    case FilterVerdict::kept: return "kept";
    case FilterVerdict::rejected: return "rejected";
    case FilterVerdict::unfiltered: return "unfiltered";
  }
  return "unfiltered";
}

PassageSource passage_source_from_string(std::string_view s) {
  if (s == "corpus") return PassageSource::corpus;
  if (s == "synthetic_noise") return PassageSource::synthetic_noise;
  throw Error(ErrorCode::SchemaError, "unknown passage source '" + std::string(s) + "'");
}

FilterVerdict filter_verdict_from_string(std::string_view s) {
  if (s == "kept") return FilterVerdict::kept;
  if (s == "rejected") return FilterVerdict::rejected;
  if (s == "unfiltered") return FilterVerdict::unfiltered;
  throw Error(ErrorCode::SchemaError, "unknown filter verdict '" + std::string(s) + "'");
}

}  // namespace scarlet
