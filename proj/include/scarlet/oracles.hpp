#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "scarlet/core.hpp"

namespace scarlet {

/// Default synthesizer temperature.
inline constexpr double kDefaultTemperature = 0.5;
inline constexpr int kDefaultMaxTokens = 512;

/// Teacher-forced scorer for a fixed ground truth. Returns one additive,
/// higher-is-better score per token of the oracle's own tokenization of the
/// target. Implementations must be safe to call concurrently.
class ScorerOracle {
 public:
  virtual ~ScorerOracle() = default;
  virtual std::vector<double> score_ground_truth(std::span<const Passage> context,
                                                 const QueryText& query,
                                                 const GenerationTarget& target) const = 0;
};

/// Text generator (synthesizer / judge). Implementations must be safe to call
/// concurrently.
class GeneratorOracle {
 public:
  virtual ~GeneratorOracle() = default;
  virtual std::string generate(const std::string& prompt, double temperature,
                               int max_tokens) const = 0;
};

// ---------------------------------------------------------------------------
// Linear reference mock

struct Interaction {
  std::size_t i = 0;  // 1-based
  std::size_t j = 0;  // 1-based
  double weight = 0.0;
};

struct LinearMockSpec {
  double intercept = 0.0;
  std::vector<double> main_effects;
  std::vector<Interaction> interactions;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  std::size_t k() const { return main_effects.size(); }
};

void validate(const LinearMockSpec& spec);

/// intercept + sum main_i v_i + sum w v_i v_j + N(0, sigma^2). The noise draw
/// is a pure function of (seed, v), so repeated calls agree exactly.
double mock_linear_score(const LinearMockSpec& spec, std::span<const int> v);

/// Exposes a LinearMockSpec through the scorer contract. `universe` fixes the
/// passage id for each coordinate; a call's context is mapped back to a
/// perturbation vector by id membership. Returns a single-token score.
class LinearMockScorer final : public ScorerOracle {
 public:
  LinearMockScorer(LinearMockSpec spec, std::vector<std::string> universe);

  std::vector<double> score_ground_truth(std::span<const Passage> context,
                                         const QueryText& query,
                                         const GenerationTarget& target) const override;

  const LinearMockSpec& spec() const { return spec_; }

 private:
  LinearMockSpec spec_;
  std::vector<std::string> universe_;
  std::unordered_map<std::string, std::size_t> position_;
};

/// Scores each normalized ground-truth token by whether any included passage
/// contains it. Per-passage effects combine with interactions through shared
/// tokens, which makes it a useful stand-in for a real generator on fixtures.
class OverlapScorer final : public ScorerOracle {
 public:
  struct Options {
    double covered = -0.1;
    double uncovered = -5.0;
  };

  OverlapScorer() = default;
  explicit OverlapScorer(Options options) : options_(options) {}

  std::vector<double> score_ground_truth(std::span<const Passage> context,
                                         const QueryText& query,
                                         const GenerationTarget& target) const override;

 private:
  Options options_;
};

/// Serializes calls into an oracle that is not safe for concurrent use.
class SerializingScorer final : public ScorerOracle {
 public:
  explicit SerializingScorer(std::shared_ptr<ScorerOracle> inner) : inner_(std::move(inner)) {}
  std::vector<double> score_ground_truth(std::span<const Passage> context,
                                         const QueryText& query,
                                         const GenerationTarget& target) const override {
    std::lock_guard lock(mu_);
    return inner_->score_ground_truth(context, query, target);
  }

 private:
  std::shared_ptr<ScorerOracle> inner_;
  mutable std::mutex mu_;
};

class SerializingGenerator final : public GeneratorOracle {
 public:
  explicit SerializingGenerator(std::shared_ptr<GeneratorOracle> inner)
      : inner_(std::move(inner)) {}
  std::string generate(const std::string& prompt, double temperature,
                       int max_tokens) const override {
    std::lock_guard lock(mu_);
    return inner_->generate(prompt, temperature, max_tokens);
  }

 private:
  std::shared_ptr<GeneratorOracle> inner_;
  mutable std::mutex mu_;
};

/// Wraps a callable; handy for canned replies in tests.
class FunctionGenerator final : public GeneratorOracle {
 public:
  using Fn = std::function<std::string(const std::string& prompt)>;
  explicit FunctionGenerator(Fn fn) : fn_(std::move(fn)) {}
  std::string generate(const std::string& prompt, double, int) const override {
    return fn_(prompt);
  }

 private:
  Fn fn_;
};

/// Deterministic offline synthesizer. Recognizes the synthesis, filtering,
/// noise and rank prompt templates and answers each from the passages in
/// the prompt itself:
///   synthesis: cloze question over one sentence of a context passage
///   filtering: [YES] iff the output string occurs in the source passages
///   noise:     first passage containing the ground truth, answer masked
///   rank:      passages ordered by query-token overlap
/// Anything else yields an empty string.
class MockGenerator final : public GeneratorOracle {
 public:
  explicit MockGenerator(std::uint64_t seed = 0) : seed_(seed) {}
  std::string generate(const std::string& prompt, double temperature,
                       int max_tokens) const override;

 private:
  std::uint64_t seed_;
};

// ---------------------------------------------------------------------------
// HTTP wire adapters

struct HttpOptions {
  std::string bearer_token;
  int attempts = 3;
  std::chrono::milliseconds initial_backoff{250};
  std::chrono::seconds timeout{60};

  /// Picks up SCARLET_ORACLE_TOKEN when set.
  static HttpOptions from_env();
};

/// POST {"context": [..], "query": "..", "target": ".."} and read
/// {"token_scores": [..]}.
std::vector<double> http_score(const std::string& endpoint, std::span<const std::string> context,
                               const std::string& query, const std::string& target,
                               const HttpOptions& options = HttpOptions::from_env());

/// POST {"prompt": .., "temperature": .., "max_tokens": ..} and read {"text": ..}.
std::string http_generate(const std::string& endpoint, const std::string& prompt,
                          double temperature = kDefaultTemperature,
                          int max_tokens = kDefaultMaxTokens,
                          const HttpOptions& options = HttpOptions::from_env());

class HttpScorer final : public ScorerOracle {
 public:
  explicit HttpScorer(std::string endpoint, HttpOptions options = HttpOptions::from_env())
      : endpoint_(std::move(endpoint)), options_(std::move(options)) {}
  std::vector<double> score_ground_truth(std::span<const Passage> context,
                                         const QueryText& query,
                                         const GenerationTarget& target) const override;

 private:
  std::string endpoint_;
  HttpOptions options_;
};

class HttpGenerator final : public GeneratorOracle {
 public:
  explicit HttpGenerator(std::string endpoint, HttpOptions options = HttpOptions::from_env())
      : endpoint_(std::move(endpoint)), options_(std::move(options)) {}
  std::string generate(const std::string& prompt, double temperature,
                       int max_tokens) const override {
    return http_generate(endpoint_, prompt, temperature, max_tokens, options_);
  }

 private:
  std::string endpoint_;
  HttpOptions options_;
};

/// Split "http://host:port/path" into ("http://host:port", "/path").
std::pair<std::string, std::string> split_url(const std::string& url);

/// POST a JSON body with the retry policy above. Returns the response body.
/// Connection failures, 429 and 5xx are retried; other non-2xx statuses and
/// exhaustion raise OracleUnavailable.
std::string post_json_with_retry(const std::string& endpoint, const std::string& body,
                                 const HttpOptions& options);

}  // namespace scarlet
