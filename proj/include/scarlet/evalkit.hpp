#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "scarlet/attribution.hpp"
#include "scarlet/core.hpp"
#include "scarlet/oracles.hpp"
#include "scarlet/trainer.hpp"

namespace scarlet {

inline constexpr std::size_t kGtiPassages = 10;

/// A query with labeled candidate passages. GTI-format instances have
/// exactly ten candidates.
struct RankingInstance {
  QueryText query;
  std::string ground_truth;
  std::vector<Passage> passages;
  std::vector<double> gains;
};

using GtiInstance = RankingInstance;

void validate_gti(const GtiInstance& instance);

/// {query, ground_truth, passages: [{id, text}], gains}
nlohmann::json to_json(const RankingInstance& instance);
RankingInstance ranking_instance_from_json(const nlohmann::json& j);

/// Gains listed in ranked order. IDCG uses the same gains sorted
/// descending; the result is 0 when IDCG is 0.
template <typename Scalar = double>
Scalar ndcg_at_k(std::span<const Scalar> ranked_gains, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  for (Scalar g : ranked_gains)
    if (!(g >= Scalar(0))) throw Error(ErrorCode::InvalidGain, "gains must be non-negative");
  auto dcg = [k](std::span<const Scalar> gains) {
    Scalar s{};
    const std::size_t n = std::min(k, gains.size());
    for (std::size_t i = 0; i < n; ++i) s += gains[i] / std::log2(Scalar(i + 2));
    return s;
  };
  std::vector<Scalar> ideal(ranked_gains.begin(), ranked_gains.end());
  std::sort(ideal.begin(), ideal.end(), std::greater<Scalar>());
  const Scalar idcg = dcg(ideal);
  if (idcg == Scalar(0)) return Scalar(0);
  return dcg(ranked_gains) / idcg;
}

/// Any normalized answer occurs as a substring of the normalized prediction.
bool exact_match_accuracy(std::string_view prediction, std::span<const std::string> answers);

/// Bag-of-tokens F1 over normalized tokens.
double token_f1(std::string_view prediction, std::string_view reference);

/// LCS-based F1 over normalized tokens.
double rouge_l(std::string_view prediction, std::string_view reference);

/// Indices sorted by descending score, ties by ascending index.
std::vector<std::size_t> rank_by_scores(std::span<const double> scores);

/// Produces one utility score per candidate passage.
using Attributor = std::function<std::vector<double>(const RankingInstance&)>;

Attributor perturbation_attributor(const ScorerOracle& oracle, AttributionConfig config,
                                   std::size_t max_inflight = 8);

/// Fits on all 2^k masks.
Attributor exhaustive_attributor(const ScorerOracle& oracle, double lambda = 0.0,
                                 std::size_t max_inflight = 8);

/// Ranked passages score k, k-1, ...; unranked ones fall below in index order.
Attributor llm_rank_attributor(const GeneratorOracle& oracle);

struct BenchmarkResult {
  std::map<std::size_t, double> mean_ndcg;  // by k
  std::size_t instances = 0;
  std::size_t failures = 0;
};

/// Ranks each instance's passages by the attributor and averages nDCG@k.
/// A failing instance scores 0 and is tallied.
BenchmarkResult run_gti_benchmark(std::span<const GtiInstance> instances,
                                  const Attributor& attributor, std::span<const std::size_t> ks);

struct RetrievalEvalResult {
  double mean_ndcg = 0.0;
  std::size_t evaluated = 0;
  std::size_t skipped = 0;
};

/// Ranks each query's candidates by encoder score and averages nDCG@k;
/// instances without candidates are skipped.
RetrievalEvalResult run_retrieval_eval(const ToyEncoder& encoder,
                                       std::span<const RankingInstance> eval_set, std::size_t k);

}  // namespace scarlet
