#include "scarlet/evalkit.hpp"

#include <numeric>
#include <unordered_map>

#include "scarlet/io.hpp"

namespace scarlet {

void validate_gti(const GtiInstance& instance) {
  if (instance.passages.size() != kGtiPassages || instance.gains.size() != kGtiPassages)
    throw Error(ErrorCode::SchemaError, "GTI instances need exactly 10 passages and gains");
}

nlohmann::json to_json(const RankingInstance& instance) {
  Json passages = Json::array();
  for (const auto& p : instance.passages) passages.push_back({{"id", p.id}, {"text", p.text}});
  return {{"query", instance.query.rendered},
          {"ground_truth", instance.ground_truth},
          {"passages", passages},
          {"gains", instance.gains}};
}

RankingInstance ranking_instance_from_json(const nlohmann::json& j) {
  RankingInstance r;
  r.query.rendered = j.at("query").get<std::string>();
  r.query.input = r.query.rendered;
  r.ground_truth = j.value("ground_truth", std::string());
  for (const auto& p : j.at("passages"))
    r.passages.push_back(make_passage(p.at("id").get<std::string>(), p.at("text").get<std::string>()));
  r.gains = j.at("gains").get<std::vector<double>>();
  if (r.gains.size() != r.passages.size())
    throw Error(ErrorCode::SchemaError, "gains and passages differ in length");
  for (double g : r.gains)
    if (!(g >= 0)) throw Error(ErrorCode::InvalidGain, "gains must be non-negative");
  return r;
}

bool exact_match_accuracy(std::string_view prediction, std::span<const std::string> answers) {
  if (answers.empty()) throw Error(ErrorCode::InvalidInput, "no reference answers");
  const auto pred = join(normalized_tokens(prediction), " ");
  for (const auto& a : answers) {
    const auto ans = join(normalized_tokens(a), " ");
    if (!ans.empty() && pred.find(ans) != std::string::npos) return true;
  }
  return false;
}

double token_f1(std::string_view prediction, std::string_view reference) {
  const auto p = normalized_tokens(prediction);
  const auto r = normalized_tokens(reference);
  if (p.empty() && r.empty()) return 1.0;
  if (p.empty() || r.empty()) return 0.0;
  std::unordered_map<std::string, std::size_t> counts;
  for (const auto& t : r) ++counts[t];
  std::size_t common = 0;
  for (const auto& t : p) {
    auto it = counts.find(t);
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  if (common == 0) return 0.0;
  const double precision = static_cast<double>(common) / static_cast<double>(p.size());
  const double recall = static_cast<double>(common) / static_cast<double>(r.size());
  return 2 * precision * recall / (precision + recall);
}

double rouge_l(std::string_view prediction, std::string_view reference) {
  const auto p = normalized_tokens(prediction);
  const auto r = normalized_tokens(reference);
  if (p.empty() || r.empty()) return 0.0;
  std::vector<std::size_t> prev(r.size() + 1, 0), cur(r.size() + 1, 0);
  for (std::size_t i = 1; i <= p.size(); ++i) {
    for (std::size_t j = 1; j <= r.size(); ++j)
      cur[j] = p[i - 1] == r[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    std::swap(prev, cur);
  }
  const double lcs = static_cast<double>(prev[r.size()]);
  const double precision = lcs / static_cast<double>(p.size());
  const double recall = lcs / static_cast<double>(r.size());
  if (precision + recall == 0) return 0.0;
  return 2 * precision * recall / (precision + recall);
}

std::vector<std::size_t> rank_by_scores(std::span<const double> scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  return order;
}

namespace {

SharedContext as_context(const RankingInstance& instance) {
  return SharedContext{"gti", instance.passages, "gti"};
}

}  // namespace

Attributor perturbation_attributor(const ScorerOracle& oracle, AttributionConfig config,
                                   std::size_t max_inflight) {
  return [&oracle, config, max_inflight](const RankingInstance& inst) {
    auto target = make_target(inst.query, inst.ground_truth);
    return attribute(as_context(inst), target, config, oracle, max_inflight).scores;
  };
}

Attributor exhaustive_attributor(const ScorerOracle& oracle, double lambda,
                                 std::size_t max_inflight) {
  return [&oracle, lambda, max_inflight](const RankingInstance& inst) {
    auto target = make_target(inst.query, inst.ground_truth);
    return attribute_exhaustive(as_context(inst), target, lambda, false, oracle, max_inflight)
        .scores;
  };
}

Attributor llm_rank_attributor(const GeneratorOracle& oracle) {
  return [&oracle](const RankingInstance& inst) {
    auto ranks = llm_rank_attribution(as_context(inst), inst.query, oracle);
    const double k = static_cast<double>(inst.passages.size());
    std::vector<double> scores(inst.passages.size());
    // Unranked passages keep index order below every ranked one.
    for (std::size_t i = 0; i < scores.size(); ++i) scores[i] = -static_cast<double>(i) - 1.0;
    for (std::size_t r = 0; r < ranks.size(); ++r) scores[ranks[r] - 1] = k - static_cast<double>(r);
    return scores;
  };
}

BenchmarkResult run_gti_benchmark(std::span<const GtiInstance> instances,
                                  const Attributor& attributor, std::span<const std::size_t> ks) {
  BenchmarkResult result;
  result.instances = instances.size();
  for (auto k : ks) result.mean_ndcg[k] = 0.0;
  for (const auto& inst : instances) {
    std::vector<double> scores;
    try {
      scores = attributor(inst);
      if (scores.size() != inst.passages.size())
        throw Error(ErrorCode::DimensionMismatch, "attributor returned the wrong score count");
    } catch (const std::exception&) {
      ++result.failures;
      continue;
    }
    std::vector<double> ranked;
    for (auto i : rank_by_scores(scores)) ranked.push_back(inst.gains[i]);
    for (auto k : ks) result.mean_ndcg[k] += ndcg_at_k<double>(ranked, k);
  }
  if (!instances.empty())
    for (auto& [k, v] : result.mean_ndcg) v /= static_cast<double>(instances.size());
  return result;
}

RetrievalEvalResult run_retrieval_eval(const ToyEncoder& encoder,
                                       std::span<const RankingInstance> eval_set, std::size_t k) {
  if (k == 0) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  RetrievalEvalResult result;
  double total = 0;
  for (const auto& inst : eval_set) {
    if (inst.passages.empty()) {
      ++result.skipped;
      continue;
    }
    const auto q = encoder.encode(inst.query.rendered);
    std::vector<double> scores;
    scores.reserve(inst.passages.size());
    for (const auto& p : inst.passages) scores.push_back(q.dot(encoder.encode(p.text)));
    std::vector<double> ranked;
    for (auto i : rank_by_scores(scores)) ranked.push_back(inst.gains[i]);
    total += ndcg_at_k<double>(ranked, k);
    ++result.evaluated;
  }
  if (result.evaluated) result.mean_ndcg = total / static_cast<double>(result.evaluated);
  return result;
}

}  // namespace scarlet
