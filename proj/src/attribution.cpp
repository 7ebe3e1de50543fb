#include "scarlet/attribution.hpp"

#include <random>

#include "scarlet/parallel.hpp"
#include "scarlet/prompts.hpp"

namespace scarlet {

void validate(const AttributionConfig& config) {
  if (config.n < 2) throw Error(ErrorCode::InvalidConfig, "attribution n must be >= 2");
  if (!(config.p > 0.0 && config.p < 1.0))
    throw Error(ErrorCode::InvalidConfig, "attribution p must lie in (0, 1)");
  if (!(config.lambda >= 0.0)) throw Error(ErrorCode::InvalidConfig, "lambda must be >= 0");
}

namespace {

// 53-bit uniform in [0, 1); spelled out so draws match across standard libraries.
double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

bool has_constant_column(const std::vector<PerturbationVector>& vs, std::size_t k) {
  for (std::size_t c = 0; c < k; ++c) {
    bool all_same = true;
    for (const auto& v : vs)
      if (v.bits[c] != vs.front().bits[c]) {
        all_same = false;
        break;
      }
    if (all_same) return true;
  }
  return false;
}

}  // namespace

std::vector<PerturbationVector> sample_perturbations(std::size_t k,
                                                     const AttributionConfig& config) {
  validate(config);
  if (k == 0) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  constexpr int kMaxRetries = 16;
  std::mt19937_64 rng(config.seed);
  for (int attempt = 0; attempt <= kMaxRetries; ++attempt) {
    std::vector<PerturbationVector> out(config.n);
    for (auto& v : out) {
      v.bits.resize(k);
      for (auto& b : v.bits) b = uniform01(rng) < config.p ? 1 : 0;
    }
    if (config.lambda > 0.0 || !has_constant_column(out, k)) return out;
  }
  throw Error(ErrorCode::DegenerateDesign,
              "a passage stayed constant across every perturbation after 16 redraws");
}

std::vector<PerturbationVector> enumerate_perturbations(std::size_t k) {
  if (k == 0 || k > 24) throw Error(ErrorCode::InvalidInput, "enumeration needs 1 <= k <= 24");
  std::vector<PerturbationVector> out(std::size_t{1} << k);
  for (std::size_t m = 0; m < out.size(); ++m) {
    out[m].bits.resize(k);
    for (std::size_t c = 0; c < k; ++c) out[m].bits[c] = static_cast<int>((m >> c) & 1U);
  }
  return out;
}

std::vector<Passage> apply_perturbation(std::span<const Passage> passages,
                                        const PerturbationVector& v) {
  if (v.size() != passages.size())
    throw Error(ErrorCode::DimensionMismatch, "perturbation length " + std::to_string(v.size()) +
                                                  " != context size " +
                                                  std::to_string(passages.size()));
  std::vector<Passage> kept;
  for (std::size_t i = 0; i < passages.size(); ++i)
    if (v.bits[i]) kept.push_back(passages[i]);
  return kept;
}

std::vector<Observation> observe(const SharedContext& context, const GenerationTarget& target,
                                 std::span<const PerturbationVector> vectors,
                                 const ScorerOracle& oracle, std::size_t max_inflight) {
  for (std::size_t i = 0; i < vectors.size(); ++i)
    if (vectors[i].size() != context.passages.size())
      throw Error(ErrorCode::DimensionMismatch,
                  "vector " + std::to_string(i) + " does not match context size");

  std::vector<Observation> out(vectors.size());
  std::vector<std::size_t> lengths(vectors.size(), 0);
  parallel_for_index(vectors.size(), max_inflight, [&](std::size_t i) {
    try {
      auto kept = apply_perturbation(context.passages, vectors[i]);
      auto token_scores = oracle.score_ground_truth(kept, target.query, target);
      double z = 0.0;
      for (double s : token_scores) z += s;
      if (!std::isfinite(z)) throw Error(ErrorCode::ProtocolError, "non-finite oracle score");
      out[i] = Observation{vectors[i], z};
      lengths[i] = token_scores.size();
    } catch (const Error& e) {
      throw e.with_context("vector " + std::to_string(i));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::OracleUnavailable, e.what())
          .with_context("vector " + std::to_string(i));
    }
  });
  for (std::size_t i = 1; i < lengths.size(); ++i)
    if (lengths[i] != lengths[0])
      throw Error(ErrorCode::ProtocolError, "oracle token count changed between calls")
          .with_context("vector " + std::to_string(i));
  return out;
}

double residual_norm(const UtilityReport& report) {
  const std::size_t k = report.scores.size();
  const auto design = design_matrix<double>(report.observations, k);
  Eigen::VectorXd alpha(static_cast<Eigen::Index>(k + 1));
  alpha(0) = report.intercept;
  for (std::size_t c = 0; c < k; ++c) alpha(static_cast<Eigen::Index>(c + 1)) = report.scores[c];
  Eigen::VectorXd z(design.rows());
  for (Eigen::Index r = 0; r < z.size(); ++r) z(r) = report.observations[r].z;
  return (z - design * alpha).norm();
}

namespace {

template <typename Stage>
auto labelled(const char* label, Stage&& stage) {
  try {
    return stage();
  } catch (const Error& e) {
    throw e.with_context(label);
  }
}

UtilityReport fit_report(const SharedContext& context, std::vector<Observation> observations,
                         const AttributionConfig& config) {
  const std::size_t k = context.passages.size();
  auto fit = labelled("fit", [&] {
    return fit_ridge<double>(observations, k, config.lambda, config.penalize_intercept);
  });
  UtilityReport report;
  report.context_id = context.context_id;
  report.intercept = fit.intercept;
  report.scores.assign(fit.scores.data(), fit.scores.data() + fit.scores.size());
  report.observations = std::move(observations);
  report.config = config;
  return report;
}

}  // namespace

UtilityReport attribute(const SharedContext& context, const GenerationTarget& target,
                        const AttributionConfig& config, const ScorerOracle& oracle,
                        std::size_t max_inflight) {
  if (context.passages.empty())
    throw Error(ErrorCode::EmptyContext, "context '" + context.context_id + "' is empty");
  auto vectors = labelled("sample", [&] {
    return sample_perturbations(context.passages.size(), config);
  });
  auto observations = labelled("observe", [&] {
    return observe(context, target, vectors, oracle, max_inflight);
  });
  return fit_report(context, std::move(observations), config);
}

UtilityReport attribute_exhaustive(const SharedContext& context, const GenerationTarget& target,
                                   double lambda, bool penalize_intercept,
                                   const ScorerOracle& oracle, std::size_t max_inflight) {
  if (context.passages.empty())
    throw Error(ErrorCode::EmptyContext, "context '" + context.context_id + "' is empty");
  auto vectors = enumerate_perturbations(context.passages.size());
  auto observations = labelled("observe", [&] {
    return observe(context, target, vectors, oracle, max_inflight);
  });
  AttributionConfig config;
  config.n = vectors.size();
  config.lambda = lambda;
  config.penalize_intercept = penalize_intercept;
  return fit_report(context, std::move(observations), config);
}

std::vector<std::size_t> llm_rank_attribution(const SharedContext& context,
                                              const QueryText& query,
                                              const GeneratorOracle& oracle) {
  const std::size_t k = context.passages.size();
  if (k < 2) throw Error(ErrorCode::InvalidInput, "rank attribution needs at least 2 passages");
  auto prompt = prompts::render_rank(context.passages, query.rendered);
  auto reply = oracle.generate(prompt, 0.0, kDefaultMaxTokens);
  return prompts::parse_rank_line(reply, k);
}

}  // namespace scarlet
