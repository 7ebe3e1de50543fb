#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "scarlet/core.hpp"
#include "scarlet/oracles.hpp"

namespace scarlet {

/// Inclusion mask over the passages of a context: 1 keeps, 0 removes.
struct PerturbationVector {
  std::vector<int> bits;

  std::size_t size() const { return bits.size(); }
  bool operator==(const PerturbationVector&) const = default;
};

struct Observation {
  PerturbationVector vector;
  double z = 0.0;

  bool operator==(const Observation&) const = default;
};

struct AttributionConfig {
  std::size_t n = 64;
  double p = 0.5;
  double lambda = 1.0;
  bool penalize_intercept = true;
  std::uint64_t seed = 0;

  bool operator==(const AttributionConfig&) const = default;
};

void validate(const AttributionConfig& config);

struct UtilityReport {
  std::string context_id;
  double intercept = 0.0;
  std::vector<double> scores;
  std::vector<Observation> observations;
  AttributionConfig config;

  bool operator==(const UtilityReport&) const = default;
};

/// Bernoulli(p) masks from a seeded generator. With lambda = 0 a design in
/// which some passage is always kept or always removed is redrawn (up to 16
/// times) before giving up with DegenerateDesign.
std::vector<PerturbationVector> sample_perturbations(std::size_t k, const AttributionConfig& config);

/// All 2^k masks in binary counting order (bit 0 is passage 1).
std::vector<PerturbationVector> enumerate_perturbations(std::size_t k);

/// Passages whose bit is set, in their original order.
std::vector<Passage> apply_perturbation(std::span<const Passage> passages,
                                        const PerturbationVector& v);

/// Scores the ground truth under each perturbed context. Oracle calls run on
/// up to `max_inflight` threads; the result order follows `vectors`.
std::vector<Observation> observe(const SharedContext& context, const GenerationTarget& target,
                                 std::span<const PerturbationVector> vectors,
                                 const ScorerOracle& oracle, std::size_t max_inflight = 8);

template <typename Scalar>
struct RidgeFit {
  Scalar intercept{};
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> scores;
};

/// Design matrix [1, v_i] with one row per observation.
template <typename Scalar = double>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> design_matrix(
    std::span<const Observation> observations, std::size_t k) {
  Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> design(
      static_cast<Eigen::Index>(observations.size()), static_cast<Eigen::Index>(k + 1));
  for (std::size_t r = 0; r < observations.size(); ++r) {
    const auto& bits = observations[r].vector.bits;
    if (bits.size() != k)
      throw Error(ErrorCode::DimensionMismatch,
                  "observation " + std::to_string(r) + " has " + std::to_string(bits.size()) +
                      " bits, expected " + std::to_string(k));
    design(static_cast<Eigen::Index>(r), 0) = Scalar(1);
    for (std::size_t c = 0; c < k; ++c)
      design(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c + 1)) = Scalar(bits[c]);
  }
  return design;
}

/// Ridge surrogate: solves (V'V + lambda D) a = V'z, where D is the identity,
/// or the identity with a zero in the intercept slot when the intercept is
/// not penalized. Observations are unweighted.
template <typename Scalar = double>
RidgeFit<Scalar> fit_ridge(std::span<const Observation> observations, std::size_t k,
                           Scalar lambda, bool penalize_intercept) {
  using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  if (observations.empty()) throw Error(ErrorCode::InvalidInput, "no observations to fit");
  if (k == 0) throw Error(ErrorCode::InvalidInput, "k must be >= 1");
  if (!(lambda >= Scalar(0))) throw Error(ErrorCode::InvalidConfig, "lambda must be >= 0");

  const Matrix design = design_matrix<Scalar>(observations, k);
  Vector z(design.rows());
  for (Eigen::Index r = 0; r < z.size(); ++r) z(r) = Scalar(observations[r].z);

  Matrix gram = design.transpose() * design;
  Vector penalty = Vector::Constant(gram.rows(), lambda);
  if (!penalize_intercept) penalty(0) = Scalar(0);
  gram.diagonal() += penalty;

  Eigen::LDLT<Matrix> ldlt(gram);
  const auto d = ldlt.vectorD();
  const Scalar scale = d.cwiseAbs().maxCoeff();
  const Scalar tol = scale * Scalar(gram.rows()) * Eigen::NumTraits<Scalar>::epsilon() * Scalar(16);
  if (ldlt.info() != Eigen::Success || !(scale > Scalar(0)) || d.minCoeff() <= tol)
    throw Error(ErrorCode::SingularDesign, "normal equations are singular");

  Vector alpha = ldlt.solve(design.transpose() * z);
  return {alpha(0), alpha.tail(static_cast<Eigen::Index>(k))};
}

/// sqrt(sum_i (z_i - intercept - scores . v_i)^2).
double residual_norm(const UtilityReport& report);

/// sample_perturbations -> observe -> fit_ridge. Errors carry the stage label.
UtilityReport attribute(const SharedContext& context, const GenerationTarget& target,
                        const AttributionConfig& config, const ScorerOracle& oracle,
                        std::size_t max_inflight = 8);

/// Same pipeline over all 2^k masks; used as a reference attributor.
UtilityReport attribute_exhaustive(const SharedContext& context, const GenerationTarget& target,
                                   double lambda, bool penalize_intercept,
                                   const ScorerOracle& oracle, std::size_t max_inflight = 8);

/// Asks the generator to rank the numbered passages and parses its
/// "My rank:" line. Returns 1-based indices, possibly a partial ranking.
std::vector<std::size_t> llm_rank_attribution(const SharedContext& context,
                                              const QueryText& query,
                                              const GeneratorOracle& oracle);

}  // namespace scarlet
