#pragma once

#include <array>
#include <cstddef>
#include <ostream>
#include <span>
#include <vector>

#include "scarlet/attribution.hpp"
#include "scarlet/core.hpp"

namespace scarlet {

enum class ClusterLabel { positive, discard, negative };

struct ClusterAssignment {
  std::vector<ClusterLabel> labels;     // aligned with the input scores
  std::array<double, 3> centroids{};    // positive, discard, negative
};

/// Exact 1-D 3-means over the sorted scores by dynamic programming. Equal
/// values always share a cluster. Throws InsufficientSeparation when fewer
/// than three distinct values exist.
ClusterAssignment cluster_1d(std::span<const double> scores);

/// Sum of squared deviations from each cluster's mean.
double within_cluster_sse(std::span<const double> scores, const ClusterAssignment& assignment);

enum class SamplingStrategy { cluster, top1_bottom5 };

std::string_view to_string(SamplingStrategy s);
SamplingStrategy sampling_strategy_from_string(std::string_view s);

struct PairSelection {
  TrainingPairSet pairs;
  bool fallback = false;    // cluster strategy could not separate the scores
  bool all_equal = false;   // every score identical; positive chosen by index
};

/// Maps utility scores to positives and negatives. Passages keep their
/// context order on each side.
PairSelection select_pairs(const UtilityReport& report, const SharedContext& context,
                           SamplingStrategy strategy, QueryText query = {});

struct SampledInstance {
  SyntheticExample example;
  TrainingPairSet pairs;
  bool fallback = false;
};

struct EmitSummary {
  std::size_t instances = 0;
  std::size_t emitted = 0;
  std::size_t skipped = 0;
  std::size_t fallbacks = 0;

  bool operator==(const EmitSummary&) const = default;
};

/// Writes one pairs.jsonl line per instance in input order; instances with
/// an empty side are skipped and counted.
EmitSummary emit_training_pairs(std::span<const SampledInstance> instances, std::ostream& out);

}  // namespace scarlet
