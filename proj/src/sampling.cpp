#include "scarlet/sampling.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "scarlet/io.hpp"

namespace scarlet {

namespace {

struct Group {
  double value;
  std::size_t count;
};

// Cost of grouping runs [a, b) of distinct values into one cluster.
class SegmentCost {
 public:
  explicit SegmentCost(const std::vector<Group>& groups) {
    double total = 0;
    std::size_t n = 0;
    for (const auto& g : groups) {
      total += g.value * static_cast<double>(g.count);
      n += g.count;
    }
    shift_ = total / static_cast<double>(n);
    cnt_.assign(groups.size() + 1, 0);
    sum_.assign(groups.size() + 1, 0);
    sq_.assign(groups.size() + 1, 0);
    for (std::size_t i = 0; i < groups.size(); ++i) {
      double x = groups[i].value - shift_;
      double c = static_cast<double>(groups[i].count);
      cnt_[i + 1] = cnt_[i] + c;
      sum_[i + 1] = sum_[i] + c * x;
      sq_[i + 1] = sq_[i] + c * x * x;
    }
  }

  double operator()(std::size_t a, std::size_t b) const {
    double c = cnt_[b] - cnt_[a];
    double s = sum_[b] - sum_[a];
    double q = sq_[b] - sq_[a];
    return std::max(0.0, q - s * s / c);
  }

 private:
  double shift_ = 0;
  std::vector<double> cnt_, sum_, sq_;
};

}  // namespace

ClusterAssignment cluster_1d(std::span<const double> scores) {
  std::vector<double> sorted(scores.begin(), scores.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<Group> groups;
  for (double v : sorted) {
    if (!groups.empty() && groups.back().value == v)
      ++groups.back().count;
    else
      groups.push_back({v, 1});
  }
  if (groups.size() < 3)
    throw Error(ErrorCode::InsufficientSeparation,
                "need at least 3 distinct scores, got " + std::to_string(groups.size()));

  // Groups ascend: cluster 0 = negative, 1 = discard, 2 = positive.
  const std::size_t m = groups.size();
  SegmentCost cost(groups);
  constexpr double kInf = std::numeric_limits<double>::infinity();
  // best2[j]: optimal cost of splitting groups [0, j) into two clusters.
  std::vector<double> best2(m + 1, kInf);
  std::vector<std::size_t> cut2(m + 1, 0);
  for (std::size_t j = 2; j <= m; ++j)
    for (std::size_t i = 1; i < j; ++i) {
      double c = cost(0, i) + cost(i, j);
      if (c < best2[j]) {
        best2[j] = c;
        cut2[j] = i;
      }
    }
  double best = kInf;
  std::size_t upper = 0;
  for (std::size_t j = 2; j < m; ++j) {
    double c = best2[j] + cost(j, m);
    if (c < best) {
      best = c;
      upper = j;
    }
  }
  const std::size_t lower = cut2[upper];
  const double lower_bound = groups[lower].value;   // first value of the discard cluster
  const double upper_bound = groups[upper].value;   // first value of the positive cluster

  ClusterAssignment out;
  out.labels.reserve(scores.size());
  std::array<double, 3> sums{};
  std::array<std::size_t, 3> counts{};
  for (double s : scores) {
    ClusterLabel label = s >= upper_bound   ? ClusterLabel::positive
                         : s >= lower_bound ? ClusterLabel::discard
                                            : ClusterLabel::negative;
    out.labels.push_back(label);
    sums[static_cast<std::size_t>(label)] += s;
    ++counts[static_cast<std::size_t>(label)];
  }
  for (std::size_t c = 0; c < 3; ++c) out.centroids[c] = sums[c] / static_cast<double>(counts[c]);
  return out;
}

double within_cluster_sse(std::span<const double> scores, const ClusterAssignment& assignment) {
  double sse = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    double d = scores[i] - assignment.centroids[static_cast<std::size_t>(assignment.labels[i])];
    sse += d * d;
  }
  return sse;
}

std::string_view to_string(SamplingStrategy s) {
  return s == SamplingStrategy::cluster ? "cluster" : "top1_bottom5";
}

SamplingStrategy sampling_strategy_from_string(std::string_view s) {
  if (s == "cluster") return SamplingStrategy::cluster;
  if (s == "top1_bottom5") return SamplingStrategy::top1_bottom5;
  throw Error(ErrorCode::InvalidConfig, "unknown sampling strategy '" + std::string(s) + "'");
}

namespace {

void top1_bottom5(std::span<const double> scores, std::vector<ClusterLabel>& labels) {
  const std::size_t k = scores.size();
  std::vector<std::size_t> order(k);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  labels.assign(k, ClusterLabel::discard);
  labels[order[0]] = ClusterLabel::positive;
  const std::size_t negatives = std::min<std::size_t>(5, k - 1);
  for (std::size_t r = k - negatives; r < k; ++r) labels[order[r]] = ClusterLabel::negative;
}

}  // namespace

PairSelection select_pairs(const UtilityReport& report, const SharedContext& context,
                           SamplingStrategy strategy, QueryText query) {
  const std::size_t k = context.passages.size();
  if (report.scores.size() != k)
    throw Error(ErrorCode::DimensionMismatch, "report has " + std::to_string(report.scores.size()) +
                                                  " scores for " + std::to_string(k) +
                                                  " passages");
  if (k == 0) throw Error(ErrorCode::EmptyContext, "context is empty");

  PairSelection sel;
  std::vector<ClusterLabel> labels;
  if (strategy == SamplingStrategy::cluster) {
    try {
      labels = cluster_1d(report.scores).labels;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InsufficientSeparation) throw;
      sel.fallback = true;
    }
  }
  if (labels.empty()) top1_bottom5(report.scores, labels);
  sel.all_equal = std::all_of(report.scores.begin(), report.scores.end(),
                              [&](double s) { return s == report.scores.front(); });

  sel.pairs.query = std::move(query);
  for (std::size_t i = 0; i < k; ++i) {
    if (labels[i] == ClusterLabel::positive) sel.pairs.positives.push_back(context.passages[i]);
    if (labels[i] == ClusterLabel::negative) sel.pairs.negatives.push_back(context.passages[i]);
  }
  return sel;
}

EmitSummary emit_training_pairs(std::span<const SampledInstance> instances, std::ostream& out) {
  EmitSummary summary;
  summary.instances = instances.size();
  for (const auto& inst : instances) {
    if (inst.fallback) ++summary.fallbacks;
    if (inst.pairs.positives.empty() || inst.pairs.negatives.empty()) {
      ++summary.skipped;
      continue;
    }
    out << pairs_to_json(inst.pairs).dump() << '\n';
    ++summary.emitted;
  }
  return summary;
}

}  // namespace scarlet
