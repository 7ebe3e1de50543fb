#pragma once

// Reference implementations used to check the library. None of them share
// code paths with the code under test beyond tokenization and hashing.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

namespace oracle {

struct RidgeSolution {
  double intercept = 0.0;
  std::vector<double> scores;
};

/// Minimizes ||V a - z||^2 + lambda * sum_{i in penalized} a_i^2 by gradient
/// descent, where V = [1, bits]. Step size is 1 / trace of the Hessian / 2,
/// which is below 1 / lambda_max.
inline RidgeSolution gd_ridge(const std::vector<std::vector<int>>& bits,
                              const std::vector<double>& z, double lambda,
                              bool penalize_intercept, int max_iters = 2000000,
                              double tol = 1e-13) {
  const std::size_t k = bits.front().size();
  const std::size_t d = k + 1;
  auto row = [&](std::size_t r, std::size_t c) { return c == 0 ? 1.0 : double(bits[r][c - 1]); };

  // Precompute H/2 = V'V + lambda D and V'z once; gradient/2 = H/2 a - V'z.
  std::vector<double> h(d * d, 0.0), vz(d, 0.0);
  for (std::size_t r = 0; r < bits.size(); ++r)
    for (std::size_t i = 0; i < d; ++i) {
      vz[i] += row(r, i) * z[r];
      for (std::size_t j = 0; j < d; ++j) h[i * d + j] += row(r, i) * row(r, j);
    }
  for (std::size_t i = 0; i < d; ++i)
    if (i > 0 || penalize_intercept) h[i * d + i] += lambda;
  double trace = 0.0;
  for (std::size_t i = 0; i < d; ++i) trace += h[i * d + i];
  const double step = 1.0 / trace;

  std::vector<double> a(d, 0.0), g(d);
  for (int it = 0; it < max_iters; ++it) {
    double gnorm = 0.0;
    for (std::size_t i = 0; i < d; ++i) {
      double s = -vz[i];
      for (std::size_t j = 0; j < d; ++j) s += h[i * d + j] * a[j];
      g[i] = s;
      gnorm = std::max(gnorm, std::abs(s));
    }
    if (gnorm < tol) break;
    for (std::size_t i = 0; i < d; ++i) a[i] -= step * g[i];
  }
  return {a[0], std::vector<double>(a.begin() + 1, a.end())};
}

inline double sse_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double mean = 0.0;
  for (double x : v) mean += x;
  mean /= double(v.size());
  double s = 0.0;
  for (double x : v) s += (x - mean) * (x - mean);
  return s;
}

/// 0 positive, 1 discard, 2 negative.
struct Partition {
  std::vector<int> labels;
  double sse = std::numeric_limits<double>::infinity();
};

/// Tries every split of the sorted scores into three non-empty contiguous
/// groups whose boundaries fall between distinct values and keeps the one
/// with the smallest total SSE.
inline Partition exhaustive_three_partition(const std::vector<double>& scores) {
  std::vector<double> sorted = scores;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  Partition best;
  double lo = 0, hi = 0;
  for (std::size_t i = 1; i < n; ++i) {
    if (sorted[i - 1] == sorted[i]) continue;
    for (std::size_t j = i + 1; j < n; ++j) {
      if (sorted[j - 1] == sorted[j]) continue;
      std::vector<double> a(sorted.begin(), sorted.begin() + i);
      std::vector<double> b(sorted.begin() + i, sorted.begin() + j);
      std::vector<double> c(sorted.begin() + j, sorted.end());
      double s = sse_of(a) + sse_of(b) + sse_of(c);
      if (s < best.sse) {
        best.sse = s;
        lo = sorted[i];  // first value of the middle group
        hi = sorted[j];  // first value of the top group
      }
    }
  }
  if (!std::isfinite(best.sse)) return best;
  for (double x : scores) best.labels.push_back(x >= hi ? 0 : x >= lo ? 1 : 2);
  return best;
}

/// BM25 straight from the definition over pre-tokenized documents.
inline double bm25(const std::vector<std::vector<std::string>>& docs,
                   const std::vector<std::string>& query, std::size_t doc, double k1 = 1.2,
                   double b = 0.75) {
  double avgdl = 0.0;
  for (const auto& d : docs) avgdl += double(d.size());
  avgdl /= double(docs.size());
  std::set<std::string> terms(query.begin(), query.end());
  double score = 0.0;
  for (const auto& t : terms) {
    double df = 0.0;
    for (const auto& d : docs)
      if (std::find(d.begin(), d.end(), t) != d.end()) df += 1.0;
    double tf = double(std::count(docs[doc].begin(), docs[doc].end(), t));
    if (tf == 0.0) continue;
    double n = double(docs.size());
    double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    score += idf * tf * (k1 + 1.0) /
             (tf + k1 * (1.0 - b + b * double(docs[doc].size()) / avgdl));
  }
  return score;
}

/// Pairwise softplus loss for a mean-pooled bag encoder, written with plain
/// loops. `rows(text)` maps a text to its bucket ids (one per token).
struct PlainEncoder {
  std::size_t dim = 0;
  std::function<double(std::size_t bucket, std::size_t col)> weight;
  std::function<std::vector<std::size_t>(const std::string&)> rows;

  std::vector<double> embed(const std::string& text) const {
    std::vector<double> out(dim, 0.0);
    auto ids = rows(text);
    if (ids.empty()) return out;
    for (auto id : ids)
      for (std::size_t c = 0; c < dim; ++c) out[c] += weight(id, c);
    for (auto& x : out) x /= double(ids.size());
    return out;
  }
};

struct Triple {
  std::string query;
  std::vector<std::string> positives;
  std::vector<std::string> negatives;
};

inline double pairwise_loss(const PlainEncoder& enc, const std::vector<Triple>& batch) {
  auto dot = [](const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
  };
  double loss = 0.0;
  for (const auto& t : batch) {
    auto q = enc.embed(t.query);
    for (const auto& p : t.positives) {
      double sp = dot(q, enc.embed(p));
      for (const auto& n : t.negatives) {
        double x = dot(q, enc.embed(n)) - sp;
        loss += std::log1p(std::exp(x));
      }
    }
  }
  return loss;
}

/// nDCG@k written out from the textbook formula.
inline double ndcg(const std::vector<double>& ranked, std::size_t k) {
  auto dcg = [k](const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t i = 0; i < std::min(k, g.size()); ++i) s += g[i] / std::log2(double(i) + 2.0);
    return s;
  };
  auto ideal = ranked;
  std::sort(ideal.rbegin(), ideal.rend());
  double idcg = dcg(ideal);
  return idcg == 0.0 ? 0.0 : dcg(ranked) / idcg;
}

}  // namespace oracle
