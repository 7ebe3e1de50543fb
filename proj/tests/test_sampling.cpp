#include <doctest.h>

#include <random>
#include <sstream>

#include "oracles.hpp"
#include "scarlet/io.hpp"
#include "scarlet/sampling.hpp"

using namespace scarlet;

namespace {

using L = ClusterLabel;

SharedContext context_of(std::size_t k) {
  SharedContext c;
  c.context_id = "ctx";
  for (std::size_t i = 0; i < k; ++i)
    c.passages.push_back(make_passage("p" + std::to_string(i), "text " + std::to_string(i)));
  return c;
}

UtilityReport report_of(std::vector<double> scores) {
  UtilityReport r;
  r.context_id = "ctx";
  r.scores = std::move(scores);
  return r;
}

std::vector<std::string> ids(const std::vector<Passage>& ps) {
  std::vector<std::string> out;
  for (const auto& p : ps) out.push_back(p.id);
  return out;
}

}  // namespace

TEST_SUITE("sampling") {

TEST_CASE("frozen cluster cases") {
  std::vector<double> a{10, 9, 5, 1, 0};
  auto ca = cluster_1d(a);
  CHECK(ca.labels == std::vector<L>{L::positive, L::positive, L::discard, L::negative, L::negative});
  CHECK(within_cluster_sse(a, ca) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ca.centroids[0] == doctest::Approx(9.5));
  CHECK(ca.centroids[1] == doctest::Approx(5.0));
  CHECK(ca.centroids[2] == doctest::Approx(0.5));

  std::vector<double> s{0.95, 0.9, 0.88, 0.5, 0.48, 0.1, 0.05};
  auto cs = cluster_1d(s);
  CHECK(cs.labels == std::vector<L>{L::positive, L::positive, L::positive, L::discard, L::discard,
                                    L::negative, L::negative});
}

TEST_CASE("equal values never split and unsorted input keeps alignment") {
  std::vector<double> v{3, 0, 3, 1, 3, 0, 2};
  auto c = cluster_1d(v);
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = 0; j < v.size(); ++j)
      if (v[i] == v[j]) CHECK(c.labels[i] == c.labels[j]);
  CHECK(c.labels[0] == L::positive);
  CHECK(c.labels[1] == L::negative);
}

TEST_CASE("fewer than three distinct values is InsufficientSeparation") {
  std::vector<double> two{1, 1, 2, 2};
  try {
    cluster_1d(two);
    FAIL("expected InsufficientSeparation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientSeparation);
  }
  std::vector<double> none;
  CHECK_THROWS_AS(cluster_1d(none), Error);
}

TEST_CASE("matches the exhaustive partition on tie-heavy integer lists") {
  // Integer scores produce SSE ties between different partitions, so only
  // the optimal cost is compared here.
  std::mt19937_64 rng(42);
  for (int trial = 0; trial < 300; ++trial) {
    std::size_t n = 3 + rng() % 10;
    std::vector<double> v(n);
    for (auto& x : v) x = double(rng() % 6);
    auto ref = oracle::exhaustive_three_partition(v);
    if (!std::isfinite(ref.sse)) {
      CHECK_THROWS_AS(cluster_1d(v), Error);
      continue;
    }
    auto got = cluster_1d(v);
    CHECK(within_cluster_sse(v, got) == doctest::Approx(ref.sse).epsilon(1e-9));
  }
}

TEST_CASE("cluster strategy selects positives and negatives in context order") {
  auto ctx = context_of(5);
  QueryText q{std::nullopt, "who?", "who?"};
  auto sel = select_pairs(report_of({0.1, 5.0, 2.0, 4.8, -3.0}), ctx, SamplingStrategy::cluster, q);
  CHECK_FALSE(sel.fallback);
  CHECK(ids(sel.pairs.positives) == std::vector<std::string>{"p1", "p3"});
  CHECK(ids(sel.pairs.negatives) == std::vector<std::string>{"p4"});
  CHECK(sel.pairs.query == q);
}

TEST_CASE("top1_bottom5 with stable ties") {
  auto ctx = context_of(8);
  auto sel = select_pairs(report_of({1, 7, 7, 3, 2, 0, 5, 4}), ctx, SamplingStrategy::top1_bottom5);
  CHECK(ids(sel.pairs.positives) == std::vector<std::string>{"p1"});
  // Bottom five of 7,7,5,4,3,2,1,0: 4(p7),3,2,1,0 in context order.
  CHECK(ids(sel.pairs.negatives) == std::vector<std::string>{"p0", "p3", "p4", "p5", "p7"});

  auto small = select_pairs(report_of({1, 2, 3}), context_of(3), SamplingStrategy::top1_bottom5);
  CHECK(ids(small.pairs.positives) == std::vector<std::string>{"p2"});
  CHECK(ids(small.pairs.negatives) == std::vector<std::string>{"p0", "p1"});
}

TEST_CASE("cluster falls back when scores do not separate") {
  auto ctx = context_of(4);
  auto sel = select_pairs(report_of({1, 2, 1, 2}), ctx, SamplingStrategy::cluster);
  CHECK(sel.fallback);
  CHECK_FALSE(sel.all_equal);
  CHECK(ids(sel.pairs.positives) == std::vector<std::string>{"p1"});

  auto eq = select_pairs(report_of({0, 0, 0, 0}), ctx, SamplingStrategy::cluster);
  CHECK(eq.fallback);
  CHECK(eq.all_equal);
  CHECK(ids(eq.pairs.positives) == std::vector<std::string>{"p0"});
  CHECK(ids(eq.pairs.negatives) == std::vector<std::string>{"p1", "p2", "p3"});

  CHECK_THROWS_AS(select_pairs(report_of({1, 2}), ctx, SamplingStrategy::cluster), Error);
}

TEST_CASE("strategy names") {
  CHECK(sampling_strategy_from_string("top1_bottom5") == SamplingStrategy::top1_bottom5);
  CHECK(to_string(SamplingStrategy::cluster) == "cluster");
  CHECK_THROWS_AS(sampling_strategy_from_string("random"), Error);
}

TEST_CASE("emit writes jsonl and skips one-sided sets") {
  auto ctx = context_of(3);
  std::vector<SampledInstance> insts(3);
  insts[0].pairs = {{std::nullopt, "q0", "q0"}, {ctx.passages[0]}, {ctx.passages[1]}};
  insts[1].pairs = {{std::nullopt, "q1", "q1"}, {ctx.passages[0]}, {}};
  insts[2].pairs = {{std::nullopt, "q2", "q2"}, {ctx.passages[2]}, {ctx.passages[0], ctx.passages[1]}};
  insts[2].fallback = true;
  std::ostringstream out;
  auto summary = emit_training_pairs(insts, out);
  CHECK(summary == EmitSummary{3, 2, 1, 1});

  std::istringstream in(out.str());
  std::string line;
  std::vector<Json> rows;
  while (std::getline(in, line)) rows.push_back(Json::parse(line));
  REQUIRE(rows.size() == 2);
  CHECK(rows[0]["query"] == "q0");
  CHECK(rows[1]["negatives"] == Json::array({"p0", "p1"}));
}

}  // TEST_SUITE
