#include <doctest.h>

#include "oracles.hpp"
#include "scarlet/evalkit.hpp"

using namespace scarlet;

namespace {

GtiInstance planted(std::size_t useful, const std::string& answer = "Velmora") {
  GtiInstance g;
  g.query = {std::nullopt, "Capital of Zorlandia?", "Capital of Zorlandia?"};
  g.ground_truth = answer;
  for (std::size_t i = 0; i < kGtiPassages; ++i) {
    std::string text = i == useful ? "The capital is " + answer + "." : "Filler passage " + std::to_string(i) + ".";
    g.passages.push_back(make_passage("g" + std::to_string(i), text));
    g.gains.push_back(i == useful ? 1.0 : 0.0);
  }
  return g;
}

}  // namespace

TEST_SUITE("evalkit") {

TEST_CASE("ndcg") {
  std::vector<double> g{0, 1, 1};
  CHECK(ndcg_at_k<double>(g, 3) == doctest::Approx(0.6934264036172708).epsilon(1e-12));
  CHECK(ndcg_at_k<double>(g, 3) == doctest::Approx(oracle::ndcg(g, 3)).epsilon(1e-12));
  std::vector<double> perfect{3, 2, 1, 0};
  CHECK(ndcg_at_k<double>(perfect, 2) == doctest::Approx(1.0));
  std::vector<double> zero{0, 0};
  CHECK(ndcg_at_k<double>(zero, 2) == 0.0);
  std::vector<double> neg{1, -1};
  try {
    ndcg_at_k<double>(neg, 2);
    FAIL("expected InvalidGain");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InvalidGain);
  }
  CHECK_THROWS_AS(ndcg_at_k<double>(g, 0), Error);
  std::vector<float> gf{0, 1, 1};
  CHECK(ndcg_at_k<float>(gf, 3) == doctest::Approx(0.69343f).epsilon(1e-5));
}

TEST_CASE("text metrics") {
  std::vector<std::string> answers{"Velmora"};
  CHECK(exact_match_accuracy("The capital is Velmora.", answers));
  CHECK_FALSE(exact_match_accuracy("The capital is Dunmarch.", answers));
  std::vector<std::string> multi{"New York", "NYC"};
  CHECK(exact_match_accuracy("it is new   york city", multi));
  CHECK_FALSE(exact_match_accuracy("york new", multi));
  CHECK_THROWS_AS(exact_match_accuracy("x", std::span<const std::string>()), Error);

  CHECK(token_f1("a b", "a c") == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(token_f1("a a b", "a b b") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(token_f1("", "") == 1.0);
  CHECK(token_f1("a", "") == 0.0);
  CHECK(token_f1("x", "y") == 0.0);

  CHECK(rouge_l("the cat sat", "the cat ran") == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(rouge_l("a b c d", "a c d") == doctest::Approx(2 * 0.75 * 1.0 / 1.75).epsilon(1e-12));
  CHECK(rouge_l("", "a") == 0.0);
}

TEST_CASE("rank_by_scores is stable") {
  std::vector<double> s{1, 3, 3, 2};
  CHECK(rank_by_scores(s) == std::vector<std::size_t>{1, 2, 3, 0});
}

TEST_CASE("gti validation and json") {
  auto g = planted(3);
  CHECK_NOTHROW(validate_gti(g));
  auto back = ranking_instance_from_json(to_json(g));
  CHECK(back.passages == g.passages);
  CHECK(back.gains == g.gains);
  CHECK(back.ground_truth == g.ground_truth);
  g.passages.pop_back();
  g.gains.pop_back();
  CHECK_THROWS_AS(validate_gti(g), Error);
  auto j = to_json(planted(0));
  j["gains"][0] = -1.0;
  CHECK_THROWS_AS(ranking_instance_from_json(j), Error);
  j["gains"] = nlohmann::json::array({1.0});
  CHECK_THROWS_AS(ranking_instance_from_json(j), Error);
}

TEST_CASE("gti benchmark with each attributor") {
  std::vector<GtiInstance> insts{planted(0), planted(4), planted(9)};
  std::vector<std::size_t> ks{1, 5};
  OverlapScorer scorer;
  AttributionConfig cfg;
  auto pert = run_gti_benchmark(insts, perturbation_attributor(scorer, cfg, 2), ks);
  CHECK(pert.instances == 3);
  CHECK(pert.failures == 0);
  CHECK(pert.mean_ndcg.at(1) == doctest::Approx(1.0));
  CHECK(pert.mean_ndcg.at(5) == doctest::Approx(1.0));

  auto exh = run_gti_benchmark(std::span(insts).first(1), exhaustive_attributor(scorer), ks);
  CHECK(exh.mean_ndcg.at(1) == doctest::Approx(1.0));

  MockGenerator gen;
  auto ranked = run_gti_benchmark(insts, llm_rank_attributor(gen), ks);
  CHECK(ranked.failures == 0);
  CHECK(ranked.mean_ndcg.at(1) == doctest::Approx(1.0));

  FunctionGenerator partial([](const std::string&) { return std::string("My rank: [10]"); });
  auto p = run_gti_benchmark(std::span(insts).last(1), llm_rank_attributor(partial), ks);
  CHECK(p.mean_ndcg.at(1) == doctest::Approx(1.0));

  FunctionGenerator junk([](const std::string&) { return std::string("nothing"); });
  auto failed = run_gti_benchmark(insts, llm_rank_attributor(junk), ks);
  CHECK(failed.failures == 3);
  CHECK(failed.mean_ndcg.at(1) == 0.0);
}

TEST_CASE("retrieval eval ranks by encoder score") {
  RankingInstance inst;
  inst.query = {std::nullopt, "alpha", "alpha"};
  inst.passages = {make_passage("x", "beta"), make_passage("y", "alpha")};
  inst.gains = {0, 1};
  // Rows for "alpha" align with each other, "beta" is orthogonal.
  ToyEncoder::Table t = ToyEncoder::Table::Zero(16, 2);
  ToyEncoder enc(t);
  enc.table().row(enc.bucket("alpha")) << 1, 0;
  if (enc.bucket("beta") != enc.bucket("alpha")) enc.table().row(enc.bucket("beta")) << 0, 1;
  RankingInstance empty;
  empty.query = inst.query;
  std::vector<RankingInstance> set{inst, empty};
  auto r = run_retrieval_eval(enc, set, 1);
  CHECK(r.evaluated == 1);
  CHECK(r.skipped == 1);
  CHECK(r.mean_ndcg == doctest::Approx(1.0));
  CHECK_THROWS_AS(run_retrieval_eval(enc, set, 0), Error);
}

}  // TEST_SUITE
