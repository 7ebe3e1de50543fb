#include <doctest.h>

#include <cstdlib>
#include <map>
#include <set>
#include <sys/wait.h>

#include "scarlet/io.hpp"
#include "scarlet/pipeline.hpp"
#include "support.hpp"

using namespace scarlet;
namespace fs = std::filesystem;

namespace {

RunConfig fixture_config(const fs::path& out, std::vector<std::string> overrides = {}) {
  auto cfg = Config::load(testing::fixture_dir() / "fixture.conf");
  cfg.set("paths.output_dir", out.string());
  for (const auto& o : overrides) cfg.set(o);
  return RunConfig::from(cfg);
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files[e.path().filename().string()] = read_file(e.path());
  return files;
}

int run_cli(const std::string& args) {
  std::string cmd = std::string(SCARLET_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string conf() { return (testing::fixture_dir() / "fixture.conf").string(); }

}  // namespace

TEST_SUITE("pipeline") {

TEST_CASE("run config defaults, overrides and validation") {
  auto c = RunConfig::from(Config::parse(""));
  CHECK(c.attribution.n == 64);
  CHECK(c.attribution.p == 0.5);
  CHECK(c.attribution.lambda == 1.0);
  CHECK(c.attribution.penalize_intercept);
  CHECK(c.strategy == SamplingStrategy::cluster);
  CHECK(c.synthesis.temperature == 0.5);
  CHECK(c.synthesis.sparql_limit == 20);
  CHECK(c.eval.ks == std::vector<std::size_t>{1, 3, 5});
  CHECK(c.paths.output_dir.filename() == "out");

  auto tuned = RunConfig::from(Config::parse("[attribution]\nn = 128\n[runtime]\nseed = 7\n"));
  CHECK(tuned.attribution.n == 128);
  CHECK(tuned.attribution.seed == 7);
  CHECK(tuned.train.seed == 7);
  CHECK(tuned.effective.at("attribution.n") == "128");

  auto code = [](const char* text) {
    try {
      RunConfig::from(Config::parse(text));
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidInput;
  };
  CHECK(code("[attribution]\nsamples = 3\n") == ErrorCode::InvalidConfig);
  CHECK(code("[attribution]\np = 1.5\n") == ErrorCode::InvalidConfig);
  CHECK(code("[oracle]\nscorer = http\n") == ErrorCode::InvalidConfig);
  CHECK(code("[sampling]\nstrategy = random\n") == ErrorCode::InvalidConfig);
  CHECK(code("[eval]\nattributor = oracle\n") == ErrorCode::InvalidConfig);
  CHECK(code("[train]\nepochs = 0\n") == ErrorCode::InvalidConfig);
}

TEST_CASE("exit codes") {
  CHECK(exit_code_for(ErrorCode::MissingInput) == 2);
  CHECK(exit_code_for(ErrorCode::OracleUnavailable) == 3);
  CHECK(exit_code_for(ErrorCode::SchemaError) == 4);
  CHECK(exit_code_for(ErrorCode::NonFiniteLoss) == 1);
}

TEST_CASE("cli exit codes") {
  testing::TempDir dir;
  const std::string out = "--set paths.output_dir=" + dir.path().string();
  // No contexts yet.
  CHECK(run_cli("attribute --config " + conf() + " " + out) == 2);
  CHECK(run_cli("train --config " + conf() + " " + out) == 2);
  CHECK(run_cli("synthesize --config " + (dir.path() / "absent.conf").string()) == 2);
  // Validation failures.
  CHECK(run_cli("synthesize --config " + conf() + " " + out + " --set attribution.bogus=1") == 4);
  CHECK(run_cli("synthesize") == 4);
  CHECK(run_cli("frobnicate --config " + conf()) == 4);
  // Unreachable scorer.
  CHECK(run_cli("synthesize --config " + conf() + " " + out + " --set synthesis.seeds_per_task=1") == 0);
  CHECK(run_cli("attribute --config " + conf() + " " + out +
                " --set oracle.scorer=http --set oracle.score_url=http://127.0.0.1:1/score"
                " --set attribution.n=2") == 3);
}

TEST_CASE("stages compose to the same artifacts as e2e") {
  testing::TempDir a, b;
  auto ca = fixture_config(a.path());
  auto cb = fixture_config(b.path());
  run_command("e2e", ca);
  for (auto stage : {"synthesize", "attribute", "sample", "train", "eval"}) run_command(stage, cb);

  auto sa = snapshot(a.path());
  auto sb = snapshot(b.path());
  sa.erase(artifacts::kManifest);
  sb.erase(artifacts::kManifest);
  REQUIRE(sa.size() == sb.size());
  for (const auto& [name, bytes] : sa) {
    CAPTURE(name);
    REQUIRE(sb.count(name) == 1);
    CHECK(sb.at(name) == bytes);
  }
  for (auto name : {artifacts::kContexts, artifacts::kSynthetic, artifacts::kNoise,
                    artifacts::kReports, artifacts::kPairs, artifacts::kCheckpoint,
                    artifacts::kLossTrace, artifacts::kMetrics})
    CHECK(sa.count(name) == 1);
}

TEST_CASE("manifest records the run") {
  testing::TempDir dir;
  auto c = fixture_config(dir.path(), {"synthesis.seeds_per_task=1"});
  run_command("synthesize", c);
  auto m = Json::parse(read_file(dir.path() / artifacts::kManifest));
  CHECK(m["command"] == "synthesize");
  CHECK(m["seed"] == 0);
  CHECK(m["config_hash"].get<std::string>().size() == 64);
  CHECK(m["inputs"]["corpus"] == sha256_hex(read_file(testing::fixture_dir() / "passages.jsonl")));
  CHECK(m["versions"]["scarlet"] == std::string(kVersion));

  auto other = fixture_config(dir.path(), {"synthesis.seeds_per_task=1", "attribution.n=32"});
  run_command("synthesize", other);
  CHECK(Json::parse(read_file(dir.path() / artifacts::kManifest))["config_hash"] != m["config_hash"]);
}

TEST_CASE("synthesis artifacts are consistent") {
  testing::TempDir dir;
  auto c = fixture_config(dir.path());
  auto s = cmd_synthesize(c);
  CHECK(s["kept"].get<int>() > 0);
  PassageStore store(read_jsonl_as<Passage>(c.paths.corpus, passage_from_json));
  for (auto& p : read_jsonl_as<Passage>(dir.path() / artifacts::kNoise, passage_from_json)) {
    CHECK(p.source == PassageSource::synthetic_noise);
    store.add(p);
  }
  std::set<std::string> ids;
  for (auto& j : read_jsonl(dir.path() / artifacts::kContexts)) {
    auto ctx = context_from_json(j, store);
    CHECK(ids.insert(ctx.context_id).second);
    CHECK_FALSE(ctx.passages.empty());
  }
  for (auto& j : read_jsonl(dir.path() / artifacts::kSynthetic))
    CHECK(ids.count(j["context_id"].get<std::string>()) == 1);

  auto plain = fixture_config(dir.path(), {"synthesis.noise=false"});
  cmd_synthesize(plain);
  CHECK(read_jsonl(dir.path() / artifacts::kNoise).empty());
}

TEST_CASE("sha256") {
  CHECK(sha256_hex("abc") == "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
}

}  // TEST_SUITE
