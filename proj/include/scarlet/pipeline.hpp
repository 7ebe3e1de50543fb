#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "scarlet/attribution.hpp"
#include "scarlet/config.hpp"
#include "scarlet/oracles.hpp"
#include "scarlet/sampling.hpp"
#include "scarlet/trainer.hpp"

namespace scarlet {

inline constexpr std::string_view kVersion = "0.1.0";

/// Typed view of a Config with every default filled in.
struct RunConfig {
  struct Paths {
    std::filesystem::path corpus, tasks, seeds, entity_fixture, gti, retrieval_eval, output_dir;
  } paths;

  struct Oracle {
    std::string scorer = "mock_overlap";  // mock_overlap | http
    std::string generator = "mock";       // mock | http
    std::string score_url, generate_url;
  } oracle;

  struct Synthesis {
    std::size_t per_entity = 10;
    std::size_t total = 10;
    std::size_t sparql_limit = 20;
    double temperature = 0.5;
    std::size_t seeds_per_task = 1000;
    bool noise = true;
    std::string sparql_url, search_url;
  } synthesis;

  AttributionConfig attribution;
  SamplingStrategy strategy = SamplingStrategy::cluster;

  TrainConfig train;
  std::size_t buckets = ToyEncoder::kDefaultBuckets;
  std::size_t dim = ToyEncoder::kDefaultDim;

  struct Eval {
    std::string attributor = "perturbation";  // perturbation | llm_rank
    std::vector<std::size_t> ks{1, 3, 5};
    std::size_t top_k = 3;
  } eval;

  std::uint64_t seed = 0;
  std::size_t max_inflight = 8;

  /// Effective key/value set (defaults + file + overrides), used for hashing.
  std::map<std::string, std::string> effective;

  /// Validates keys and values; unknown keys are rejected.
  static RunConfig from(const Config& config);
};

/// Output file names inside paths.output_dir.
namespace artifacts {
inline constexpr const char* kContexts = "contexts.jsonl";
inline constexpr const char* kSynthetic = "synthetic.jsonl";
inline constexpr const char* kNoise = "noise_passages.jsonl";
inline constexpr const char* kReports = "reports.jsonl";
inline constexpr const char* kPairs = "pairs.jsonl";
inline constexpr const char* kCheckpoint = "encoder.bin";
inline constexpr const char* kLossTrace = "loss.csv";
inline constexpr const char* kMetrics = "metrics.json";
inline constexpr const char* kManifest = "manifest.json";
}  // namespace artifacts

/// Each stage reads its inputs, writes its artifacts plus
/// "summary_<stage>.json", and returns the summary.
nlohmann::json cmd_synthesize(const RunConfig& config);
nlohmann::json cmd_attribute(const RunConfig& config);
nlohmann::json cmd_sample(const RunConfig& config);
nlohmann::json cmd_train(const RunConfig& config);
nlohmann::json cmd_eval(const RunConfig& config);
nlohmann::json cmd_e2e(const RunConfig& config);

/// Runs `stage` by name and writes manifest.json for the run.
nlohmann::json run_command(const std::string& stage, const RunConfig& config);

/// 2 missing input, 3 oracle unreachable, 4 validation failure, 1 otherwise.
int exit_code_for(ErrorCode code);

std::shared_ptr<ScorerOracle> make_scorer(const RunConfig& config);
std::shared_ptr<GeneratorOracle> make_generator(const RunConfig& config);

std::string sha256_hex(std::string_view bytes);

}  // namespace scarlet
