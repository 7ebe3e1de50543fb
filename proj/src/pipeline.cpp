#include "scarlet/pipeline.hpp"

#include <cstdio>
#include <set>
#include <sstream>
#include <unordered_map>

#include <openssl/evp.h>
#include <Eigen/Core>

#include "scarlet/evalkit.hpp"
#include "scarlet/hash.hpp"
#include "scarlet/io.hpp"
#include "scarlet/parallel.hpp"
#include "scarlet/synthesis.hpp"

namespace scarlet {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> defaults = {
      {"paths.corpus", ""},
      {"paths.tasks", ""},
      {"paths.seeds", ""},
      {"paths.entity_fixture", ""},
      {"paths.gti", ""},
      {"paths.retrieval_eval", ""},
      {"paths.output_dir", "out"},
      {"oracle.scorer", "mock_overlap"},
      {"oracle.generator", "mock"},
      {"oracle.score_url", ""},
      {"oracle.generate_url", ""},
      {"synthesis.per_entity", "10"},
      {"synthesis.total", "10"},
      {"synthesis.sparql_limit", "20"},
      {"synthesis.temperature", "0.5"},
      {"synthesis.seeds_per_task", "1000"},
      {"synthesis.noise", "true"},
      {"synthesis.sparql_url", ""},
      {"synthesis.search_url", ""},
      {"attribution.n", "64"},
      {"attribution.p", "0.5"},
      {"attribution.lambda", "1.0"},
      {"attribution.penalize_intercept", "true"},
      {"sampling.strategy", "cluster"},
      {"train.learning_rate", "0.05"},
      {"train.epochs", "1"},
      {"train.init_sigma", "0.02"},
      {"train.buckets", "65536"},
      {"train.dim", "64"},
      {"eval.attributor", "perturbation"},
      {"eval.ks", "1,3,5"},
      {"eval.top_k", "3"},
      {"runtime.seed", "0"},
      {"runtime.max_inflight", "8"},
  };
  return defaults;
}

fs::path resolve(const Config& cfg, const std::string& key) {
  auto v = cfg.get(key);
  if (v.empty()) return {};
  fs::path p(v);
  return p.is_absolute() ? p : cfg.base_dir / p;
}

void require(const fs::path& path, const char* what) {
  if (path.empty())
    throw Error(ErrorCode::MissingInput, std::string("no path configured for ") + what);
  if (!fs::exists(path))
    throw Error(ErrorCode::MissingInput, std::string(what) + " not found: " + path.string());
}

fs::path out_path(const RunConfig& c, const char* name) { return c.paths.output_dir / name; }

std::vector<Passage> load_passages(const fs::path& path) {
  return read_jsonl_as<Passage>(path, passage_from_json);
}

/// Corpus plus any synthesized noise passages.
PassageStore load_store(const RunConfig& c) {
  require(c.paths.corpus, "corpus");
  PassageStore store(load_passages(c.paths.corpus));
  auto noise = out_path(c, artifacts::kNoise);
  if (fs::exists(noise))
    for (auto& p : load_passages(noise)) store.add(p);
  return store;
}

std::unordered_map<std::string, TaskSpec> load_tasks(const RunConfig& c,
                                                     std::vector<TaskSpec>* ordered = nullptr) {
  require(c.paths.tasks, "tasks");
  auto tasks = read_jsonl_as<TaskSpec>(c.paths.tasks, task_from_json);
  std::unordered_map<std::string, TaskSpec> by_id;
  for (const auto& t : tasks)
    if (!by_id.emplace(t.task_id, t).second)
      throw Error(ErrorCode::SchemaError, "duplicate task id '" + t.task_id + "'");
  if (ordered) *ordered = tasks;
  return by_id;
}

const TaskSpec& task_for(const std::unordered_map<std::string, TaskSpec>& tasks,
                         const std::string& id) {
  auto it = tasks.find(id);
  if (it == tasks.end()) throw Error(ErrorCode::SchemaError, "unknown task id '" + id + "'");
  return it->second;
}

void write_summary(const RunConfig& c, const std::string& stage, const Json& summary) {
  write_file(out_path(c, ("summary_" + stage + ".json").c_str()), summary.dump(2) + "\n");
}

std::string context_name(std::size_t i) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "ctx-%04zu", i);
  return buf;
}

std::uint64_t instance_seed(std::uint64_t seed, const std::string& key) {
  return mix64(seed ^ fnv1a64(key));
}

}  // namespace

RunConfig RunConfig::from(const Config& config) {
  const auto& defaults = default_values();
  for (const auto& [key, value] : config.values())
    if (!defaults.count(key)) throw Error(ErrorCode::InvalidConfig, "unknown config key '" + key + "'");

  RunConfig c;
  c.effective = defaults;
  for (const auto& [key, value] : config.values()) c.effective[key] = value;

  c.paths.corpus = resolve(config, "paths.corpus");
  c.paths.tasks = resolve(config, "paths.tasks");
  c.paths.seeds = resolve(config, "paths.seeds");
  c.paths.entity_fixture = resolve(config, "paths.entity_fixture");
  c.paths.gti = resolve(config, "paths.gti");
  c.paths.retrieval_eval = resolve(config, "paths.retrieval_eval");
  Config with_default = config;
  if (!config.has("paths.output_dir")) with_default.set("paths.output_dir", "out");
  c.paths.output_dir = resolve(with_default, "paths.output_dir");

  c.oracle.scorer = config.get("oracle.scorer", c.oracle.scorer);
  c.oracle.generator = config.get("oracle.generator", c.oracle.generator);
  c.oracle.score_url = config.get("oracle.score_url");
  c.oracle.generate_url = config.get("oracle.generate_url");
  if (c.oracle.scorer != "mock_overlap" && c.oracle.scorer != "http")
    throw Error(ErrorCode::InvalidConfig, "oracle.scorer must be mock_overlap or http");
  if (c.oracle.generator != "mock" && c.oracle.generator != "http")
    throw Error(ErrorCode::InvalidConfig, "oracle.generator must be mock or http");
  if (c.oracle.scorer == "http" && c.oracle.score_url.empty())
    throw Error(ErrorCode::InvalidConfig, "oracle.score_url is required for the http scorer");
  if (c.oracle.generator == "http" && c.oracle.generate_url.empty())
    throw Error(ErrorCode::InvalidConfig, "oracle.generate_url is required for the http generator");

  c.synthesis.per_entity = config.get_uint("synthesis.per_entity", 10);
  c.synthesis.total = config.get_uint("synthesis.total", 10);
  c.synthesis.sparql_limit = config.get_uint("synthesis.sparql_limit", kDefaultSparqlLimit);
  c.synthesis.temperature = config.get_double("synthesis.temperature", kDefaultTemperature);
  c.synthesis.seeds_per_task = config.get_uint("synthesis.seeds_per_task", 1000);
  c.synthesis.noise = config.get_bool("synthesis.noise", true);
  c.synthesis.sparql_url = config.get("synthesis.sparql_url");
  c.synthesis.search_url = config.get("synthesis.search_url");
  if (c.synthesis.per_entity == 0 || c.synthesis.total == 0 || c.synthesis.sparql_limit == 0)
    throw Error(ErrorCode::InvalidConfig, "synthesis counts must be >= 1");
  if (c.synthesis.temperature < 0) throw Error(ErrorCode::InvalidConfig, "temperature must be >= 0");

  c.seed = config.get_uint("runtime.seed", 0);
  c.max_inflight = config.get_uint("runtime.max_inflight", 8);
  if (c.max_inflight == 0) throw Error(ErrorCode::InvalidConfig, "runtime.max_inflight must be >= 1");

  c.attribution.n = config.get_uint("attribution.n", 64);
  c.attribution.p = config.get_double("attribution.p", 0.5);
  c.attribution.lambda = config.get_double("attribution.lambda", 1.0);
  c.attribution.penalize_intercept = config.get_bool("attribution.penalize_intercept", true);
  c.attribution.seed = c.seed;
  validate(c.attribution);

  c.strategy = sampling_strategy_from_string(config.get("sampling.strategy", "cluster"));

  c.train.learning_rate = config.get_double("train.learning_rate", 0.05);
  c.train.epochs = config.get_uint("train.epochs", 1);
  c.train.init_sigma = config.get_double("train.init_sigma", 0.02);
  c.train.seed = c.seed;
  validate(c.train);
  c.buckets = config.get_uint("train.buckets", ToyEncoder::kDefaultBuckets);
  c.dim = config.get_uint("train.dim", ToyEncoder::kDefaultDim);
  if (c.buckets == 0 || c.dim == 0)
    throw Error(ErrorCode::InvalidConfig, "train.buckets and train.dim must be >= 1");

  c.eval.attributor = config.get("eval.attributor", "perturbation");
  if (c.eval.attributor != "perturbation" && c.eval.attributor != "llm_rank")
    throw Error(ErrorCode::InvalidConfig, "eval.attributor must be perturbation or llm_rank");
  c.eval.ks = config.get_list("eval.ks", {1, 3, 5});
  c.eval.top_k = config.get_uint("eval.top_k", 3);
  for (auto k : c.eval.ks)
    if (k == 0) throw Error(ErrorCode::InvalidConfig, "eval.ks entries must be >= 1");
  if (c.eval.top_k == 0) throw Error(ErrorCode::InvalidConfig, "eval.top_k must be >= 1");
  return c;
}

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::MissingInput: return 2;
    case ErrorCode::OracleUnavailable: return 3;
    case ErrorCode::InvalidInput:
    case ErrorCode::InvalidConfig:
    case ErrorCode::SchemaError:
    case ErrorCode::DimensionMismatch:
    case ErrorCode::InvalidGain: return 4;
    default: return 1;
  }
}

std::shared_ptr<ScorerOracle> make_scorer(const RunConfig& c) {
  if (c.oracle.scorer == "http") return std::make_shared<HttpScorer>(c.oracle.score_url);
  return std::make_shared<OverlapScorer>();
}

std::shared_ptr<GeneratorOracle> make_generator(const RunConfig& c) {
  if (c.oracle.generator == "http") return std::make_shared<HttpGenerator>(c.oracle.generate_url);
  return std::make_shared<MockGenerator>(c.seed);
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw Error(ErrorCode::InvalidInput, "sha256 failed");
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// synthesize

namespace {

struct SeedOutcome {
  bool no_entities = false;
  bool empty_context = false;
  std::vector<SharedContext> contexts;
  std::vector<SyntheticExample> examples;
  std::vector<Passage> noise;
  std::size_t parse_errors = 0, kept = 0, rejected = 0, filter_warnings = 0, filter_errors = 0;
  std::size_t noise_inserted = 0, noise_failures = 0;
  Diagnostics diag;
};

std::vector<Entity> seed_entities(const SeedExample& seed) {
  auto entities = extract_entities(seed.input);
  for (auto& e : extract_entities(seed.ground_truth))
    if (std::none_of(entities.begin(), entities.end(),
                     [&](const Entity& x) { return x.surface == e.surface; }))
      entities.push_back(std::move(e));
  return entities;
}

}  // namespace

Json cmd_synthesize(const RunConfig& c) {
  require(c.paths.corpus, "corpus");
  require(c.paths.seeds, "seeds");
  std::vector<TaskSpec> tasks;
  load_tasks(c, &tasks);
  auto corpus = load_passages(c.paths.corpus);
  auto seeds = read_jsonl_as<SeedExample>(c.paths.seeds, seed_from_json);

  std::unique_ptr<EntityGraphClient> graph;
  if (!c.synthesis.sparql_url.empty()) {
    graph = std::make_unique<SparqlGraphClient>(c.synthesis.sparql_url, c.synthesis.search_url);
  } else {
    require(c.paths.entity_fixture, "entity fixture");
    graph = std::make_unique<FixtureGraphClient>(
        FixtureGraphClient::from_json_file(c.paths.entity_fixture.string()));
  }
  const Bm25Index index(corpus);
  const auto generator = make_generator(c);
  const auto chosen = sample_seed_indices(seeds, c.synthesis.seeds_per_task, c.seed);

  std::vector<SeedOutcome> outcomes(chosen.size());
  parallel_for_index(chosen.size(), c.max_inflight, [&](std::size_t i) {
    const SeedExample& seed = seeds[chosen[i]];
    SeedOutcome& out = outcomes[i];
    auto entities = seed_entities(seed);
    if (entities.empty()) {
      out.no_entities = true;
      return;
    }
    auto expanded = expand_entities(entities, c.synthesis.sparql_limit, *graph, &out.diag);
    SharedContext base;
    try {
      base = retrieve_passages(expanded, index, c.synthesis.per_entity, c.synthesis.total,
                               context_name(i), seed.task_id + ":" + std::to_string(chosen[i]));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::EmptyContext) throw;
      out.empty_context = true;
      return;
    }
    out.contexts.push_back(base);
    for (const auto& task : tasks) {
      SyntheticExample ex;
      try {
        ex = synthesize(base, task, *generator, c.synthesis.temperature);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::SynthesisParseError) throw;
        ++out.parse_errors;
        out.diag.warn(base.context_id + "/" + task.task_id + ": " + e.message());
        continue;
      }
      auto verdict = filter_example(ex, base, task, *generator, c.synthesis.temperature);
      ex.filter_verdict = verdict.verdict;
      if (verdict.warning) {
        ++out.filter_warnings;
        out.diag.warn(base.context_id + "/" + task.task_id + ": unparseable filter verdict");
      }
      if (verdict.error) ++out.filter_errors;
      if (ex.filter_verdict != FilterVerdict::kept) {
        ++out.rejected;
        out.examples.push_back(std::move(ex));
        continue;
      }
      ++out.kept;
      if (c.synthesis.noise) {
        SharedContext own = base;
        own.context_id = base.context_id + "/" + task.task_id;
        auto noisy = inject_noise(own, ex, *generator, c.seed, c.synthesis.temperature, &out.diag);
        if (noisy.inserted) {
          ++out.noise_inserted;
          out.noise.push_back(noisy.context.passages[noisy.position]);
          ex.context_id = noisy.context.context_id;
          out.contexts.push_back(std::move(noisy.context));
        } else {
          ++out.noise_failures;
        }
      }
      out.examples.push_back(std::move(ex));
    }
  });

  std::vector<Json> contexts, synthetic, noise;
  Json summary = {{"seeds", seeds.size()}, {"sampled", chosen.size()}};
  std::size_t no_entities = 0, empty = 0, parse_errors = 0, kept = 0, rejected = 0;
  std::size_t filter_warnings = 0, filter_errors = 0, noise_inserted = 0, noise_failures = 0;
  Json warnings = Json::array();
  for (const auto& o : outcomes) {
    no_entities += o.no_entities;
    empty += o.empty_context;
    parse_errors += o.parse_errors;
    kept += o.kept;
    rejected += o.rejected;
    filter_warnings += o.filter_warnings;
    filter_errors += o.filter_errors;
    noise_inserted += o.noise_inserted;
    noise_failures += o.noise_failures;
    for (const auto& ctx : o.contexts) contexts.push_back(to_json(ctx));
    for (const auto& ex : o.examples) synthetic.push_back(to_json(ex));
    for (const auto& p : o.noise) noise.push_back(to_json(p));
    for (auto& w : o.diag.warnings()) warnings.push_back(w);
  }
  write_jsonl(out_path(c, artifacts::kContexts), contexts);
  write_jsonl(out_path(c, artifacts::kSynthetic), synthetic);
  write_jsonl(out_path(c, artifacts::kNoise), noise);
  summary["discarded_no_entities"] = no_entities;
  summary["empty_context"] = empty;
  summary["contexts"] = contexts.size();
  summary["examples"] = synthetic.size();
  summary["parse_errors"] = parse_errors;
  summary["kept"] = kept;
  summary["rejected"] = rejected;
  summary["filter_warnings"] = filter_warnings;
  summary["filter_errors"] = filter_errors;
  summary["noise_inserted"] = noise_inserted;
  summary["noise_failures"] = noise_failures;
  summary["warnings"] = warnings;
  write_summary(c, "synthesize", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// attribute

namespace {

std::unordered_map<std::string, SharedContext> load_contexts(const RunConfig& c,
                                                             const PassageStore& store) {
  auto path = out_path(c, artifacts::kContexts);
  require(path, "contexts.jsonl");
  std::unordered_map<std::string, SharedContext> out;
  for (auto& ctx : read_jsonl_as<SharedContext>(
           path, [&](const Json& j) { return context_from_json(j, store); })) {
    auto id = ctx.context_id;
    if (!out.emplace(id, std::move(ctx)).second)
      throw Error(ErrorCode::SchemaError, "duplicate context id '" + id + "'");
  }
  return out;
}

std::vector<SyntheticExample> load_kept(const RunConfig& c) {
  auto path = out_path(c, artifacts::kSynthetic);
  require(path, "synthetic.jsonl");
  std::vector<SyntheticExample> kept;
  for (auto& ex : read_jsonl_as<SyntheticExample>(path, synthetic_from_json))
    if (ex.filter_verdict == FilterVerdict::kept) kept.push_back(std::move(ex));
  return kept;
}

}  // namespace

Json cmd_attribute(const RunConfig& c) {
  require(out_path(c, artifacts::kContexts), "contexts.jsonl");
  require(out_path(c, artifacts::kSynthetic), "synthetic.jsonl");
  const auto tasks = load_tasks(c);
  const auto store = load_store(c);
  const auto contexts = load_contexts(c, store);
  const auto kept = load_kept(c);
  const auto scorer = make_scorer(c);

  std::vector<Json> reports;
  std::size_t failures = 0;
  Json warnings = Json::array();
  for (const auto& ex : kept) {
    auto it = contexts.find(ex.context_id);
    if (it == contexts.end())
      throw Error(ErrorCode::SchemaError, "example references unknown context '" + ex.context_id + "'");
    const auto& task = task_for(tasks, ex.task_id);
    auto target = make_target(make_generator_query(task, ex.input), ex.ground_truth);
    AttributionConfig cfg = c.attribution;
    cfg.seed = instance_seed(c.seed, ex.context_id);
    try {
      reports.push_back(to_json(attribute(it->second, target, cfg, *scorer, c.max_inflight)));
    } catch (const Error& e) {
      if (e.code() == ErrorCode::OracleUnavailable) throw;
      ++failures;
      warnings.push_back(ex.context_id + ": " + std::string(to_string(e.code())) + " (" +
                         e.context() + "): " + e.message());
    }
  }
  write_jsonl(out_path(c, artifacts::kReports), reports);
  Json summary = {{"instances", kept.size()},
                  {"reports", reports.size()},
                  {"failures", failures},
                  {"warnings", warnings}};
  write_summary(c, "attribute", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// sample

Json cmd_sample(const RunConfig& c) {
  auto reports_path = out_path(c, artifacts::kReports);
  require(reports_path, "reports.jsonl");
  require(out_path(c, artifacts::kContexts), "contexts.jsonl");
  require(out_path(c, artifacts::kSynthetic), "synthetic.jsonl");
  const auto tasks = load_tasks(c);
  const auto store = load_store(c);
  const auto contexts = load_contexts(c, store);
  const auto kept = load_kept(c);
  std::unordered_map<std::string, UtilityReport> reports;
  for (auto& r : read_jsonl_as<UtilityReport>(reports_path, report_from_json)) {
    auto id = r.context_id;
    reports.emplace(id, std::move(r));
  }

  std::vector<SampledInstance> instances;
  std::size_t missing_reports = 0, all_equal = 0;
  for (const auto& ex : kept) {
    auto rit = reports.find(ex.context_id);
    if (rit == reports.end()) {
      ++missing_reports;
      continue;
    }
    auto cit = contexts.find(ex.context_id);
    if (cit == contexts.end())
      throw Error(ErrorCode::SchemaError, "report for unknown context '" + ex.context_id + "'");
    auto query = make_query(task_for(tasks, ex.task_id), ex.input, QueryMode::instructed);
    auto sel = select_pairs(rit->second, cit->second, c.strategy, std::move(query));
    all_equal += sel.all_equal;
    instances.push_back({ex, std::move(sel.pairs), sel.fallback});
  }
  std::ostringstream out;
  auto emitted = emit_training_pairs(instances, out);
  write_file(out_path(c, artifacts::kPairs), out.str());
  Json summary = {{"instances", emitted.instances},
                  {"emitted", emitted.emitted},
                  {"skipped", emitted.skipped},
                  {"fallbacks", emitted.fallbacks},
                  {"all_equal", all_equal},
                  {"missing_reports", missing_reports},
                  {"strategy", to_string(c.strategy)}};
  write_summary(c, "sample", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// train

namespace {

ToyEncoder initial_encoder(const RunConfig& c) {
  return ToyEncoder::random(c.buckets, c.dim, c.seed, c.train.init_sigma);
}

}  // namespace

Json cmd_train(const RunConfig& c) {
  auto pairs_path = out_path(c, artifacts::kPairs);
  require(pairs_path, "pairs.jsonl");
  const auto store = load_store(c);
  auto data = read_jsonl_as<TrainingPairSet>(
      pairs_path, [&](const Json& j) { return pairs_from_json(j, store); });
  auto result = train(initial_encoder(c), std::span<const TrainingPairSet>(data), c.train);
  write_file(out_path(c, artifacts::kCheckpoint), serialize_checkpoint(result.encoder));
  write_file(out_path(c, artifacts::kLossTrace), loss_trace_csv(result));
  Json summary = {{"instances", data.size()},
                  {"epochs", c.train.epochs},
                  {"initial_loss", result.initial_loss},
                  {"epoch_losses", result.epoch_losses}};
  write_summary(c, "train", summary);
  return summary;
}

// ---------------------------------------------------------------------------
// eval

Json cmd_eval(const RunConfig& c) {
  if (c.paths.gti.empty() && c.paths.retrieval_eval.empty())
    throw Error(ErrorCode::MissingInput, "eval needs paths.gti and/or paths.retrieval_eval");
  Json metrics = Json::object();

  if (!c.paths.gti.empty()) {
    require(c.paths.gti, "GTI benchmark");
    auto instances = read_jsonl_as<GtiInstance>(c.paths.gti, [](const Json& j) {
      auto inst = ranking_instance_from_json(j);
      validate_gti(inst);
      return inst;
    });
    std::shared_ptr<ScorerOracle> scorer;
    std::shared_ptr<GeneratorOracle> generator;
    Attributor attributor;
    if (c.eval.attributor == "llm_rank") {
      generator = make_generator(c);
      attributor = llm_rank_attributor(*generator);
    } else {
      scorer = make_scorer(c);
      attributor = perturbation_attributor(*scorer, c.attribution, c.max_inflight);
    }
    auto result = run_gti_benchmark(instances, attributor, c.eval.ks);
    Json rows = Json::array();
    for (auto [k, v] : result.mean_ndcg)
      rows.push_back({{"attributor", c.eval.attributor},
                      {"k", k},
                      {"mean_ndcg", v},
                      {"failures", result.failures}});
    metrics["gti"] = {{"instances", result.instances}, {"results", rows}};
  }

  if (!c.paths.retrieval_eval.empty()) {
    require(c.paths.retrieval_eval, "retrieval eval set");
    auto ckpt = out_path(c, artifacts::kCheckpoint);
    require(ckpt, "encoder checkpoint");
    auto eval_set =
        read_jsonl_as<RankingInstance>(c.paths.retrieval_eval, ranking_instance_from_json);
    const auto trained = deserialize_checkpoint<double>(read_file(ckpt));
    // The baseline goes through the same float32 round trip as the checkpoint.
    const auto baseline =
        deserialize_checkpoint<double>(serialize_checkpoint(initial_encoder(c)));
    auto before = run_retrieval_eval(baseline, eval_set, c.eval.top_k);
    auto after = run_retrieval_eval(trained, eval_set, c.eval.top_k);
    metrics["retrieval"] = {{"k", c.eval.top_k},
                            {"baseline_ndcg", before.mean_ndcg},
                            {"trained_ndcg", after.mean_ndcg},
                            {"improvement", after.mean_ndcg - before.mean_ndcg},
                            {"evaluated", after.evaluated},
                            {"skipped", after.skipped}};
  }
  write_file(out_path(c, artifacts::kMetrics), metrics.dump(2) + "\n");
  return metrics;
}

Json cmd_e2e(const RunConfig& c) {
  Json summary;
  summary["synthesize"] = cmd_synthesize(c);
  summary["attribute"] = cmd_attribute(c);
  summary["sample"] = cmd_sample(c);
  summary["train"] = cmd_train(c);
  summary["eval"] = cmd_eval(c);
  return summary;
}

// ---------------------------------------------------------------------------
// manifest

namespace {

Json input_digests(const RunConfig& c) {
  Json digests = Json::object();
  auto add = [&](const char* name, const fs::path& p) {
    if (!p.empty() && fs::exists(p)) digests[name] = sha256_hex(read_file(p));
  };
  add("corpus", c.paths.corpus);
  add("tasks", c.paths.tasks);
  add("seeds", c.paths.seeds);
  add("entity_fixture", c.paths.entity_fixture);
  add("gti", c.paths.gti);
  add("retrieval_eval", c.paths.retrieval_eval);
  return digests;
}

std::string config_hash(const RunConfig& c) {
  std::string canonical;
  for (const auto& [k, v] : c.effective) canonical += k + "=" + v + "\n";
  return sha256_hex(canonical);
}

}  // namespace

Json run_command(const std::string& stage, const RunConfig& c) {
  Json manifest = {{"command", stage},
                   {"config_hash", config_hash(c)},
                   {"inputs", input_digests(c)},
                   {"seed", c.seed},
                   {"versions",
                    {{"scarlet", kVersion},
                     {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." +
                                   std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                   std::to_string(EIGEN_MINOR_VERSION)},
                     {"nlohmann_json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
  Json summary;
  if (stage == "synthesize") summary = cmd_synthesize(c);
  else if (stage == "attribute") summary = cmd_attribute(c);
  else if (stage == "sample") summary = cmd_sample(c);
  else if (stage == "train") summary = cmd_train(c);
  else if (stage == "eval") summary = cmd_eval(c);
  else if (stage == "e2e") summary = cmd_e2e(c);
  else throw Error(ErrorCode::InvalidConfig, "unknown command '" + stage + "'");
  write_file(out_path(c, artifacts::kManifest), manifest.dump(2) + "\n");
  return summary;
}

}  // namespace scarlet
