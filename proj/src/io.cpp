#include "scarlet/io.hpp"

#include <fstream>
#include <sstream>

namespace scarlet {

void PassageStore::add(const Passage& p) {
  if (!by_id_.emplace(p.id, p).second)
    throw Error(ErrorCode::SchemaError, "duplicate passage id '" + p.id + "'");
}

const Passage& PassageStore::at(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) throw Error(ErrorCode::SchemaError, "unknown passage id '" + id + "'");
  return it->second;
}

namespace {

std::string str(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_string())
    throw Error(ErrorCode::SchemaError, std::string("missing string field '") + key + "'");
  return it->get<std::string>();
}

const Json& arr(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_array())
    throw Error(ErrorCode::SchemaError, std::string("missing array field '") + key + "'");
  return *it;
}

double num(const Json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number())
    throw Error(ErrorCode::SchemaError, std::string("missing numeric field '") + key + "'");
  return it->get<double>();
}

}  // namespace

Json to_json(const Passage& p) {
  return {{"id", p.id}, {"text", p.text}, {"source", to_string(p.source)}};
}

Passage passage_from_json(const Json& j) {
  PassageSource source = PassageSource::corpus;
  if (j.contains("source")) source = passage_source_from_string(str(j, "source"));
  return make_passage(str(j, "id"), str(j, "text"), source);
}

Json to_json(const TaskSpec& t) {
  return {{"task_id", t.task_id},
          {"task_instruction", t.task_instruction},
          {"retrieval_instruction", t.retrieval_instruction},
          {"example_input", t.example_input},
          {"example_output", t.example_output}};
}

TaskSpec task_from_json(const Json& j) {
  TaskSpec t{str(j, "task_id"), str(j, "task_instruction"), str(j, "retrieval_instruction"),
             str(j, "example_input"), str(j, "example_output")};
  validate(t);
  return t;
}

Json to_json(const SeedExample& s) {
  return {{"task_id", s.task_id}, {"input", s.input}, {"ground_truth", s.ground_truth}};
}

SeedExample seed_from_json(const Json& j) {
  return {str(j, "task_id"), str(j, "input"), str(j, "ground_truth")};
}

Json to_json(const SharedContext& c) {
  Json ids = Json::array();
  for (const auto& p : c.passages) ids.push_back(p.id);
  return {{"context_id", c.context_id}, {"seed_ref", c.seed_ref}, {"passage_ids", ids}};
}

SharedContext context_from_json(const Json& j, const PassageStore& store) {
  SharedContext c;
  c.context_id = str(j, "context_id");
  c.seed_ref = str(j, "seed_ref");
  for (const auto& id : arr(j, "passage_ids")) c.passages.push_back(store.at(id.get<std::string>()));
  validate(c);
  return c;
}

Json to_json(const SyntheticExample& s) {
  return {{"task_id", s.task_id},
          {"input", s.input},
          {"ground_truth", s.ground_truth},
          {"context_id", s.context_id},
          {"filter_verdict", to_string(s.filter_verdict)}};
}

SyntheticExample synthetic_from_json(const Json& j) {
  SyntheticExample s{str(j, "task_id"), str(j, "input"), str(j, "ground_truth"),
                     str(j, "context_id"), filter_verdict_from_string(str(j, "filter_verdict"))};
  if (s.filter_verdict == FilterVerdict::kept && (s.input.empty() || s.ground_truth.empty()))
    throw Error(ErrorCode::SchemaError, "kept example with empty input or ground truth");
  return s;
}

Json pairs_to_json(const TrainingPairSet& p) {
  Json pos = Json::array(), neg = Json::array();
  for (const auto& d : p.positives) pos.push_back(d.id);
  for (const auto& d : p.negatives) neg.push_back(d.id);
  Json j = {{"query", p.query.rendered},
            {"query_input", p.query.input},
            {"positives", pos},
            {"negatives", neg}};
  if (p.query.instruction) j["query_instruction"] = *p.query.instruction;
  return j;
}

TrainingPairSet pairs_from_json(const Json& j, const PassageStore& store) {
  TrainingPairSet p;
  p.query.rendered = str(j, "query");
  p.query.input = j.contains("query_input") ? str(j, "query_input") : p.query.rendered;
  if (j.contains("query_instruction")) p.query.instruction = str(j, "query_instruction");
  for (const auto& id : arr(j, "positives")) p.positives.push_back(store.at(id.get<std::string>()));
  for (const auto& id : arr(j, "negatives")) p.negatives.push_back(store.at(id.get<std::string>()));
  validate(p);
  return p;
}

Json to_json(const AttributionConfig& c) {
  return {{"n", c.n},
          {"p", c.p},
          {"lambda", c.lambda},
          {"penalize_intercept", c.penalize_intercept},
          {"seed", c.seed}};
}

AttributionConfig attribution_config_from_json(const Json& j) {
  AttributionConfig c;
  c.n = j.at("n").get<std::size_t>();
  c.p = num(j, "p");
  c.lambda = num(j, "lambda");
  c.penalize_intercept = j.at("penalize_intercept").get<bool>();
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

Json to_json(const UtilityReport& r) {
  Json obs = Json::array();
  for (const auto& o : r.observations) obs.push_back({{"bits", o.vector.bits}, {"z", o.z}});
  return {{"context_id", r.context_id},
          {"intercept", r.intercept},
          {"scores", r.scores},
          {"config", to_json(r.config)},
          {"observations", obs}};
}

UtilityReport report_from_json(const Json& j) {
  UtilityReport r;
  r.context_id = str(j, "context_id");
  r.intercept = num(j, "intercept");
  r.scores = arr(j, "scores").get<std::vector<double>>();
  r.config = attribution_config_from_json(j.at("config"));
  for (const auto& o : arr(j, "observations"))
    r.observations.push_back({PerturbationVector{o.at("bits").get<std::vector<int>>()}, num(o, "z")});
  return r;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingInput, "cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::InvalidConfig, "cannot write '" + path.string() + "'");
  out << contents;
}

std::vector<Json> read_jsonl(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<Json> rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object())
      throw Error(ErrorCode::SchemaError,
                  path.filename().string() + ":" + std::to_string(lineno) + " is not a JSON object");
    rows.push_back(std::move(j));
  }
  return rows;
}

void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out.push_back('\n');
  }
  write_file(path, out);
}

}  // namespace scarlet
