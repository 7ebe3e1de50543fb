#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "scarlet/attribution.hpp"
#include "scarlet/core.hpp"

namespace scarlet {

using Json = nlohmann::json;

/// Passages by id; lookups of unknown ids raise SchemaError.
class PassageStore {
 public:
  PassageStore() = default;
  explicit PassageStore(const std::vector<Passage>& passages) {
    for (const auto& p : passages) add(p);
  }

  void add(const Passage& p);
  const Passage& at(const std::string& id) const;
  bool contains(const std::string& id) const { return by_id_.count(id) > 0; }
  std::size_t size() const { return by_id_.size(); }

 private:
  std::unordered_map<std::string, Passage> by_id_;
};

Json to_json(const Passage& p);
Passage passage_from_json(const Json& j);

Json to_json(const TaskSpec& t);
TaskSpec task_from_json(const Json& j);

Json to_json(const SeedExample& s);
SeedExample seed_from_json(const Json& j);

/// {context_id, seed_ref, passage_ids}
Json to_json(const SharedContext& c);
SharedContext context_from_json(const Json& j, const PassageStore& store);

Json to_json(const SyntheticExample& s);
SyntheticExample synthetic_from_json(const Json& j);

/// {query, positives: [id], negatives: [id]} plus query_input and, when
/// present, query_instruction so the QueryText round-trips exactly.
Json pairs_to_json(const TrainingPairSet& p);
TrainingPairSet pairs_from_json(const Json& j, const PassageStore& store);

Json to_json(const AttributionConfig& c);
AttributionConfig attribution_config_from_json(const Json& j);

/// {context_id, intercept, scores, config, observations: [{bits, z}]}
Json to_json(const UtilityReport& r);
UtilityReport report_from_json(const Json& j);

/// One parsed object per non-blank line. Missing file raises MissingInput;
/// a bad line raises SchemaError naming the line number.
std::vector<Json> read_jsonl(const std::filesystem::path& path);
void write_jsonl(const std::filesystem::path& path, const std::vector<Json>& rows);

template <typename T, typename Parse>
std::vector<T> read_jsonl_as(const std::filesystem::path& path, Parse parse) {
  std::vector<T> out;
  auto rows = read_jsonl(path);
  out.reserve(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    try {
      out.push_back(parse(rows[i]));
    } catch (const Error& e) {
      throw e.with_context(path.filename().string() + ":" + std::to_string(i + 1));
    } catch (const Json::exception& e) {
      throw Error(ErrorCode::SchemaError, e.what())
          .with_context(path.filename().string() + ":" + std::to_string(i + 1));
    }
  }
  return out;
}

std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& contents);

}  // namespace scarlet
