#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "scarlet/core.hpp"
#include "scarlet/oracles.hpp"

namespace scarlet {

/// Thread-safe sink for non-fatal warnings raised while processing a batch.
class Diagnostics {
 public:
  void warn(std::string message) {
    std::lock_guard lock(mu_);
    warnings_.push_back(std::move(message));
  }
  std::vector<std::string> warnings() const {
    std::lock_guard lock(mu_);
    return warnings_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<std::string> warnings_;
};

// ---------------------------------------------------------------------------
// Entities

enum class EntityOrigin { seed, expanded };

struct Entity {
  std::string surface;
  EntityOrigin origin = EntityOrigin::seed;

  bool operator==(const Entity&) const = default;
};

using EntityExtractor = std::function<std::vector<Entity>(std::string_view)>;

/// Maximal runs of title-case words; bracketed markup such as "[SEP]" is
/// skipped. A run of one word that opens a sentence
/// and is a common function word ("The", "In", ...) is dropped. Runs break at
/// words ending in sentence or clause punctuation. Duplicates keep the first
/// occurrence.
std::vector<Entity> extract_entities(std::string_view text);

/// Source of one-hop neighbours for entity expansion.
class EntityGraphClient {
 public:
  virtual ~EntityGraphClient() = default;
  /// Knowledge-graph id for a surface form, if one can be found.
  virtual std::optional<std::string> resolve(const std::string& surface) const = 0;
  /// Labels of entities directly linked to `id`, at most `limit` of them.
  virtual std::vector<std::string> neighbors(const std::string& id, std::size_t limit) const = 0;
};

/// Offline client over {surface -> [neighbour surfaces]}; ids are surfaces.
class FixtureGraphClient final : public EntityGraphClient {
 public:
  explicit FixtureGraphClient(std::map<std::string, std::vector<std::string>> graph)
      : graph_(std::move(graph)) {}
  static FixtureGraphClient from_json_file(const std::string& path);

  std::optional<std::string> resolve(const std::string& surface) const override;
  std::vector<std::string> neighbors(const std::string& id, std::size_t limit) const override;

 private:
  std::map<std::string, std::vector<std::string>> graph_;
};

/// One-hop neighbour query against a Wikidata-style SPARQL endpoint.
std::string render_neighbor_query(std::string_view entity_id, std::size_t limit);

/// Live client: label search (top-1 hit) for resolution, SPARQL for
/// neighbours. Both endpoints are queried with GET and JSON responses.
class SparqlGraphClient final : public EntityGraphClient {
 public:
  SparqlGraphClient(std::string sparql_url, std::string search_url,
                    HttpOptions options = HttpOptions::from_env())
      : sparql_url_(std::move(sparql_url)),
        search_url_(std::move(search_url)),
        options_(std::move(options)) {}

  std::optional<std::string> resolve(const std::string& surface) const override;
  std::vector<std::string> neighbors(const std::string& id, std::size_t limit) const override;

 private:
  std::string sparql_url_;
  std::string search_url_;
  HttpOptions options_;
};

inline constexpr std::size_t kDefaultSparqlLimit = 20;

/// Adds one-hop neighbours of every input entity. Inputs are always kept and
/// come first; neighbours follow in discovery order, deduplicated by surface.
/// Entities that fail to resolve contribute nothing and are noted in `diag`.
std::vector<Entity> expand_entities(std::span<const Entity> entities, std::size_t limit,
                                    const EntityGraphClient& client,
                                    Diagnostics* diag = nullptr);

// ---------------------------------------------------------------------------
// BM25

struct ScoredPassage {
  std::size_t index = 0;  // position in the index
  double score = 0.0;
};

/// In-memory BM25 index over normalized tokens. Immutable once built.
class Bm25Index {
 public:
  explicit Bm25Index(std::vector<Passage> passages, double k1 = 1.2, double b = 0.75);

  std::size_t size() const { return passages_.size(); }
  const Passage& passage(std::size_t i) const { return passages_[i]; }
  std::optional<std::size_t> find(const std::string& id) const;

  double k1() const { return k1_; }
  double b() const { return b_; }
  double average_length() const { return avgdl_; }
  std::size_t document_frequency(const std::string& term) const;

  /// Sum over distinct query terms of idf * tf(k1+1) / (tf + k1(1 - b + b|d|/avgdl))
  /// with idf = ln((N - df + 0.5)/(df + 0.5) + 1).
  double score(std::span<const std::string> query_terms, std::size_t doc) const;

  /// Documents with positive score, best first; ties by ascending passage id.
  std::vector<ScoredPassage> top(std::span<const std::string> query_terms, std::size_t limit) const;

 private:
  std::vector<Passage> passages_;
  std::unordered_map<std::string, std::size_t> by_id_;
  std::vector<std::size_t> lengths_;
  std::unordered_map<std::string, std::vector<std::pair<std::size_t, std::size_t>>> postings_;
  double k1_;
  double b_;
  double avgdl_ = 0.0;
};

/// BM25 score of an indexed passage. Throws InvalidInput if the passage is
/// not in the index.
double bm25_score(std::span<const std::string> query_terms, const Passage& passage,
                  const Bm25Index& index);

/// Pools each entity's top `per_entity` hits, ranks the pool by the best
/// score any entity gave a passage (ties by passage id) and keeps `total`.
SharedContext retrieve_passages(std::span<const Entity> entities, const Bm25Index& index,
                                std::size_t per_entity = 10, std::size_t total = 10,
                                std::string context_id = {}, std::string seed_ref = {});

// ---------------------------------------------------------------------------
// Synthesis, filtering, noise

SyntheticExample synthesize(const SharedContext& context, const TaskSpec& task,
                            const GeneratorOracle& oracle,
                            double temperature = kDefaultTemperature);

struct FilterOutcome {
  FilterVerdict verdict = FilterVerdict::rejected;
  bool warning = false;  // reply had no recognizable verdict
  bool error = false;    // oracle call failed
};

FilterOutcome filter_example(const SyntheticExample& example, const SharedContext& context,
                             const TaskSpec& task, const GeneratorOracle& oracle,
                             double temperature = kDefaultTemperature);

struct NoiseOutcome {
  SharedContext context;
  bool inserted = false;
  std::size_t position = 0;
};

/// Inserts one generated distractor passage (source synthetic_noise, id
/// "<context_id>#noise") at a position drawn uniformly from [0, k] by a
/// generator seeded with (seed, context_id). On parse failure the context
/// comes back unchanged and a warning is recorded.
NoiseOutcome inject_noise(const SharedContext& context, const SyntheticExample& example,
                          const GeneratorOracle& oracle, std::uint64_t seed,
                          double temperature = kDefaultTemperature,
                          Diagnostics* diag = nullptr);

/// Per task id, keep up to `per_task` seeds drawn without replacement by a
/// generator seeded with `seed` (the same seed for every task). Survivors
/// keep their input order.
std::vector<SeedExample> sample_seeds(std::span<const SeedExample> seeds, std::size_t per_task,
                                      std::uint64_t seed);

/// Positions in `seeds` chosen by sample_seeds, ascending.
std::vector<std::size_t> sample_seed_indices(std::span<const SeedExample> seeds,
                                             std::size_t per_task, std::uint64_t seed);

}  // namespace scarlet
