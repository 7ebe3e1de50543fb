#include "scarlet/synthesis.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <unordered_set>

#include "scarlet/hash.hpp"
#include "scarlet/io.hpp"
#include "scarlet/prompts.hpp"

namespace scarlet {

// ---------------------------------------------------------------------------
// Entities

namespace {

const std::unordered_set<std::string_view>& sentence_stopwords() {
  static const std::unordered_set<std::string_view> words = {
      "A",     "An",    "The",    "In",    "On",    "At",    "It",    "This",   "That",
      "These", "Those", "He",     "She",   "They",  "We",    "I",     "You",    "His",
      "Her",   "Its",   "Their",  "Our",   "My",    "Your",  "And",   "But",    "Or",
      "If",    "When",  "While",  "After", "Before", "As",   "Of",    "For",    "To",
      "From",  "By",    "With",   "There", "Here",  "What",  "Which", "Who",    "Whom",
      "Whose", "Where", "Why",    "How",   "Is",    "Was",   "Are",   "Were",   "Be",
      "Not",   "No",    "Yes",    "Some",  "Many",  "Most",  "All",   "Each",   "Every",
      "Both",  "Also",  "However", "Then", "Thus",  "So",    "Did",   "Does",   "Do",
      "Can",   "Could", "Would",  "Should", "Will", "Retrieve", "Verify", "Answer"};
  return words;
}

bool ends_sentence(std::string_view w) {
  while (!w.empty() && (w.back() == '"' || w.back() == '\'' || w.back() == ')')) w.remove_suffix(1);
  return !w.empty() && (w.back() == '.' || w.back() == '!' || w.back() == '?');
}

bool ends_clause(std::string_view w) {
  return !w.empty() && (w.back() == ',' || w.back() == ';' || w.back() == ':' || ends_sentence(w));
}

std::string strip_edges(std::string_view w) {
  std::size_t b = 0, e = w.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(w[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(w[e - 1]))) --e;
  return std::string(w.substr(b, e - b));
}

bool is_title_case(const std::string& core) {
  return !core.empty() && std::isupper(static_cast<unsigned char>(core[0]));
}

}  // namespace

std::vector<Entity> extract_entities(std::string_view text) {
  auto words = split_words(text);
  std::vector<Entity> out;
  std::unordered_set<std::string> seen;
  std::vector<std::string> run;
  bool run_starts_sentence = false;

  auto flush = [&] {
    if (run.empty()) return;
    bool drop = run.size() == 1 && run_starts_sentence && sentence_stopwords().count(run[0]);
    if (!drop) {
      auto surface = join(run, " ");
      if (seen.insert(surface).second) out.push_back({surface, EntityOrigin::seed});
    }
    run.clear();
  };

  bool sentence_start = true;
  for (auto w : words) {
    auto core = strip_edges(w);
    // Bracketed tokens such as "[SEP]" are markup, never names.
    if (w.front() == '[') {
      flush();
      sentence_start = false;
      continue;
    }
    if (is_title_case(core)) {
      if (run.empty()) run_starts_sentence = sentence_start;
      run.push_back(core);
      if (ends_clause(w)) flush();
    } else {
      flush();
    }
    sentence_start = ends_sentence(w);
  }
  flush();
  return out;
}

FixtureGraphClient FixtureGraphClient::from_json_file(const std::string& path) {
  Json j = Json::parse(read_file(path), nullptr, false);
  if (j.is_discarded() || !j.is_object())
    throw Error(ErrorCode::SchemaError, "entity fixture '" + path + "' is not a JSON object");
  std::map<std::string, std::vector<std::string>> graph;
  for (auto it = j.begin(); it != j.end(); ++it) {
    if (!it.value().is_array())
      throw Error(ErrorCode::SchemaError, "fixture entry '" + it.key() + "' is not an array");
    graph[it.key()] = it.value().get<std::vector<std::string>>();
  }
  return FixtureGraphClient(std::move(graph));
}

std::optional<std::string> FixtureGraphClient::resolve(const std::string& surface) const {
  if (graph_.count(surface)) return surface;
  return std::nullopt;
}

std::vector<std::string> FixtureGraphClient::neighbors(const std::string& id,
                                                       std::size_t limit) const {
  auto it = graph_.find(id);
  if (it == graph_.end()) return {};
  std::vector<std::string> out(it->second.begin(),
                               it->second.begin() + std::min(limit, it->second.size()));
  return out;
}

std::string render_neighbor_query(std::string_view entity_id, std::size_t limit) {
  std::string q;
  q += "SELECT ?property ?propertyLabel ?object ?objectLabel\n";
  q += "WHERE {\n";
  q += "    wd:" + std::string(entity_id) + " ?property ?object.\n";
  q += "    ?property rdfs:label ?propertyLabel.\n";
  q += "    ?object rdfs:label ?objectLabel.\n";
  q += "    FILTER(LANG(?propertyLabel) = \"en\")\n";
  q += "    FILTER(LANG(?objectLabel) = \"en\")\n";
  q += "}\n";
  q += "LIMIT " + std::to_string(limit);
  return q;
}

std::vector<Entity> expand_entities(std::span<const Entity> entities, std::size_t limit,
                                    const EntityGraphClient& client, Diagnostics* diag) {
  std::vector<Entity> out(entities.begin(), entities.end());
  std::unordered_set<std::string> seen;
  for (const auto& e : out) seen.insert(e.surface);
  for (const auto& e : entities) {
    try {
      auto id = client.resolve(e.surface);
      if (!id) {
        if (diag) diag->warn("entity '" + e.surface + "' did not resolve");
        continue;
      }
      for (auto& label : client.neighbors(*id, limit)) {
        std::string surface(prompts::trim(label));
        if (surface.empty() || !seen.insert(surface).second) continue;
        out.push_back({surface, EntityOrigin::expanded});
      }
    } catch (const std::exception& ex) {
      if (diag) diag->warn("entity '" + e.surface + "' expansion failed: " + ex.what());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// BM25

Bm25Index::Bm25Index(std::vector<Passage> passages, double k1, double b)
    : passages_(std::move(passages)), k1_(k1), b_(b) {
  if (!(k1_ > 0)) throw Error(ErrorCode::InvalidConfig, "BM25 k1 must be > 0");
  if (!(b_ >= 0 && b_ <= 1)) throw Error(ErrorCode::InvalidConfig, "BM25 b must lie in [0, 1]");
  lengths_.reserve(passages_.size());
  double total = 0;
  for (std::size_t d = 0; d < passages_.size(); ++d) {
    if (!by_id_.emplace(passages_[d].id, d).second)
      throw Error(ErrorCode::InvalidInput, "duplicate passage id '" + passages_[d].id + "'");
    auto tokens = normalized_tokens(passages_[d].text);
    lengths_.push_back(tokens.size());
    total += static_cast<double>(tokens.size());
    std::unordered_map<std::string, std::size_t> tf;
    for (auto& t : tokens) ++tf[t];
    for (auto& [term, count] : tf) postings_[term].emplace_back(d, count);
  }
  avgdl_ = passages_.empty() ? 0.0 : total / static_cast<double>(passages_.size());
}

std::optional<std::size_t> Bm25Index::find(const std::string& id) const {
  auto it = by_id_.find(id);
  if (it == by_id_.end()) return std::nullopt;
  return it->second;
}

std::size_t Bm25Index::document_frequency(const std::string& term) const {
  auto it = postings_.find(term);
  return it == postings_.end() ? 0 : it->second.size();
}

namespace {

std::vector<std::string> distinct(std::span<const std::string> terms) {
  std::vector<std::string> out;
  std::unordered_set<std::string> seen;
  for (const auto& t : terms)
    if (seen.insert(t).second) out.push_back(t);
  return out;
}

}  // namespace

double Bm25Index::score(std::span<const std::string> query_terms, std::size_t doc) const {
  const double n = static_cast<double>(passages_.size());
  const double norm = avgdl_ > 0 ? static_cast<double>(lengths_[doc]) / avgdl_ : 0.0;
  double s = 0;
  for (const auto& term : distinct(query_terms)) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    const auto& plist = it->second;
    auto hit = std::find_if(plist.begin(), plist.end(),
                            [&](const auto& e) { return e.first == doc; });
    if (hit == plist.end()) continue;
    const double df = static_cast<double>(plist.size());
    const double tf = static_cast<double>(hit->second);
    const double idf = std::log((n - df + 0.5) / (df + 0.5) + 1.0);
    s += idf * tf * (k1_ + 1) / (tf + k1_ * (1 - b_ + b_ * norm));
  }
  return s;
}

std::vector<ScoredPassage> Bm25Index::top(std::span<const std::string> query_terms,
                                          std::size_t limit) const {
  std::unordered_set<std::size_t> candidates;
  for (const auto& term : distinct(query_terms)) {
    auto it = postings_.find(term);
    if (it == postings_.end()) continue;
    for (const auto& [doc, tf] : it->second) candidates.insert(doc);
  }
  std::vector<ScoredPassage> hits;
  for (auto doc : candidates) {
    double s = score(query_terms, doc);
    if (s > 0) hits.push_back({doc, s});
  }
  std::sort(hits.begin(), hits.end(), [&](const ScoredPassage& a, const ScoredPassage& b) {
    if (a.score != b.score) return a.score > b.score;
    return passages_[a.index].id < passages_[b.index].id;
  });
  if (hits.size() > limit) hits.resize(limit);
  return hits;
}

double bm25_score(std::span<const std::string> query_terms, const Passage& passage,
                  const Bm25Index& index) {
  auto doc = index.find(passage.id);
  if (!doc) throw Error(ErrorCode::InvalidInput, "passage '" + passage.id + "' is not indexed");
  return index.score(query_terms, *doc);
}

SharedContext retrieve_passages(std::span<const Entity> entities, const Bm25Index& index,
                                std::size_t per_entity, std::size_t total,
                                std::string context_id, std::string seed_ref) {
  if (index.size() == 0) throw Error(ErrorCode::EmptyContext, "BM25 index is empty");
  std::unordered_map<std::size_t, double> pooled;
  for (const auto& e : entities) {
    auto terms = normalized_tokens(e.surface);
    for (const auto& hit : index.top(terms, per_entity)) {
      auto [it, fresh] = pooled.emplace(hit.index, hit.score);
      if (!fresh) it->second = std::max(it->second, hit.score);
    }
  }
  if (pooled.empty())
    throw Error(ErrorCode::EmptyContext, "no passage matched any entity for '" + context_id + "'");
  std::vector<ScoredPassage> ranked;
  for (auto [doc, s] : pooled) ranked.push_back({doc, s});
  std::sort(ranked.begin(), ranked.end(), [&](const ScoredPassage& a, const ScoredPassage& b) {
    if (a.score != b.score) return a.score > b.score;
    return index.passage(a.index).id < index.passage(b.index).id;
  });
  if (ranked.size() > total) ranked.resize(total);

  SharedContext ctx;
  ctx.context_id = std::move(context_id);
  ctx.seed_ref = std::move(seed_ref);
  for (const auto& r : ranked) ctx.passages.push_back(index.passage(r.index));
  return ctx;
}

// ---------------------------------------------------------------------------
// Synthesis, filtering, noise

SyntheticExample synthesize(const SharedContext& context, const TaskSpec& task,
                            const GeneratorOracle& oracle, double temperature) {
  if (context.passages.empty())
    throw Error(ErrorCode::EmptyContext, "context '" + context.context_id + "' is empty");
  auto reply = oracle.generate(prompts::render_synthesis(context.passages, task), temperature,
                               kDefaultMaxTokens);
  auto [input, output] = prompts::parse_synthesis_reply(reply);
  return {task.task_id, std::move(input), std::move(output), context.context_id,
          FilterVerdict::unfiltered};
}

FilterOutcome filter_example(const SyntheticExample& example, const SharedContext& context,
                             const TaskSpec& task, const GeneratorOracle& oracle,
                             double temperature) {
  if (example.filter_verdict != FilterVerdict::unfiltered)
    throw Error(ErrorCode::InvalidInput, "example was already filtered");
  FilterOutcome outcome;
  std::string reply;
  try {
    reply = oracle.generate(prompts::render_filter(example, context.passages, task), temperature,
                            kDefaultMaxTokens);
  } catch (const std::exception&) {
    outcome.error = true;
    return outcome;
  }
  switch (prompts::parse_filter_reply(reply)) {
    case prompts::FilterReply::yes: outcome.verdict = FilterVerdict::kept; break;
    case prompts::FilterReply::no: break;
    case prompts::FilterReply::unparseable: outcome.warning = true; break;
  }
  return outcome;
}

NoiseOutcome inject_noise(const SharedContext& context, const SyntheticExample& example,
                          const GeneratorOracle& oracle, std::uint64_t seed, double temperature,
                          Diagnostics* diag) {
  if (context.passages.empty())
    throw Error(ErrorCode::EmptyContext, "context '" + context.context_id + "' is empty");
  NoiseOutcome outcome{context, false, 0};
  std::optional<std::string> text;
  try {
    text = prompts::parse_noise_reply(oracle.generate(
        prompts::render_noise(example, context.passages), temperature, kDefaultMaxTokens));
  } catch (const std::exception& e) {
    if (diag) diag->warn("noise generation failed for '" + context.context_id + "': " + e.what());
    return outcome;
  }
  if (!text) {
    if (diag) diag->warn("noise reply for '" + context.context_id + "' had no passage markers");
    return outcome;
  }
  std::mt19937_64 rng(mix64(seed ^ fnv1a64(context.context_id)));
  outcome.position = static_cast<std::size_t>(rng() % (context.passages.size() + 1));
  auto noise = make_passage(context.context_id + "#noise", std::move(*text),
                            PassageSource::synthetic_noise);
  outcome.context.passages.insert(
      outcome.context.passages.begin() + static_cast<std::ptrdiff_t>(outcome.position),
      std::move(noise));
  outcome.inserted = true;
  return outcome;
}

std::vector<std::size_t> sample_seed_indices(std::span<const SeedExample> seeds,
                                             std::size_t per_task, std::uint64_t seed) {
  std::map<std::string, std::vector<std::size_t>> by_task;
  for (std::size_t i = 0; i < seeds.size(); ++i) by_task[seeds[i].task_id].push_back(i);
  std::vector<char> keep(seeds.size(), 0);
  for (auto& [task, idx] : by_task) {
    if (idx.size() > per_task) {
      std::mt19937_64 rng(seed);
      for (std::size_t i = idx.size() - 1; i > 0; --i)
        std::swap(idx[i], idx[static_cast<std::size_t>(rng() % (i + 1))]);
      idx.resize(per_task);
    }
    for (auto i : idx) keep[i] = 1;
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < seeds.size(); ++i)
    if (keep[i]) out.push_back(i);
  return out;
}

std::vector<SeedExample> sample_seeds(std::span<const SeedExample> seeds, std::size_t per_task,
                                      std::uint64_t seed) {
  std::vector<SeedExample> out;
  for (auto i : sample_seed_indices(seeds, per_task, seed)) out.push_back(seeds[i]);
  return out;
}

}  // namespace scarlet
