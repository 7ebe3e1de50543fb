#include "scarlet/oracles.hpp"

#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <numeric>
#include <random>
#include <unordered_set>

#include "scarlet/hash.hpp"
#include "scarlet/prompts.hpp"

namespace scarlet {

void validate(const LinearMockSpec& spec) {
  if (spec.noise_sigma < 0)
    throw Error(ErrorCode::InvalidConfig, "noise_sigma must be >= 0");
  for (const auto& it : spec.interactions) {
    if (it.i < 1 || it.j < 1 || it.i > spec.k() || it.j > spec.k())
      throw Error(ErrorCode::InvalidConfig, "interaction index out of range");
    if (it.i == it.j) throw Error(ErrorCode::InvalidConfig, "interaction with itself");
  }
}

double mock_linear_score(const LinearMockSpec& spec, std::span<const int> v) {
  if (v.size() != spec.k())
    throw Error(ErrorCode::DimensionMismatch, "perturbation vector has length " +
                                                  std::to_string(v.size()) + ", expected " +
                                                  std::to_string(spec.k()));
  double z = spec.intercept;
  for (std::size_t i = 0; i < v.size(); ++i) z += spec.main_effects[i] * v[i];
  for (const auto& it : spec.interactions) z += it.weight * v[it.i - 1] * v[it.j - 1];
  if (spec.noise_sigma > 0) {
    std::uint64_t h = mix64(spec.seed);
    for (int bit : v) h = mix64(h ^ static_cast<std::uint64_t>(bit + 1));
    std::mt19937_64 rng(h);
    std::normal_distribution<double> noise(0.0, spec.noise_sigma);
    z += noise(rng);
  }
  return z;
}

LinearMockScorer::LinearMockScorer(LinearMockSpec spec, std::vector<std::string> universe)
    : spec_(std::move(spec)), universe_(std::move(universe)) {
  validate(spec_);
  if (universe_.size() != spec_.k())
    throw Error(ErrorCode::DimensionMismatch, "universe size does not match mock dimension");
  for (std::size_t i = 0; i < universe_.size(); ++i) position_.emplace(universe_[i], i);
}

std::vector<double> LinearMockScorer::score_ground_truth(std::span<const Passage> context,
                                                         const QueryText&,
                                                         const GenerationTarget&) const {
  std::vector<int> v(spec_.k(), 0);
  for (const auto& p : context) {
    auto it = position_.find(p.id);
    if (it == position_.end())
      throw Error(ErrorCode::DimensionMismatch, "passage '" + p.id + "' unknown to mock");
    v[it->second] = 1;
  }
  return {mock_linear_score(spec_, v)};
}

std::vector<double> OverlapScorer::score_ground_truth(std::span<const Passage> context,
                                                      const QueryText&,
                                                      const GenerationTarget& target) const {
  std::unordered_set<std::string> vocab;
  for (const auto& p : context)
    for (auto& t : normalized_tokens(p.text)) vocab.insert(std::move(t));
  std::vector<double> scores;
  scores.reserve(target.tokenized_truth.size());
  for (const auto& tok : target.tokenized_truth) {
    auto t = normalize_token(tok);
    bool covered = !t.empty() && vocab.count(t) > 0;
    scores.push_back(covered ? options_.covered : options_.uncovered);
  }
  return scores;
}

// ---------------------------------------------------------------------------
// MockGenerator

namespace {

std::vector<std::string_view> split_sentences(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool end = (c == '.' || c == '?' || c == '!') && (i + 1 == text.size() || text[i + 1] == ' ');
    if (end) {
      auto s = prompts::trim(text.substr(start, i + 1 - start));
      if (!s.empty()) out.push_back(s);
      start = i + 1;
    }
  }
  auto tail = prompts::trim(text.substr(std::min(start, text.size())));
  if (!tail.empty()) out.push_back(tail);
  return out;
}

bool is_title_word(std::string_view w) {
  std::size_t b = 0;
  while (b < w.size() && std::ispunct(static_cast<unsigned char>(w[b]))) ++b;
  return b < w.size() && std::isupper(static_cast<unsigned char>(w[b]));
}

std::string strip_punct(std::string_view w) {
  std::size_t b = 0, e = w.size();
  while (b < e && std::ispunct(static_cast<unsigned char>(w[b]))) ++b;
  while (e > b && std::ispunct(static_cast<unsigned char>(w[e - 1]))) --e;
  return std::string(w.substr(b, e - b));
}

std::string mock_synthesis(const std::string& prompt, std::uint64_t seed) {
  auto block = prompts::between(prompt, "====Context begins====", "====Context ends====");
  if (!block) return {};
  auto passages = prompts::parse_numbered(*block);
  if (passages.empty()) return {};
  std::uint64_t h = mix64(fnv1a64(prompt, mix64(seed)));
  const auto& passage = passages[h % passages.size()];
  auto sentences = split_sentences(passage);
  if (sentences.empty()) return {};
  auto sentence = sentences[mix64(h) % sentences.size()];
  auto words = split_words(sentence);
  if (words.size() < 2) return {};

  std::size_t answer = words.size() - 1;
  for (std::size_t i = words.size(); i-- > 1;) {
    if (is_title_word(words[i]) && !strip_punct(words[i]).empty()) {
      answer = i;
      break;
    }
  }
  std::string answer_text = strip_punct(words[answer]);
  if (answer_text.empty()) return {};
  std::string input;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (i) input.push_back(' ');
    input += i == answer ? std::string("what") : strip_punct(words[i]);
  }
  input.push_back('?');
  return std::string(prompts::kNewDataBegin) + "\nInput: " + input +
         "\nReference output: " + answer_text + "\n" + std::string(prompts::kNewDataEnd) + "\n";
}

std::string mock_filter(const std::string& prompt) {
  // The example section also has an "Output:" line; the data section is the
  // last one before the source passages.
  auto src_at = prompt.rfind("\nSource passages: ");
  auto out_at = prompt.rfind("\nOutput: ", src_at);
  if (src_at == std::string::npos || out_at == std::string::npos) return "[NO]";
  std::string_view out(prompt);
  auto answer = normalize_text(out.substr(out_at + 9, src_at - out_at - 9));
  auto sources = normalize_text(out.substr(src_at));
  if (!answer.empty() && sources.find(answer) != std::string::npos)
    return "The output is supported by the source passages. [YES]";
  return "The output is not supported by the source passages. [NO]";
}

std::string replace_all_ci(const std::string& text, const std::string& needle,
                           const std::string& replacement) {
  if (needle.empty()) return text;
  std::string lower = text;
  std::string lneedle = needle;
  auto lc = [](std::string& s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  };
  lc(lower);
  lc(lneedle);
  std::string out;
  std::size_t pos = 0;
  for (auto at = lower.find(lneedle); at != std::string::npos; at = lower.find(lneedle, pos)) {
    out.append(text, pos, at - pos);
    out += replacement;
    pos = at + needle.size();
  }
  out.append(text, pos, std::string::npos);
  return out;
}

std::string mock_noise(const std::string& prompt) {
  auto truth = prompts::between(prompt, "\nGround truth: ", "\n\nContext: ");
  auto block = prompts::between(prompt, "\n\nContext: ", "\n\nPlease ensure");
  if (!truth || !block) return {};
  auto passages = prompts::parse_numbered(*block);
  if (passages.empty()) return {};
  std::string answer(prompts::trim(*truth));
  auto needle = normalize_text(answer);
  std::size_t pick = 0;
  for (std::size_t i = 0; i < passages.size(); ++i)
    if (!needle.empty() && normalize_text(passages[i]).find(needle) != std::string::npos) {
      pick = i;
      break;
    }
  std::string variant = replace_all_ci(passages[pick], answer, "an unnamed place");
  return std::string(prompts::kNoiseBegin) + "\n" + variant + "\n" +
         std::string(prompts::kNoiseEnd) + "\n";
}

std::string mock_rank(const std::string& prompt) {
  auto block = prompts::between(prompt, "Context: ", "\n\nQuestion: ");
  auto qat = prompt.rfind("\n\nQuestion: ");
  if (!block || qat == std::string::npos) return {};
  auto passages = prompts::parse_numbered(*block);
  if (passages.empty()) return {};
  auto qtokens = normalized_tokens(std::string_view(prompt).substr(qat + 12));
  std::unordered_set<std::string> qset(qtokens.begin(), qtokens.end());
  std::vector<std::size_t> overlap(passages.size(), 0);
  for (std::size_t i = 0; i < passages.size(); ++i) {
    std::unordered_set<std::string> seen;
    for (auto& t : normalized_tokens(passages[i]))
      if (qset.count(t) && seen.insert(t).second) ++overlap[i];
  }
  std::vector<std::size_t> order(passages.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return overlap[a] > overlap[b]; });
  std::string reply = "Answer: see passage [" + std::to_string(order[0] + 1) + "].\nMy rank: ";
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (r) reply += ">";
    reply += "[" + std::to_string(order[r] + 1) + "]";
  }
  return reply + "\n";
}

}  // namespace

std::string MockGenerator::generate(const std::string& prompt, double, int) const {
  if (prompt.find("====Target task example begins====") != std::string::npos)
    return mock_synthesis(prompt, seed_);
  if (prompt.find("otherwise output \"[NO]\"") != std::string::npos) return mock_filter(prompt);
  if (prompt.find(prompts::kNoiseBegin) != std::string::npos) return mock_noise(prompt);
  if (prompt.find(prompts::kRankPrefix) != std::string::npos) return mock_rank(prompt);
  return {};
}

HttpOptions HttpOptions::from_env() {
  HttpOptions o;
  if (const char* tok = std::getenv("SCARLET_ORACLE_TOKEN")) o.bearer_token = tok;
  return o;
}

}  // namespace scarlet
