#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "scarlet/core.hpp"
#include "scarlet/hash.hpp"

namespace scarlet {

struct TrainConfig {
  double learning_rate = 0.05;
  std::size_t epochs = 1;
  std::uint64_t seed = 0;
  double init_sigma = 0.02;
};

void validate(const TrainConfig& config);

/// Overflow-safe ln(1 + exp(s_neg - s_pos)).
template <typename Scalar>
Scalar pair_loss(Scalar s_pos, Scalar s_neg) {
  const Scalar x = s_neg - s_pos;
  return x > Scalar(0) ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

/// d pair_loss / d s_neg (= -d pair_loss / d s_pos).
template <typename Scalar>
Scalar pair_loss_slope(Scalar s_pos, Scalar s_neg) {
  const Scalar x = s_neg - s_pos;
  if (x >= Scalar(0)) return Scalar(1) / (Scalar(1) + std::exp(-x));
  const Scalar e = std::exp(x);
  return e / (Scalar(1) + e);
}

/// Hashed bag-of-tokens encoder: mean of the table rows of a text's
/// normalized tokens. Rows are addressed by FNV-1a(token) mod buckets.
template <typename Scalar>
class BasicToyEncoder {
 public:
  using Table = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
  using Row = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

  static constexpr std::uint32_t kHashFnv1a = 1;
  static constexpr std::size_t kDefaultBuckets = std::size_t{1} << 16;
  static constexpr std::size_t kDefaultDim = 64;

  BasicToyEncoder() : BasicToyEncoder(Table::Zero(kDefaultBuckets, kDefaultDim)) {}
  explicit BasicToyEncoder(Table table) : table_(std::move(table)) {}

  /// Entries ~ N(0, sigma^2) from a seeded generator.
  static BasicToyEncoder random(std::size_t buckets, std::size_t dim, std::uint64_t seed,
                                double sigma) {
    if (buckets == 0 || dim == 0)
      throw Error(ErrorCode::InvalidConfig, "encoder needs buckets >= 1 and dim >= 1");
    Table t(static_cast<Eigen::Index>(buckets), static_cast<Eigen::Index>(dim));
    std::mt19937_64 rng(seed);
    auto uniform = [&] { return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53; };
    // Box-Muller, both outputs used.
    Scalar* data = t.data();
    const auto count = static_cast<std::size_t>(t.size());
    for (std::size_t i = 0; i < count; i += 2) {
      const double r = std::sqrt(-2.0 * std::log(uniform()));
      const double th = 2.0 * 3.14159265358979323846 * uniform();
      data[i] = static_cast<Scalar>(sigma * r * std::cos(th));
      if (i + 1 < count) data[i + 1] = static_cast<Scalar>(sigma * r * std::sin(th));
    }
    return BasicToyEncoder(std::move(t));
  }

  std::size_t buckets() const { return static_cast<std::size_t>(table_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(table_.cols()); }
  const Table& table() const { return table_; }
  Table& table() { return table_; }

  std::size_t bucket(std::string_view token) const { return fnv1a64(token) % buckets(); }

  /// Bucket -> occurrence count for the text's tokens, plus the token total.
  std::pair<std::map<std::size_t, std::size_t>, std::size_t> bag(std::string_view text) const {
    std::map<std::size_t, std::size_t> counts;
    auto tokens = normalized_tokens(text);
    for (const auto& t : tokens) ++counts[bucket(t)];
    return {std::move(counts), tokens.size()};
  }

  Vector encode(std::string_view text) const {
    Vector out = Vector::Zero(table_.cols());
    auto [counts, total] = bag(text);
    if (total == 0) return out;
    for (auto [b, c] : counts)
      out += Scalar(c) * table_.row(static_cast<Eigen::Index>(b)).transpose();
    return out / Scalar(total);
  }

  Scalar score(std::string_view query, std::string_view passage) const {
    return encode(query).dot(encode(passage));
  }

 private:
  Table table_;
};

using ToyEncoder = BasicToyEncoder<double>;

/// Gradient rows keyed by bucket; untouched rows are absent (zero).
template <typename Scalar>
using SparseGradient = std::map<std::size_t, typename BasicToyEncoder<Scalar>::Row>;

template <typename Scalar>
struct LossAndGradient {
  Scalar loss{};
  SparseGradient<Scalar> gradient;
};

namespace detail {

template <typename Scalar>
struct EncodedText {
  std::map<std::size_t, std::size_t> counts;
  std::size_t total = 0;
  typename BasicToyEncoder<Scalar>::Vector mean;
  typename BasicToyEncoder<Scalar>::Vector grad;  // dL / d mean
};

template <typename Scalar>
EncodedText<Scalar> encode_with_bag(const BasicToyEncoder<Scalar>& enc, std::string_view text) {
  EncodedText<Scalar> e;
  std::tie(e.counts, e.total) = enc.bag(text);
  e.mean = BasicToyEncoder<Scalar>::Vector::Zero(static_cast<Eigen::Index>(enc.dim()));
  if (e.total > 0) {
    for (auto [b, c] : e.counts)
      e.mean += Scalar(c) * enc.table().row(static_cast<Eigen::Index>(b)).transpose();
    e.mean /= Scalar(e.total);
  }
  e.grad = BasicToyEncoder<Scalar>::Vector::Zero(static_cast<Eigen::Index>(enc.dim()));
  return e;
}

template <typename Scalar>
void scatter(const EncodedText<Scalar>& e, std::size_t dim, SparseGradient<Scalar>& out) {
  for (auto [b, c] : e.counts) {
    auto [it, fresh] =
        out.try_emplace(b, BasicToyEncoder<Scalar>::Row::Zero(static_cast<Eigen::Index>(dim)));
    if (e.total > 0) it->second += (Scalar(c) / Scalar(e.total)) * e.grad.transpose();
  }
}

}  // namespace detail

/// Sum over every (query, d+, d-) triple of pair_loss(score(q, d+), score(q, d-)),
/// with the gradient taken through the dot products and mean pooling. Every
/// row a token of the batch maps to appears in the gradient, possibly zero.
template <typename Scalar>
LossAndGradient<Scalar> batch_loss_and_grad(const BasicToyEncoder<Scalar>& enc,
                                            std::span<const TrainingPairSet> batch) {
  LossAndGradient<Scalar> out;
  for (const auto& set : batch) {
    if (set.positives.empty() || set.negatives.empty())
      throw Error(ErrorCode::InvalidInput, "training pair set has an empty side");
    auto q = detail::encode_with_bag(enc, set.query.rendered);
    std::vector<detail::EncodedText<Scalar>> pos, neg;
    std::vector<Scalar> s_pos, s_neg;
    for (const auto& p : set.positives) {
      pos.push_back(detail::encode_with_bag(enc, p.text));
      s_pos.push_back(q.mean.dot(pos.back().mean));
    }
    for (const auto& n : set.negatives) {
      neg.push_back(detail::encode_with_bag(enc, n.text));
      s_neg.push_back(q.mean.dot(neg.back().mean));
    }
    for (std::size_t i = 0; i < pos.size(); ++i)
      for (std::size_t j = 0; j < neg.size(); ++j) {
        out.loss += pair_loss(s_pos[i], s_neg[j]);
        const Scalar g = pair_loss_slope(s_pos[i], s_neg[j]);
        q.grad += g * (neg[j].mean - pos[i].mean);
        pos[i].grad -= g * q.mean;
        neg[j].grad += g * q.mean;
      }
    detail::scatter(q, enc.dim(), out.gradient);
    for (const auto& e : pos) detail::scatter(e, enc.dim(), out.gradient);
    for (const auto& e : neg) detail::scatter(e, enc.dim(), out.gradient);
  }
  return out;
}

template <typename Scalar>
Scalar batch_loss(const BasicToyEncoder<Scalar>& enc, std::span<const TrainingPairSet> batch) {
  Scalar loss{};
  for (const auto& set : batch) {
    const auto q = enc.encode(set.query.rendered);
    for (const auto& p : set.positives) {
      const Scalar sp = q.dot(enc.encode(p.text));
      for (const auto& n : set.negatives) loss += pair_loss(sp, q.dot(enc.encode(n.text)));
    }
  }
  return loss;
}

/// Central finite differences on at most `max_coords` coordinates of the
/// touched rows, compared with the analytic gradient. Relative error is
/// |a - b| / max(1e-8, |a| + |b|); returns the maximum.
template <typename Scalar>
Scalar grad_check(const BasicToyEncoder<Scalar>& enc, std::span<const TrainingPairSet> batch,
                  Scalar epsilon, std::size_t max_coords = 64, std::uint64_t seed = 0) {
  if (!(epsilon > Scalar(0))) throw Error(ErrorCode::InvalidConfig, "epsilon must be > 0");
  const auto analytic = batch_loss_and_grad(enc, batch);
  std::vector<std::pair<std::size_t, std::size_t>> coords;
  for (const auto& [row, g] : analytic.gradient)
    for (std::size_t c = 0; c < enc.dim(); ++c) coords.emplace_back(row, c);
  if (coords.size() > max_coords) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = 0; i < max_coords; ++i)
      std::swap(coords[i], coords[i + static_cast<std::size_t>(rng() % (coords.size() - i))]);
    coords.resize(max_coords);
  }
  BasicToyEncoder<Scalar> probe = enc;
  Scalar worst{};
  for (auto [row, c] : coords) {
    auto& x = probe.table()(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(c));
    const Scalar saved = x;
    x = saved + epsilon;
    const Scalar up = batch_loss(probe, batch);
    x = saved - epsilon;
    const Scalar down = batch_loss(probe, batch);
    x = saved;
    const Scalar numeric = (up - down) / (Scalar(2) * epsilon);
    const Scalar a = analytic.gradient.at(row)(static_cast<Eigen::Index>(c));
    const Scalar rel = std::abs(a - numeric) / std::max(Scalar(1e-8), std::abs(a) + std::abs(numeric));
    worst = std::max(worst, rel);
  }
  return worst;
}

template <typename Scalar>
struct TrainResult {
  BasicToyEncoder<Scalar> encoder;
  Scalar initial_loss{};               // mean per-instance loss before training
  std::vector<Scalar> epoch_losses;    // mean per-instance loss during each epoch
};

/// Plain SGD, one pair set per step, visiting instances in a seeded shuffle
/// each epoch. Aborts with NonFiniteLoss if any step's loss is not finite.
template <typename Scalar>
TrainResult<Scalar> train(BasicToyEncoder<Scalar> encoder, std::span<const TrainingPairSet> data,
                          const TrainConfig& config) {
  validate(config);
  if (data.empty()) throw Error(ErrorCode::InvalidInput, "no training pairs");
  for (const auto& set : data)
    if (set.positives.empty() || set.negatives.empty())
      throw Error(ErrorCode::InvalidInput, "training pair set has an empty side");

  TrainResult<Scalar> result{std::move(encoder), Scalar(0), {}};
  result.initial_loss = batch_loss(result.encoder, data) / Scalar(data.size());

  std::vector<std::size_t> order(data.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::mt19937_64 rng(config.seed);
  const Scalar lr = static_cast<Scalar>(config.learning_rate);
  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    for (std::size_t i = order.size(); i-- > 1;)
      std::swap(order[i], order[static_cast<std::size_t>(rng() % (i + 1))]);
    Scalar total{};
    for (std::size_t step = 0; step < order.size(); ++step) {
      auto lg = batch_loss_and_grad(result.encoder, data.subspan(order[step], 1));
      if (!std::isfinite(static_cast<double>(lg.loss)))
        throw Error(ErrorCode::NonFiniteLoss,
                    "non-finite loss at epoch " + std::to_string(epoch + 1) + ", step " +
                        std::to_string(step) + ", instance " + std::to_string(order[step]) +
                        " (query: " + data[order[step]].query.rendered + ")");
      total += lg.loss;
      for (const auto& [row, g] : lg.gradient)
        result.encoder.table().row(static_cast<Eigen::Index>(row)) -= lr * g;
    }
    result.epoch_losses.push_back(total / Scalar(data.size()));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Checkpoints: "SCRLTOYE" magic, then little-endian u32 version, buckets,
// dim, hash id, then buckets*dim row-major float32 values.

inline constexpr std::string_view kCheckpointMagic = "SCRLTOYE";
inline constexpr std::uint32_t kCheckpointVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFFU));
}

inline std::uint32_t get_u32(std::string_view in, std::size_t at) {
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i)
    v |= static_cast<std::uint32_t>(static_cast<unsigned char>(in[at + i])) << (8 * i);
  return v;
}

}  // namespace detail

template <typename Scalar>
std::string serialize_checkpoint(const BasicToyEncoder<Scalar>& enc) {
  std::string out(kCheckpointMagic);
  detail::put_u32(out, kCheckpointVersion);
  detail::put_u32(out, static_cast<std::uint32_t>(enc.buckets()));
  detail::put_u32(out, static_cast<std::uint32_t>(enc.dim()));
  detail::put_u32(out, BasicToyEncoder<Scalar>::kHashFnv1a);
  out.reserve(out.size() + enc.buckets() * enc.dim() * 4);
  const Scalar* data = enc.table().data();
  for (Eigen::Index i = 0; i < enc.table().size(); ++i) {
    const float f = static_cast<float>(data[i]);
    std::uint32_t bits;
    std::memcpy(&bits, &f, sizeof bits);
    detail::put_u32(out, bits);
  }
  return out;
}

template <typename Scalar>
BasicToyEncoder<Scalar> deserialize_checkpoint(std::string_view bytes) {
  const std::size_t header = kCheckpointMagic.size() + 16;
  if (bytes.size() < header || bytes.substr(0, kCheckpointMagic.size()) != kCheckpointMagic)
    throw Error(ErrorCode::SchemaError, "not an encoder checkpoint");
  const std::size_t base = kCheckpointMagic.size();
  if (detail::get_u32(bytes, base) != kCheckpointVersion)
    throw Error(ErrorCode::SchemaError, "unsupported checkpoint version");
  const std::size_t buckets = detail::get_u32(bytes, base + 4);
  const std::size_t dim = detail::get_u32(bytes, base + 8);
  if (detail::get_u32(bytes, base + 12) != BasicToyEncoder<Scalar>::kHashFnv1a)
    throw Error(ErrorCode::SchemaError, "unknown checkpoint hash id");
  if (buckets == 0 || dim == 0 || bytes.size() != header + buckets * dim * 4)
    throw Error(ErrorCode::SchemaError, "checkpoint size does not match its header");
  typename BasicToyEncoder<Scalar>::Table table(static_cast<Eigen::Index>(buckets),
                                                static_cast<Eigen::Index>(dim));
  Scalar* data = table.data();
  for (std::size_t i = 0; i < buckets * dim; ++i) {
    const std::uint32_t bits = detail::get_u32(bytes, header + 4 * i);
    float f;
    std::memcpy(&f, &bits, sizeof f);
    data[i] = static_cast<Scalar>(f);
  }
  return BasicToyEncoder<Scalar>(std::move(table));
}

/// "epoch,mean_loss" rows; epoch 0 is the pre-training loss.
template <typename Scalar>
std::string loss_trace_csv(const TrainResult<Scalar>& result) {
  std::string out = "epoch,mean_loss\n";
  auto row = [&](std::size_t epoch, Scalar v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, static_cast<double>(v));
    out += std::to_string(epoch) + "," + std::string(buf, end) + "\n";
  };
  row(0, result.initial_loss);
  for (std::size_t e = 0; e < result.epoch_losses.size(); ++e) row(e + 1, result.epoch_losses[e]);
  return out;
}

}  // namespace scarlet
