#include "hdlock/encoder.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <chrono>
#include <numeric>
#include <string>

#include "hdlock/error.hpp"

namespace hdlock {

namespace {

constexpr std::size_t kMaxPlanes = 32;

// Sums n_terms bipolar words per storage word. word(i, w) yields term i's
// word w with bit 1 meaning +1. Counters are bit-sliced: plane p holds bit p
// of the per-element count of +1 terms.
template <class WordFn>
Accumulator accumulate_words(std::size_t dim, std::size_t n_terms, WordFn&& word) {
  Accumulator acc(dim);
  acc.set_term_count(n_terms);
  if (n_terms == 0) return acc;
  const std::size_t planes_used = std::bit_width(n_terms);
  auto out = acc.mutable_elements();
  const auto n = static_cast<std::int32_t>(n_terms);
  const std::size_t words = word_count(dim);
  for (std::size_t w = 0; w < words; ++w) {
    std::array<std::uint64_t, kMaxPlanes> planes{};
    for (std::size_t i = 0; i < n_terms; ++i) {
      std::uint64_t carry = word(i, w);
      for (std::size_t p = 0; carry != 0; ++p) {
        const std::uint64_t t = planes[p] & carry;
        planes[p] ^= carry;
        carry = t;
      }
    }
    const std::size_t first = w * kWordBits;
    const std::size_t count = std::min(kWordBits, dim - first);
    for (std::size_t b = 0; b < count; ++b) {
      std::int32_t ones = 0;
      for (std::size_t p = 0; p < planes_used; ++p) {
        ones |= static_cast<std::int32_t>((planes[p] >> b) & 1ULL) << p;
      }
      out[first + b] = 2 * ones - n;
    }
  }
  return acc;
}

// Same sums as accumulate_words, but a block of words at a time:
// fill(i, first_word, count, out) writes term i's words for the block. Lets
// callers read each term's source memory contiguously.
template <class FillFn>
Accumulator accumulate_blocked(std::size_t dim, std::size_t n_terms, FillFn&& fill) {
  constexpr std::size_t kBlock = 64;
  Accumulator acc(dim);
  acc.set_term_count(n_terms);
  if (n_terms == 0) return acc;
  const std::size_t planes_used = std::bit_width(n_terms);
  auto out = acc.mutable_elements();
  const auto n = static_cast<std::int32_t>(n_terms);
  const std::size_t words = word_count(dim);
  std::array<std::array<std::uint64_t, kMaxPlanes>, kBlock> planes;
  std::array<std::uint64_t, kBlock> term;
  for (std::size_t wb = 0; wb < words; wb += kBlock) {
    const std::size_t nb = std::min(kBlock, words - wb);
    for (auto& p : planes) p.fill(0);
    for (std::size_t i = 0; i < n_terms; ++i) {
      fill(i, wb, nb, term.data());
      for (std::size_t k = 0; k < nb; ++k) {
        std::uint64_t carry = term[k];
        for (std::size_t p = 0; carry != 0; ++p) {
          const std::uint64_t t = planes[k][p] & carry;
          planes[k][p] ^= carry;
          carry = t;
        }
      }
    }
    for (std::size_t k = 0; k < nb; ++k) {
      const std::size_t first = (wb + k) * kWordBits;
      const std::size_t count = std::min(kWordBits, dim - first);
      for (std::size_t b = 0; b < count; ++b) {
        std::int32_t ones = 0;
        for (std::size_t p = 0; p < planes_used; ++p) {
          ones |= static_cast<std::int32_t>((planes[k][p] >> b) & 1ULL) << p;
        }
        out[first + b] = 2 * ones - n;
      }
    }
  }
  return acc;
}

void require_nonempty_levels(const std::vector<Hypervector>& values) {
  if (values.empty()) detail::fail(ErrorCode::kInvalidArgument, "encoder needs at least one level");
  for (const auto& v : values) {
    if (v.dim() != values.front().dim()) {
      detail::fail(ErrorCode::kDimensionMismatch, "value hypervectors differ in dimension");
    }
  }
}

}  // namespace

const char* to_string(EncodeMode mode) noexcept {
  return mode == EncodeMode::kBinary ? "binary" : "non-binary";
}

EncodeMode parse_mode(std::string_view text) {
  if (text == "binary") return EncodeMode::kBinary;
  if (text == "non-binary" || text == "nonbinary") return EncodeMode::kNonBinary;
  detail::fail(ErrorCode::kConfig, "unknown mode '" + std::string(text) +
                                       "' (expected binary or non-binary)");
}

Encoder::Encoder(std::vector<Hypervector> features, std::vector<Hypervector> values)
    : features_(std::move(features)), values_(std::move(values)) {
  require_nonempty_levels(values_);
  if (features_.empty()) detail::fail(ErrorCode::kInvalidArgument, "encoder needs at least one feature");
  for (const auto& f : features_) {
    if (f.dim() != dim()) {
      detail::fail(ErrorCode::kDimensionMismatch, "feature and value hypervectors differ in dimension");
    }
  }
}

Encoder Encoder::locked(BasePool pool, LockKey key, std::vector<Hypervector> values) {
  require_nonempty_levels(values);
  if (pool.dim != values.front().dim()) {
    detail::fail(ErrorCode::kDimensionMismatch, "base pool and value hypervectors differ in dimension");
  }
  Encoder enc(derive_locked_feature_hvs(pool, key), std::move(values));
  enc.lock_ = LockMaterial{std::move(pool), std::move(key)};
  return enc;
}

void Encoder::check_sample(const QuantizedSample& sample) const {
  if (sample.size() != n_features()) {
    detail::fail(ErrorCode::kDimensionMismatch, "sample has " + std::to_string(sample.size()) +
                                                    " features, encoder expects " +
                                                    std::to_string(n_features()));
  }
  for (std::size_t i = 0; i < sample.size(); ++i) {
    if (sample[i] >= n_levels()) {
      detail::fail(ErrorCode::kOutOfRange, "feature " + std::to_string(i) + " has level " +
                                               std::to_string(sample[i]) + " >= M = " +
                                               std::to_string(n_levels()));
    }
  }
}

Accumulator Encoder::encode(const QuantizedSample& sample) const {
  check_sample(sample);
  std::vector<const std::uint64_t*> lhs(sample.size());
  std::vector<const std::uint64_t*> rhs(sample.size());
  for (std::size_t i = 0; i < sample.size(); ++i) {
    lhs[i] = values_[sample[i]].words().data();
    rhs[i] = features_[i].words().data();
  }
  return accumulate_words(dim(), sample.size(),
                          [&](std::size_t i, std::size_t w) { return ~(lhs[i][w] ^ rhs[i][w]); });
}

Hypervector Encoder::encode_binary(const QuantizedSample& sample, const Rng& rng) const {
  return binarize(encode(sample), rng);
}

Accumulator accumulate_products(std::span<const Hypervector* const> lhs,
                                std::span<const Hypervector* const> rhs) {
  if (lhs.size() != rhs.size() || lhs.empty()) {
    detail::fail(ErrorCode::kInvalidArgument, "accumulate_products: need equal, non-empty term lists");
  }
  const std::size_t dim = lhs.front()->dim();
  for (std::size_t i = 0; i < lhs.size(); ++i) {
    if (lhs[i]->dim() != dim || rhs[i]->dim() != dim) {
      detail::fail(ErrorCode::kDimensionMismatch, "accumulate_products: dimension mismatch");
    }
  }
  return accumulate_words(dim, lhs.size(), [&](std::size_t i, std::size_t w) {
    return ~(lhs[i]->words()[w] ^ rhs[i]->words()[w]);
  });
}

double encoding_cost(std::size_t layers, std::size_t n, std::size_t dim) {
  if (layers == 0) detail::fail(ErrorCode::kInvalidArgument, "encoding_cost: L must be >= 1");
  if (n == 0 || dim == 0) detail::fail(ErrorCode::kInvalidArgument, "encoding_cost: N and D must be >= 1");
  // Baseline: one value*feature multiply per feature element. Layer l >= 2
  // adds one base*base multiply per feature element; layer 1 adds none.
  const double baseline = static_cast<double>(n) * static_cast<double>(dim);
  const double extra = static_cast<double>(layers - 1) * baseline;
  const double locked = baseline + extra;
  return layers == 1 ? 1.0 : locked / baseline;
}

StreamingLockedEncoder::StreamingLockedEncoder(const BasePool& pool, const LockKey& key,
                                               std::vector<Hypervector> values)
    : dim_(pool.dim),
      layers_(key.layers()),
      n_features_(key.n_features()),
      entries_(key.entries().begin(), key.entries().end()),
      values_(std::move(values)) {
  require_valid_key(key, pool);
  require_nonempty_levels(values_);
  if (values_.front().dim() != dim_) {
    detail::fail(ErrorCode::kDimensionMismatch, "base pool and value hypervectors differ in dimension");
  }
  bases_.reserve(pool.size());
  for (const auto& base : pool.bases) {
    std::vector<std::uint64_t> buf(base.words().begin(), base.words().end());
    buf.push_back(0);
    bases_.push_back(std::move(buf));
  }
  // Summation order is free; visiting features by first-layer base keeps the
  // window reads moving forward through the pool.
  order_.resize(n_features_);
  std::iota(order_.begin(), order_.end(), 0);
  std::stable_sort(order_.begin(), order_.end(), [&](std::size_t a, std::size_t b) {
    return entries_[a * layers_].base < entries_[b * layers_].base;
  });
}

Accumulator StreamingLockedEncoder::encode(const QuantizedSample& sample) const {
  if (sample.size() != n_features_) {
    detail::fail(ErrorCode::kDimensionMismatch, "sample length does not match key feature count");
  }
  for (auto level : sample) {
    if (level >= values_.size()) detail::fail(ErrorCode::kOutOfRange, "sample level >= M");
  }
  const std::size_t layers = layers_;
  const std::size_t dim = dim_;
  // Words [w, w + count) of a rotated base, read in place. Bits past D in the
  // stored words are zero, which the single wrap-around word relies on.
  auto window = [&](const KeyEntry& e, std::size_t w, std::size_t count, auto&& combine) {
    const std::uint64_t* buf = bases_[e.base].data();
    // (x << 1) << (63 - r) is x << (64 - r) without the undefined r == 0 case.
    auto read = [buf](std::size_t p) {
      const std::size_t q = p / kWordBits;
      const std::size_t r = p % kWordBits;
      return (buf[q] >> r) | ((buf[q + 1] << 1) << (63 - r));
    };
    std::size_t p = e.rotation + w * kWordBits;
    if (p >= dim) p -= dim;
    const std::size_t inside = std::min(count, (dim - p) / kWordBits);
    std::size_t k = 0;
    for (; k < inside; ++k, p += kWordBits) combine(k, read(p));
    if (k == count) return;
    if (p == dim) {
      p = 0;
    } else {
      const std::size_t head = dim - p;
      combine(k++, read(p) | (buf[0] << head));
      p = kWordBits - head;
    }
    for (; k < count; ++k, p += kWordBits) combine(k, read(p));
  };
  return accumulate_blocked(dim_, n_features_, [&](std::size_t t, std::size_t w, std::size_t count,
                                                   std::uint64_t* out) {
    const std::size_t i = order_[t];
    const KeyEntry* sub = entries_.data() + i * layers;
    window(sub[0], w, count, [&](std::size_t k, std::uint64_t x) { out[k] = x; });
    for (std::size_t l = 1; l < layers; ++l) {
      window(sub[l], w, count, [&](std::size_t k, std::uint64_t x) { out[k] = ~(out[k] ^ x); });
    }
    const std::uint64_t* val = values_[sample[i]].words().data() + w;
    for (std::size_t k = 0; k < count; ++k) out[k] = ~(val[k] ^ out[k]);
  });
}

std::vector<EncodeCostRow> benchmark_encoding(std::span<const std::size_t> layers,
                                              const EncodeBenchOptions& options) {
  using Clock = std::chrono::steady_clock;
  const std::size_t n = options.n_features;
  const std::size_t dim = options.dim;
  const Rng root(options.seed, "bench-encode");
  const BasePool pool = BasePool::generate(n, dim, options.seed);
  Rng val_rng = root.fork("val");
  auto values = generate_value_hvs(options.levels, dim, val_rng);

  std::vector<QuantizedSample> samples(options.samples, QuantizedSample(n));
  Rng sample_rng = root.fork("samples");
  for (auto& s : samples) {
    for (auto& level : s) level = static_cast<std::uint32_t>(sample_rng.uniform(options.levels));
  }

  std::vector<StreamingLockedEncoder> encoders;
  encoders.emplace_back(pool, LockKey::identity(n, dim), values);
  for (std::size_t l : layers) {
    Rng key_rng = root.fork("key").fork(l);
    encoders.emplace_back(pool, generate_key(n, l, n, dim, key_rng), values);
  }

  // Each repeat times the baseline and every configuration back to back; the
  // per-repeat ratios are paired, and the median across repeats is reported.
  std::vector<std::vector<double>> ratios(encoders.size());
  std::vector<double> seconds(encoders.size(), 0.0);
  std::int64_t sink = 0;
  for (std::size_t rep = 0; rep < options.repeats; ++rep) {
    std::vector<double> t(encoders.size());
    for (std::size_t e = 0; e < encoders.size(); ++e) {
      const auto start = Clock::now();
      for (const auto& s : samples) sink += encoders[e].encode(s)[0];
      t[e] = std::chrono::duration<double>(Clock::now() - start).count();
      seconds[e] += t[e];
    }
    for (std::size_t e = 1; e < encoders.size(); ++e) ratios[e].push_back(t[e] / t[0]);
  }
  // Keeps the encode calls observable.
  if (sink == std::int64_t{0x7FFFFFFFFFFFFFFF}) seconds[0] += 1.0;

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
  };
  std::vector<EncodeCostRow> rows;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    EncodeCostRow row;
    row.layers = layers[i];
    row.modeled = encoding_cost(layers[i], n, dim);
    row.measured_ratio = median(ratios[i + 1]);
    row.seconds_per_sample =
        seconds[i + 1] / static_cast<double>(samples.size() * options.repeats);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace hdlock
