#pragma once

// Record-based encoding: sum_i val[f_i] * fea_i, optionally binarized.
// Baseline encoders take feature hypervectors from the item memory; locked
// encoders derive them from a base pool and a key.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hdlock/hypervector.hpp"
#include "hdlock/item_memory.hpp"
#include "hdlock/keylock.hpp"
#include "hdlock/rng.hpp"

namespace hdlock {

enum class EncodeMode : std::uint8_t { kNonBinary = 0, kBinary = 1 };

const char* to_string(EncodeMode mode) noexcept;
EncodeMode parse_mode(std::string_view text);

struct LockMaterial {
  BasePool pool;
  LockKey key;
};

class Encoder {
 public:
  Encoder(std::vector<Hypervector> features, std::vector<Hypervector> values);
  explicit Encoder(const ItemMemory& memory) : Encoder(memory.fea, memory.val) {}

  static Encoder locked(BasePool pool, LockKey key, std::vector<Hypervector> values);

  [[nodiscard]] std::size_t n_features() const noexcept { return features_.size(); }
  [[nodiscard]] std::size_t n_levels() const noexcept { return values_.size(); }
  [[nodiscard]] std::size_t dim() const noexcept { return values_.front().dim(); }
  [[nodiscard]] std::span<const Hypervector> features() const noexcept { return features_; }
  [[nodiscard]] std::span<const Hypervector> values() const noexcept { return values_; }
  [[nodiscard]] bool is_locked() const noexcept { return lock_.has_value(); }
  [[nodiscard]] const std::optional<LockMaterial>& lock() const noexcept { return lock_; }

  // term_count of the result is N.
  [[nodiscard]] Accumulator encode(const QuantizedSample& sample) const;
  [[nodiscard]] Hypervector encode_binary(const QuantizedSample& sample, const Rng& rng) const;

  void check_sample(const QuantizedSample& sample) const;

 private:
  std::vector<Hypervector> features_;
  std::vector<Hypervector> values_;
  std::optional<LockMaterial> lock_;
};

// Sum over products, computed one storage word at a time with bit-sliced
// counters. Exposed so the locked streaming path and tests can share it.
Accumulator accumulate_products(std::span<const Hypervector* const> lhs,
                                std::span<const Hypervector* const> rhs);

// Relative elementwise-multiply count of a locked encoder against the
// baseline: 1 for L = 1 (rotation is an offset read), L for L >= 2.
double encoding_cost(std::size_t layers, std::size_t n, std::size_t dim);

// Locked encoder that rebuilds every feature hypervector on the fly from the
// pool, reading rotated bases through offset windows rather than copying.
// Produces the same accumulators as Encoder::locked.
class StreamingLockedEncoder {
 public:
  StreamingLockedEncoder(const BasePool& pool, const LockKey& key, std::vector<Hypervector> values);

  [[nodiscard]] Accumulator encode(const QuantizedSample& sample) const;
  [[nodiscard]] std::size_t layers() const noexcept { return layers_; }

 private:
  std::size_t dim_;
  std::size_t layers_;
  std::size_t n_features_;
  // Base words plus one zero word so unaligned reads never run off the end.
  std::vector<std::vector<std::uint64_t>> bases_;
  std::vector<KeyEntry> entries_;
  std::vector<std::size_t> order_;
  std::vector<Hypervector> values_;
};

struct EncodeCostRow {
  std::size_t layers = 0;
  double modeled = 0.0;
  double measured_ratio = 0.0;
  double seconds_per_sample = 0.0;
};

struct EncodeBenchOptions {
  std::size_t n_features = 784;
  std::size_t dim = 10000;
  std::size_t levels = 2;
  std::size_t samples = 16;
  std::size_t repeats = 101;
  std::uint64_t seed = 1;
};

// Times the streaming encoder for each L against an identity-keyed baseline
// over the same pool size (P = N). Reports the median of per-repeat ratios.
std::vector<EncodeCostRow> benchmark_encoding(std::span<const std::size_t> layers,
                                              const EncodeBenchOptions& options);

}  // namespace hdlock
