#pragma once

// HDLock keys: each feature hypervector is the product of L rotated base
// hypervectors drawn from a public pool of P bases. The key (which bases, which
// rotations) is the secret.

#include <boost/multiprecision/cpp_int.hpp>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hdlock/hypervector.hpp"
#include "hdlock/rng.hpp"

namespace hdlock {

using BigInt = boost::multiprecision::cpp_int;

struct BasePool {
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<Hypervector> bases;

  [[nodiscard]] std::size_t size() const noexcept { return bases.size(); }

  // Bases come from Rng(seed, "base-pool").
  static BasePool generate(std::size_t p, std::size_t dim, std::uint64_t seed);
};

struct KeyEntry {
  std::uint32_t base = 0;
  std::uint32_t rotation = 0;
  friend bool operator==(const KeyEntry&, const KeyEntry&) = default;
};

class LockKey {
 public:
  LockKey(std::size_t n_features, std::size_t layers, std::size_t pool_size, std::size_t dim,
          std::vector<KeyEntry> entries);

  // L=1 key with base i, rotation 0 for feature i (P = N).
  static LockKey identity(std::size_t n_features, std::size_t dim);

  [[nodiscard]] std::size_t n_features() const noexcept { return n_features_; }
  [[nodiscard]] std::size_t layers() const noexcept { return layers_; }
  [[nodiscard]] std::size_t pool_size() const noexcept { return pool_size_; }
  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::span<const KeyEntry> entries() const noexcept { return entries_; }
  [[nodiscard]] std::span<const KeyEntry> sub_key(std::size_t feature) const {
    return std::span(entries_).subspan(feature * layers_, layers_);
  }
  [[nodiscard]] const KeyEntry& at(std::size_t feature, std::size_t layer) const {
    return entries_[feature * layers_ + layer];
  }
  KeyEntry& at(std::size_t feature, std::size_t layer) { return entries_[feature * layers_ + layer]; }

  friend bool operator==(const LockKey&, const LockKey&) = default;

 private:
  std::size_t n_features_;
  std::size_t layers_;
  std::size_t pool_size_;
  std::size_t dim_;
  std::vector<KeyEntry> entries_;  // feature-major, N*L
};

// Uniform entries; a pair that repeats within its sub-key is redrawn.
LockKey generate_key(std::size_t n, std::size_t layers, std::size_t p, std::size_t dim, Rng& rng);

struct KeyViolation {
  std::size_t feature = 0;
  std::size_t layer = 0;
  std::string reason;
};

// Empty result means the key is usable with the pool.
std::vector<KeyViolation> validate_key(const LockKey& key, const BasePool& pool);

// Throws kKeyValidation listing the first violations when validate_key fails.
void require_valid_key(const LockKey& key, const BasePool& pool);

// Product over layers of rotate(pool[base], rotation).
Hypervector derive_feature_hv(std::span<const KeyEntry> sub_key, const BasePool& pool);
std::vector<Hypervector> derive_locked_feature_hvs(const BasePool& pool, const LockKey& key);

// Key file: "HDLK", u16 version, N L P D (u32), N*L (base, rotation) u32
// pairs feature-major, CRC-32C trailer. All little-endian.
inline constexpr std::uint16_t kKeyFileVersion = 1;
std::vector<std::uint8_t> serialize_key(const LockKey& key);
LockKey deserialize_key(std::span<const std::uint8_t> bytes);

// N * (D*P)^L: guesses to recover every locked feature hypervector.
BigInt attack_complexity(std::uint64_t n, std::uint64_t dim, std::uint64_t p, std::uint64_t layers);
// (D*P)^L: guesses for a single feature.
BigInt per_feature_guesses(std::uint64_t dim, std::uint64_t p, std::uint64_t layers);
// N^2: the divide-and-conquer attack on an unlocked model.
BigInt baseline_complexity(std::uint64_t n);

// Rounds to `digits` significant figures, formatted "4.81e16".
std::string to_scientific(const BigInt& value, unsigned digits);

}  // namespace hdlock
