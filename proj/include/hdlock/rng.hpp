#pragma once

// Counter-based random streams. A stream is identified by (seed, label); the
// value at position i is a pure function of (seed, label, i), so results do not
// depend on thread schedule or evaluation order.

#include <cstdint>
#include <string>
#include <string_view>

namespace hdlock {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// FNV-1a over the label bytes.
constexpr std::uint64_t hash_label(std::string_view label) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : label) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

class Rng {
 public:
  Rng(std::uint64_t seed, std::string_view label)
      : seed_(seed), label_(label), key_(mix64(seed ^ mix64(hash_label(label)))) {}

  // Child stream whose label is "<parent>/<child>".
  [[nodiscard]] Rng fork(std::string_view child) const {
    std::string label = label_;
    label += '/';
    label += child;
    return Rng(seed_, label);
  }
  [[nodiscard]] Rng fork(std::uint64_t ordinal) const { return fork(std::to_string(ordinal)); }

  // Value at an absolute stream position; does not advance the cursor.
  [[nodiscard]] std::uint64_t at(std::uint64_t index) const noexcept {
    return mix64(key_ + index * 0x9E3779B97F4A7C15ULL);
  }

  std::uint64_t next() noexcept { return at(cursor_++); }

  // Unbiased draw from [0, bound); bound must be nonzero.
  std::uint64_t uniform(std::uint64_t bound) noexcept {
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next();
      if (r >= threshold) return r % bound;
    }
  }

  // Uniform double in [0, 1) with 53 random bits.
  double unit() noexcept { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] const std::string& label() const noexcept { return label_; }
  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t cursor() const noexcept { return cursor_; }

 private:
  std::uint64_t seed_;
  std::string label_;
  std::uint64_t key_;
  std::uint64_t cursor_ = 0;
};

}  // namespace hdlock
