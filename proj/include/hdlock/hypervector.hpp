#pragma once

// Bipolar hypervectors and the multiply/add/permute operator set.
//
// Storage packs 64 elements per word with +1 <-> bit 1 and -1 <-> bit 0.
// Bits past dim() in the last word are always zero, so word-level equality and
// popcount are exact without masking at the call site.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hdlock/rng.hpp"

namespace hdlock {

inline constexpr std::size_t kWordBits = 64;

constexpr std::size_t word_count(std::size_t dim) noexcept {
  return (dim + kWordBits - 1) / kWordBits;
}

// Mask of valid bits in the last storage word.
constexpr std::uint64_t tail_mask(std::size_t dim) noexcept {
  const std::size_t rem = dim % kWordBits;
  return rem == 0 ? ~0ULL : (1ULL << rem) - 1;
}

class Hypervector {
 public:
  // All elements -1.
  explicit Hypervector(std::size_t dim);

  static Hypervector ones(std::size_t dim);
  static Hypervector from_bipolar(std::span<const int> elements);
  static Hypervector from_words(std::size_t dim, std::span<const std::uint64_t> words);

  [[nodiscard]] std::size_t dim() const noexcept { return dim_; }
  [[nodiscard]] std::span<const std::uint64_t> words() const noexcept { return words_; }
  [[nodiscard]] std::span<std::uint64_t> mutable_words() noexcept { return words_; }

  [[nodiscard]] int operator[](std::size_t i) const noexcept {
    return ((words_[i / kWordBits] >> (i % kWordBits)) & 1ULL) ? 1 : -1;
  }
  void set(std::size_t i, int value);

  [[nodiscard]] std::vector<int> to_bipolar() const;

  // Re-zero padding bits after raw word writes.
  void clear_tail() noexcept;

  friend bool operator==(const Hypervector&, const Hypervector&) = default;

 private:
  std::size_t dim_;
  std::vector<std::uint64_t> words_;
};

// Signed integer sum of term_count bipolar terms.
class Accumulator {
 public:
  explicit Accumulator(std::size_t dim);
  Accumulator(std::vector<std::int32_t> elements, std::size_t term_count);

  [[nodiscard]] std::size_t dim() const noexcept { return elements_.size(); }
  [[nodiscard]] std::size_t term_count() const noexcept { return term_count_; }
  [[nodiscard]] std::span<const std::int32_t> elements() const noexcept { return elements_; }
  [[nodiscard]] std::span<std::int32_t> mutable_elements() noexcept { return elements_; }
  [[nodiscard]] std::int32_t operator[](std::size_t i) const noexcept { return elements_[i]; }

  void set_term_count(std::size_t n) noexcept { term_count_ = n; }

  friend bool operator==(const Accumulator&, const Accumulator&) = default;

 private:
  std::vector<std::int32_t> elements_;
  std::size_t term_count_ = 0;
};

// Fair-coin elements; consumes word_count(dim) values from the stream.
Hypervector random_hypervector(std::size_t dim, Rng& rng);

Hypervector multiply(const Hypervector& a, const Hypervector& b);
Hypervector negate(const Hypervector& a);

// Element i of the result is element (i + k) mod D of the input.
Hypervector rotate(const Hypervector& hv, std::size_t k);

Accumulator to_accumulator(const Hypervector& hv);
Accumulator add(const Accumulator& acc, const Hypervector& hv);
void add_into(Accumulator& acc, const Hypervector& hv);
// Adds another accumulator elementwise; term counts add.
void add_into(Accumulator& acc, const Accumulator& other);
Accumulator negate(const Accumulator& acc);
// Elementwise acc * hv (sign flip where hv is -1).
Accumulator multiply(const Accumulator& acc, const Hypervector& hv);

// sign(acc); zero elements take a pseudo-random sign that depends only on
// (rng.seed(), rng.label(), element index). The rng cursor is not used.
Hypervector binarize(const Accumulator& acc, const Rng& rng);

// Tie-break bits used by binarize(): bit b of word(w) is the sign chosen for a
// zero at element 64*w + b.
class TieBreaker {
 public:
  explicit TieBreaker(const Rng& rng) : stream_(rng.fork("sign0")) {}
  [[nodiscard]] std::uint64_t word(std::size_t w) const noexcept { return stream_.at(w); }

 private:
  Rng stream_;
};

std::size_t hamming_count(const Hypervector& a, const Hypervector& b);
double hamming(const Hypervector& a, const Hypervector& b);

std::int64_t dot(const Accumulator& a, const Accumulator& b);
double cosine(const Accumulator& a, const Accumulator& b);

// Cosine from <a,b>, <a,a>, <b,b>; exactly +-1 when the vectors are collinear.
// Throws kDegenerate when either norm is zero.
double cosine_from_dots(std::int64_t ab, std::int64_t aa, std::int64_t bb);

}  // namespace hdlock
