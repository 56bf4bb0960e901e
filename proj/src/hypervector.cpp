#include "hdlock/hypervector.hpp"

#include <boost/multiprecision/cpp_int.hpp>

#include <bit>
#include <cmath>
#include <cstdlib>
#include <string>

#include "hdlock/error.hpp"

namespace hdlock {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kDimensionMismatch: return "dimension-mismatch";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kDegenerate: return "degenerate";
    case ErrorCode::kKeyValidation: return "key-validation";
    case ErrorCode::kConfig: return "config";
    case ErrorCode::kData: return "data";
    case ErrorCode::kFormat: return "format";
    case ErrorCode::kAmbiguity: return "ambiguity";
    case ErrorCode::kBudgetExceeded: return "budget-exceeded";
  }
  return "unknown";
}

namespace {

void require_dim(std::size_t dim) {
  if (dim == 0) detail::fail(ErrorCode::kInvalidArgument, "hypervector dimension must be >= 1");
}

void require_same(std::size_t a, std::size_t b, const char* op) {
  if (a != b) {
    detail::fail(ErrorCode::kDimensionMismatch, std::string(op) + ": dimension mismatch (" +
                                                    std::to_string(a) + " vs " +
                                                    std::to_string(b) + ")");
  }
}

// Reads n <= 64 bits starting at bit position pos; pos + n <= total bits.
std::uint64_t read_bits(std::span<const std::uint64_t> words, std::size_t pos, std::size_t n) {
  if (n == 0) return 0;
  const std::size_t w = pos / kWordBits;
  const std::size_t off = pos % kWordBits;
  std::uint64_t v = words[w] >> off;
  if (off != 0 && off + n > kWordBits) v |= words[w + 1] << (kWordBits - off);
  return n == kWordBits ? v : v & ((1ULL << n) - 1);
}

}  // namespace

Hypervector::Hypervector(std::size_t dim) : dim_(dim), words_(word_count(dim), 0) {
  require_dim(dim);
}

Hypervector Hypervector::ones(std::size_t dim) {
  Hypervector hv(dim);
  for (auto& w : hv.words_) w = ~0ULL;
  hv.clear_tail();
  return hv;
}

Hypervector Hypervector::from_bipolar(std::span<const int> elements) {
  Hypervector hv(elements.size());
  for (std::size_t i = 0; i < elements.size(); ++i) hv.set(i, elements[i]);
  return hv;
}

Hypervector Hypervector::from_words(std::size_t dim, std::span<const std::uint64_t> words) {
  Hypervector hv(dim);
  if (words.size() != hv.words_.size()) {
    detail::fail(ErrorCode::kDimensionMismatch, "from_words: expected " +
                                                    std::to_string(hv.words_.size()) +
                                                    " words, got " + std::to_string(words.size()));
  }
  std::copy(words.begin(), words.end(), hv.words_.begin());
  if ((hv.words_.back() & ~tail_mask(dim)) != 0) {
    detail::fail(ErrorCode::kFormat, "from_words: padding bits past dim are set");
  }
  return hv;
}

void Hypervector::set(std::size_t i, int value) {
  if (i >= dim_) detail::fail(ErrorCode::kOutOfRange, "hypervector index out of range");
  if (value != 1 && value != -1) {
    detail::fail(ErrorCode::kInvalidArgument, "hypervector elements must be +1 or -1");
  }
  const std::uint64_t mask = 1ULL << (i % kWordBits);
  if (value == 1) {
    words_[i / kWordBits] |= mask;
  } else {
    words_[i / kWordBits] &= ~mask;
  }
}

std::vector<int> Hypervector::to_bipolar() const {
  std::vector<int> out(dim_);
  for (std::size_t i = 0; i < dim_; ++i) out[i] = (*this)[i];
  return out;
}

void Hypervector::clear_tail() noexcept { words_.back() &= tail_mask(dim_); }

Accumulator::Accumulator(std::size_t dim) : elements_(dim, 0) { require_dim(dim); }

Accumulator::Accumulator(std::vector<std::int32_t> elements, std::size_t term_count)
    : elements_(std::move(elements)), term_count_(term_count) {
  require_dim(elements_.size());
  for (auto e : elements_) {
    if (static_cast<std::size_t>(std::abs(static_cast<std::int64_t>(e))) > term_count_) {
      detail::fail(ErrorCode::kInvalidArgument, "accumulator element exceeds term_count");
    }
  }
}

Hypervector random_hypervector(std::size_t dim, Rng& rng) {
  Hypervector hv(dim);
  for (auto& w : hv.mutable_words()) w = rng.next();
  hv.clear_tail();
  return hv;
}

Hypervector multiply(const Hypervector& a, const Hypervector& b) {
  require_same(a.dim(), b.dim(), "multiply");
  Hypervector out(a.dim());
  auto o = out.mutable_words();
  auto x = a.words();
  auto y = b.words();
  // Equal signs give +1, i.e. XNOR.
  for (std::size_t w = 0; w < o.size(); ++w) o[w] = ~(x[w] ^ y[w]);
  out.clear_tail();
  return out;
}

Hypervector negate(const Hypervector& a) {
  Hypervector out(a.dim());
  auto o = out.mutable_words();
  auto x = a.words();
  for (std::size_t w = 0; w < o.size(); ++w) o[w] = ~x[w];
  out.clear_tail();
  return out;
}

Hypervector rotate(const Hypervector& hv, std::size_t k) {
  const std::size_t dim = hv.dim();
  k %= dim;
  if (k == 0) return hv;
  Hypervector out(dim);
  auto src = hv.words();
  auto dst = out.mutable_words();
  for (std::size_t w = 0; w < dst.size(); ++w) {
    const std::size_t first_out = w * kWordBits;
    const std::size_t count = std::min(kWordBits, dim - first_out);
    const std::size_t start = (first_out + k) % dim;
    const std::size_t head = std::min(count, dim - start);
    std::uint64_t v = read_bits(src, start, head);
    if (head < count) v |= read_bits(src, 0, count - head) << head;
    dst[w] = v;
  }
  return out;
}

Accumulator to_accumulator(const Hypervector& hv) {
  Accumulator acc(hv.dim());
  add_into(acc, hv);
  return acc;
}

Accumulator add(const Accumulator& acc, const Hypervector& hv) {
  Accumulator out = acc;
  add_into(out, hv);
  return out;
}

void add_into(Accumulator& acc, const Hypervector& hv) {
  require_same(acc.dim(), hv.dim(), "add");
  auto e = acc.mutable_elements();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += hv[i];
  acc.set_term_count(acc.term_count() + 1);
}

void add_into(Accumulator& acc, const Accumulator& other) {
  require_same(acc.dim(), other.dim(), "add");
  auto e = acc.mutable_elements();
  auto f = other.elements();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] += f[i];
  acc.set_term_count(acc.term_count() + other.term_count());
}

Accumulator negate(const Accumulator& acc) {
  Accumulator out = acc;
  for (auto& e : out.mutable_elements()) e = -e;
  return out;
}

Accumulator multiply(const Accumulator& acc, const Hypervector& hv) {
  require_same(acc.dim(), hv.dim(), "multiply");
  Accumulator out = acc;
  auto e = out.mutable_elements();
  for (std::size_t i = 0; i < e.size(); ++i) e[i] *= hv[i];
  return out;
}

Hypervector binarize(const Accumulator& acc, const Rng& rng) {
  const std::size_t dim = acc.dim();
  const TieBreaker ties(rng);
  Hypervector out(dim);
  auto dst = out.mutable_words();
  auto e = acc.elements();
  for (std::size_t w = 0; w < dst.size(); ++w) {
    const std::size_t base = w * kWordBits;
    const std::size_t count = std::min(kWordBits, dim - base);
    std::uint64_t positive = 0;
    std::uint64_t zero = 0;
    for (std::size_t b = 0; b < count; ++b) {
      const std::int32_t v = e[base + b];
      positive |= static_cast<std::uint64_t>(v > 0) << b;
      zero |= static_cast<std::uint64_t>(v == 0) << b;
    }
    if (zero != 0) positive |= zero & ties.word(w);
    dst[w] = positive;
  }
  out.clear_tail();
  return out;
}

std::size_t hamming_count(const Hypervector& a, const Hypervector& b) {
  require_same(a.dim(), b.dim(), "hamming");
  auto x = a.words();
  auto y = b.words();
  std::size_t n = 0;
  for (std::size_t w = 0; w < x.size(); ++w) n += std::popcount(x[w] ^ y[w]);
  return n;
}

double hamming(const Hypervector& a, const Hypervector& b) {
  return static_cast<double>(hamming_count(a, b)) / static_cast<double>(a.dim());
}

std::int64_t dot(const Accumulator& a, const Accumulator& b) {
  require_same(a.dim(), b.dim(), "dot");
  auto x = a.elements();
  auto y = b.elements();
  std::int64_t s = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    s += static_cast<std::int64_t>(x[i]) * static_cast<std::int64_t>(y[i]);
  }
  return s;
}

double cosine_from_dots(std::int64_t ab, std::int64_t aa, std::int64_t bb) {
  if (aa == 0 || bb == 0) detail::fail(ErrorCode::kDegenerate, "cosine: zero-norm vector");
  // Collinear integer vectors get exactly +-1 rather than a rounded quotient.
  using Wide = boost::multiprecision::int128_t;
  if (Wide(ab) * ab == Wide(aa) * bb) return ab > 0 ? 1.0 : -1.0;
  return static_cast<double>(ab) /
         (std::sqrt(static_cast<double>(aa)) * std::sqrt(static_cast<double>(bb)));
}

double cosine(const Accumulator& a, const Accumulator& b) {
  require_same(a.dim(), b.dim(), "cosine");
  return cosine_from_dots(dot(a, b), dot(a, a), dot(b, b));
}

}  // namespace hdlock
