#pragma once

// Unpacked reference implementations: one int per element, no bit tricks.
// Used as independent oracles for the packed code paths.

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace ref {

using Vec = std::vector<int>;
using Acc = std::vector<long>;

inline Vec multiply(const Vec& a, const Vec& b) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

inline Vec rotate(const Vec& a, std::size_t k) {
  Vec out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[(i + k) % a.size()];
  return out;
}

inline std::size_t hamming_count(const Vec& a, const Vec& b) {
  std::size_t n = 0;
  for (std::size_t i = 0; i < a.size(); ++i) n += a[i] != b[i];
  return n;
}

inline long dot(const Vec& a, const Vec& b) {
  long s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline void add_into(Acc& acc, const Vec& v) {
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += v[i];
}

// Independent re-derivation of the counter-based stream.
inline std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xCBF29CE484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001B3ULL;
  }
  return h;
}

inline std::uint64_t stream_value(std::uint64_t seed, const std::string& label, std::uint64_t i) {
  const std::uint64_t key = splitmix(seed ^ splitmix(fnv1a(label)));
  return splitmix(key + i * 0x9E3779B97F4A7C15ULL);
}

// Sign of each element; zeros take bit (i % 64) of tie word i / 64.
inline Vec binarize(const Acc& acc, std::uint64_t seed, const std::string& label) {
  Vec out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) {
    if (acc[i] > 0) {
      out[i] = 1;
    } else if (acc[i] < 0) {
      out[i] = -1;
    } else {
      const std::uint64_t word = stream_value(seed, label + "/sign0", i / 64);
      out[i] = (word >> (i % 64)) & 1 ? 1 : -1;
    }
  }
  return out;
}

}  // namespace ref
