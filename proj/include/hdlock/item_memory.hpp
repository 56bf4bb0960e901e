#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hdlock/hypervector.hpp"
#include "hdlock/rng.hpp"

namespace hdlock {

// Per-feature level indices in [0, M).
using QuantizedSample = std::vector<std::uint32_t>;

// N independent random feature hypervectors.
std::vector<Hypervector> generate_feature_hvs(std::size_t n, std::size_t dim, Rng& rng);

// M level hypervectors. The first floor(D/2) positions are split into M-1
// disjoint blocks; level j is level j-1 with block j-1 negated, so
// hamming(val[a], val[b]) is exactly linear in |a-b| up to block rounding.
std::vector<Hypervector> generate_value_hvs(std::size_t m, std::size_t dim, Rng& rng);

// Block boundaries used by generate_value_hvs: blocks()[j] is the half-open
// range [first, second) negated when stepping from level j to j+1.
std::vector<std::pair<std::size_t, std::size_t>> level_blocks(std::size_t m, std::size_t dim);

// Floor quantizer onto [0, M) with both ends clamped.
std::uint32_t quantize(double value, double v_min, double v_max, std::size_t m);

struct ItemMemory {
  std::size_t n_features = 0;
  std::size_t n_levels = 0;
  std::size_t dim = 0;
  std::uint64_t seed = 0;
  std::vector<Hypervector> fea;
  std::vector<Hypervector> val;

  // Feature and value vectors come from the "fea" and "val" children of
  // Rng(seed, "item-memory").
  static ItemMemory generate(std::size_t n_features, std::size_t n_levels, std::size_t dim,
                             std::uint64_t seed);
};

}  // namespace hdlock
