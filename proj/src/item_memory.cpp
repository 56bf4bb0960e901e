#include "hdlock/item_memory.hpp"

#include <cmath>
#include <string>

#include "hdlock/error.hpp"

namespace hdlock {

std::vector<Hypervector> generate_feature_hvs(std::size_t n, std::size_t dim, Rng& rng) {
  if (n == 0) detail::fail(ErrorCode::kInvalidArgument, "feature count must be >= 1");
  std::vector<Hypervector> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) out.push_back(random_hypervector(dim, rng));
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> level_blocks(std::size_t m, std::size_t dim) {
  if (m < 2) detail::fail(ErrorCode::kInvalidArgument, "level count must be >= 2");
  if (dim < 2 * (m - 1)) {
    detail::fail(ErrorCode::kInvalidArgument,
                 "dimension " + std::to_string(dim) + " too small for " + std::to_string(m) +
                     " levels (need >= 2(M-1))");
  }
  const std::size_t span = dim / 2;
  const std::size_t steps = m - 1;
  const std::size_t base = span / steps;
  const std::size_t extra = span % steps;
  std::vector<std::pair<std::size_t, std::size_t>> blocks;
  blocks.reserve(steps);
  std::size_t first = 0;
  for (std::size_t j = 0; j < steps; ++j) {
    const std::size_t len = base + (j < extra ? 1 : 0);
    blocks.emplace_back(first, first + len);
    first += len;
  }
  return blocks;
}

std::vector<Hypervector> generate_value_hvs(std::size_t m, std::size_t dim, Rng& rng) {
  const auto blocks = level_blocks(m, dim);
  std::vector<Hypervector> out;
  out.reserve(m);
  out.push_back(random_hypervector(dim, rng));
  for (const auto& [first, last] : blocks) {
    Hypervector next = out.back();
    for (std::size_t i = first; i < last; ++i) next.set(i, -next[i]);
    out.push_back(std::move(next));
  }
  return out;
}

std::uint32_t quantize(double value, double v_min, double v_max, std::size_t m) {
  if (!(v_max > v_min)) detail::fail(ErrorCode::kInvalidArgument, "quantize: v_max must exceed v_min");
  if (m == 0) detail::fail(ErrorCode::kInvalidArgument, "quantize: level count must be >= 1");
  const double t = (value - v_min) / (v_max - v_min) * static_cast<double>(m);
  if (!(t > 0.0)) return 0;  // also catches NaN
  const double top = static_cast<double>(m - 1);
  const double level = std::floor(t);
  return static_cast<std::uint32_t>(level >= top ? top : level);
}

ItemMemory ItemMemory::generate(std::size_t n_features, std::size_t n_levels, std::size_t dim,
                                std::uint64_t seed) {
  const Rng root(seed, "item-memory");
  Rng fea_rng = root.fork("fea");
  Rng val_rng = root.fork("val");
  ItemMemory im;
  im.n_features = n_features;
  im.n_levels = n_levels;
  im.dim = dim;
  im.seed = seed;
  im.fea = generate_feature_hvs(n_features, dim, fea_rng);
  im.val = generate_value_hvs(n_levels, dim, val_rng);
  return im;
}

}  // namespace hdlock
