#pragma once

// Real-valued datasets: synthetic generation, CSV and IDX loaders, and
// quantization onto M levels using the dataset-wide value range.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "hdlock/model.hpp"
#include "hdlock/rng.hpp"

namespace hdlock {

struct Dataset {
  std::string name;
  std::size_t n_features = 0;
  std::size_t n_classes = 0;
  // Row-major, n_features values per sample.
  std::vector<float> values;
  std::vector<std::uint32_t> labels;
  double v_min = 0.0;
  double v_max = 1.0;
  // label_names[c] is the original label text of dense class c.
  std::vector<std::string> label_names;

  [[nodiscard]] std::size_t size() const noexcept { return labels.size(); }
  [[nodiscard]] std::span<const float> row(std::size_t i) const {
    return std::span(values).subspan(i * n_features, n_features);
  }
  // Recomputes v_min/v_max over every feature cell; throws if they coincide.
  void refresh_range();
};

struct SyntheticDataset {
  Dataset data;
  // prototypes[c] holds class c's grid values (integers 0..grid_levels-1).
  std::vector<std::vector<std::uint32_t>> prototypes;
  std::size_t grid_levels = 0;
  double noise = 0.0;
  std::uint64_t seed = 0;
};

// Per feature, the grid levels are shuffled and class c takes shuffled[c mod
// grid_levels], so prototypes of different classes disagree on every feature
// while C <= grid_levels.
std::vector<std::vector<std::uint32_t>> synthetic_prototypes(std::size_t n_features,
                                                             std::size_t n_classes,
                                                             std::size_t grid_levels, Rng& rng);

// Each sample copies its prototype and redraws round(noise * N) distinct
// features uniformly from the grid. Samples are class-major.
Dataset sample_prototypes(const std::vector<std::vector<std::uint32_t>>& prototypes,
                          std::size_t samples_per_class, double noise, std::size_t grid_levels,
                          Rng& rng);

// noise must lie in [0, 0.5).
SyntheticDataset generate_synthetic(std::size_t n_features, std::size_t n_classes,
                                    std::size_t samples_per_class, double noise,
                                    std::size_t grid_levels, Rng& rng);

struct CsvOptions {
  // Column holding the label; negative counts from the end (-1 = last).
  long label_column = -1;
  bool header = false;
};

// Labels are re-indexed densely (numeric order when every label parses as a
// number, text order otherwise); label_names keeps the mapping.
Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options = {});

// Writes "f0,...,f{N-1},label" with shortest round-trip values and dense labels.
std::string to_csv(const Dataset& data);

// IDX images (magic 0x00000803) and labels (0x00000801), big-endian header.
Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels);

// Quantizes every cell with the given range (defaults to the dataset's own).
LabeledSet quantize_dataset(const Dataset& data, std::size_t levels);
LabeledSet quantize_dataset(const Dataset& data, std::size_t levels, double v_min, double v_max);

// Mean fraction of features on which two prototypes quantize to different
// levels, over all prototype pairs.
double prototype_separation(const std::vector<std::vector<std::uint32_t>>& prototypes,
                            std::size_t grid_levels, std::size_t levels);

}  // namespace hdlock
