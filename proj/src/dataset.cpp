#include "hdlock/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <sstream>

#include "hdlock/binary_io.hpp"
#include "hdlock/error.hpp"
#include "hdlock/item_memory.hpp"

namespace hdlock {

namespace {

void shuffle_in_place(std::vector<std::uint32_t>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[rng.uniform(i)]);
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_commas(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  for (;;) {
    const std::size_t comma = line.find(',', start);
    cells.push_back(trim(line.substr(start, comma == std::string_view::npos ? comma : comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return cells;
}

bool parse_double(std::string_view text, double& out) {
  if (text.empty()) return false;
  if (text.front() == '+') text.remove_prefix(1);
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
  return ec == std::errc() && ptr == text.data() + text.size() && std::isfinite(out);
}

// Dense re-indexing of raw label strings.
void assign_labels(Dataset& data, const std::vector<std::string>& raw) {
  std::vector<std::string> distinct(raw.begin(), raw.end());
  std::sort(distinct.begin(), distinct.end());
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  const bool numeric = std::all_of(distinct.begin(), distinct.end(), [](const std::string& s) {
    double v = 0;
    return parse_double(s, v);
  });
  if (numeric) {
    std::stable_sort(distinct.begin(), distinct.end(), [](const std::string& a, const std::string& b) {
      double x = 0, y = 0;
      parse_double(a, x);
      parse_double(b, y);
      return x < y;
    });
  }
  std::map<std::string, std::uint32_t> index;
  for (std::size_t c = 0; c < distinct.size(); ++c) index[distinct[c]] = static_cast<std::uint32_t>(c);
  data.labels.clear();
  data.labels.reserve(raw.size());
  for (const auto& r : raw) data.labels.push_back(index.at(r));
  data.label_names = std::move(distinct);
  data.n_classes = data.label_names.size();
}

std::uint32_t read_be32(std::span<const std::uint8_t> bytes, std::size_t offset) {
  return (std::uint32_t{bytes[offset]} << 24) | (std::uint32_t{bytes[offset + 1]} << 16) |
         (std::uint32_t{bytes[offset + 2]} << 8) | std::uint32_t{bytes[offset + 3]};
}

}  // namespace

void Dataset::refresh_range() {
  if (values.empty()) detail::fail(ErrorCode::kData, "dataset '" + name + "' has no feature values");
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  v_min = *lo;
  v_max = *hi;
  if (!(v_max > v_min)) {
    detail::fail(ErrorCode::kData, "dataset '" + name + "' has a constant value range");
  }
}

std::vector<std::vector<std::uint32_t>> synthetic_prototypes(std::size_t n_features,
                                                             std::size_t n_classes,
                                                             std::size_t grid_levels, Rng& rng) {
  if (n_features == 0 || n_classes == 0) {
    detail::fail(ErrorCode::kInvalidArgument, "synthetic data needs N >= 1 and C >= 1");
  }
  if (grid_levels < 2) detail::fail(ErrorCode::kInvalidArgument, "synthetic grid needs >= 2 levels");
  std::vector<std::vector<std::uint32_t>> protos(n_classes, std::vector<std::uint32_t>(n_features));
  std::vector<std::uint32_t> grid(grid_levels);
  for (std::size_t i = 0; i < n_features; ++i) {
    std::iota(grid.begin(), grid.end(), 0U);
    shuffle_in_place(grid, rng);
    for (std::size_t c = 0; c < n_classes; ++c) protos[c][i] = grid[c % grid_levels];
  }
  return protos;
}

Dataset sample_prototypes(const std::vector<std::vector<std::uint32_t>>& prototypes,
                          std::size_t samples_per_class, double noise, std::size_t grid_levels,
                          Rng& rng) {
  if (!(noise >= 0.0 && noise < 0.5)) {
    detail::fail(ErrorCode::kInvalidArgument, "noise must lie in [0, 0.5)");
  }
  if (prototypes.empty() || samples_per_class == 0) {
    detail::fail(ErrorCode::kInvalidArgument, "synthetic data needs prototypes and samples_per_class >= 1");
  }
  const std::size_t n = prototypes.front().size();
  const auto redraw = static_cast<std::size_t>(std::llround(noise * static_cast<double>(n)));
  Dataset data;
  data.name = "synthetic";
  data.n_features = n;
  data.n_classes = prototypes.size();
  data.values.reserve(prototypes.size() * samples_per_class * n);
  std::vector<std::uint32_t> order(n);
  for (std::size_t c = 0; c < prototypes.size(); ++c) {
    for (std::size_t s = 0; s < samples_per_class; ++s) {
      std::vector<std::uint32_t> sample = prototypes[c];
      // Partial Fisher-Yates picks `redraw` distinct positions.
      std::iota(order.begin(), order.end(), 0U);
      for (std::size_t k = 0; k < redraw; ++k) {
        std::swap(order[k], order[k + rng.uniform(n - k)]);
        sample[order[k]] = static_cast<std::uint32_t>(rng.uniform(grid_levels));
      }
      for (auto v : sample) data.values.push_back(static_cast<float>(v));
      data.labels.push_back(static_cast<std::uint32_t>(c));
    }
  }
  for (std::size_t c = 0; c < prototypes.size(); ++c) data.label_names.push_back(std::to_string(c));
  data.v_min = 0.0;
  data.v_max = static_cast<double>(grid_levels - 1);
  return data;
}

SyntheticDataset generate_synthetic(std::size_t n_features, std::size_t n_classes,
                                    std::size_t samples_per_class, double noise,
                                    std::size_t grid_levels, Rng& rng) {
  if (!(noise >= 0.0 && noise < 0.5)) {
    detail::fail(ErrorCode::kInvalidArgument, "noise must lie in [0, 0.5)");
  }
  SyntheticDataset out;
  Rng proto_rng = rng.fork("prototypes");
  Rng sample_rng = rng.fork("samples");
  out.prototypes = synthetic_prototypes(n_features, n_classes, grid_levels, proto_rng);
  out.data = sample_prototypes(out.prototypes, samples_per_class, noise, grid_levels, sample_rng);
  out.grid_levels = grid_levels;
  out.noise = noise;
  out.seed = rng.seed();
  return out;
}

Dataset load_csv(const std::filesystem::path& path, const CsvOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) detail::fail(ErrorCode::kData, "cannot open CSV file " + path.string());
  Dataset data;
  data.name = path.filename().string();
  std::vector<std::string> raw_labels;
  std::string line;
  std::size_t row = 0;
  std::size_t columns = 0;
  std::size_t label_index = 0;
  while (std::getline(in, line)) {
    ++row;
    if (trim(line).empty()) continue;
    if (options.header && row == 1) continue;
    const auto cells = split_commas(line);
    if (columns == 0) {
      columns = cells.size();
      const long idx = options.label_column < 0 ? static_cast<long>(columns) + options.label_column
                                                : options.label_column;
      if (idx < 0 || idx >= static_cast<long>(columns) || columns < 2) {
        detail::fail(ErrorCode::kData, "row " + std::to_string(row) + ": label column " +
                                           std::to_string(options.label_column) + " missing (" +
                                           std::to_string(columns) + " columns)");
      }
      label_index = static_cast<std::size_t>(idx);
      data.n_features = columns - 1;
    }
    if (cells.size() != columns) {
      detail::fail(ErrorCode::kData, "row " + std::to_string(row) + ": expected " +
                                         std::to_string(columns) + " columns, found " +
                                         std::to_string(cells.size()));
    }
    for (std::size_t c = 0; c < columns; ++c) {
      if (c == label_index) {
        if (cells[c].empty()) detail::fail(ErrorCode::kData, "row " + std::to_string(row) + ": empty label");
        raw_labels.emplace_back(cells[c]);
        continue;
      }
      double v = 0;
      if (!parse_double(cells[c], v)) {
        detail::fail(ErrorCode::kData, "row " + std::to_string(row) + ", column " +
                                           std::to_string(c + 1) + ": non-numeric cell '" +
                                           std::string(cells[c]) + "'");
      }
      data.values.push_back(static_cast<float>(v));
    }
  }
  if (raw_labels.empty()) detail::fail(ErrorCode::kData, "CSV file " + path.string() + " has no data rows");
  assign_labels(data, raw_labels);
  data.refresh_range();
  return data;
}

std::string to_csv(const Dataset& data) {
  std::string out;
  for (std::size_t i = 0; i < data.n_features; ++i) out += "f" + std::to_string(i) + ",";
  out += "label\n";
  char buf[32];
  for (std::size_t s = 0; s < data.size(); ++s) {
    for (float v : data.row(s)) {
      const auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out.append(buf, res.ptr);
      out += ',';
    }
    out += std::to_string(data.labels[s]);
    out += '\n';
  }
  return out;
}

Dataset load_idx(const std::filesystem::path& images, const std::filesystem::path& labels) {
  const auto img = io::read_file(images);
  const auto lab = io::read_file(labels);
  if (img.size() < 16 || read_be32(img, 0) != 0x00000803) {
    detail::fail(ErrorCode::kFormat, images.string() + ": bad IDX image magic (expected 0x00000803)");
  }
  if (lab.size() < 8 || read_be32(lab, 0) != 0x00000801) {
    detail::fail(ErrorCode::kFormat, labels.string() + ": bad IDX label magic (expected 0x00000801)");
  }
  const std::size_t count = read_be32(img, 4);
  const std::size_t rows = read_be32(img, 8);
  const std::size_t cols = read_be32(img, 12);
  const std::size_t label_count = read_be32(lab, 4);
  if (count != label_count) {
    detail::fail(ErrorCode::kData, "IDX image count " + std::to_string(count) +
                                       " differs from label count " + std::to_string(label_count));
  }
  const std::size_t n = rows * cols;
  if (n == 0) detail::fail(ErrorCode::kFormat, images.string() + ": zero-sized images");
  if (img.size() - 16 < count * n) detail::fail(ErrorCode::kFormat, images.string() + ": truncated payload");
  if (lab.size() - 8 < count) detail::fail(ErrorCode::kFormat, labels.string() + ": truncated payload");

  Dataset data;
  data.name = images.filename().string();
  data.n_features = n;
  data.values.assign(img.begin() + 16, img.begin() + 16 + static_cast<std::ptrdiff_t>(count * n));
  std::vector<std::string> raw;
  raw.reserve(count);
  for (std::size_t i = 0; i < count; ++i) raw.push_back(std::to_string(lab[8 + i]));
  assign_labels(data, raw);
  data.v_min = 0.0;
  data.v_max = 255.0;
  return data;
}

LabeledSet quantize_dataset(const Dataset& data, std::size_t levels) {
  return quantize_dataset(data, levels, data.v_min, data.v_max);
}

LabeledSet quantize_dataset(const Dataset& data, std::size_t levels, double v_min, double v_max) {
  LabeledSet out;
  out.samples.reserve(data.size());
  for (std::size_t s = 0; s < data.size(); ++s) {
    QuantizedSample q;
    q.reserve(data.n_features);
    for (float v : data.row(s)) q.push_back(quantize(v, v_min, v_max, levels));
    out.samples.push_back(std::move(q));
  }
  out.labels = data.labels;
  return out;
}

double prototype_separation(const std::vector<std::vector<std::uint32_t>>& prototypes,
                            std::size_t grid_levels, std::size_t levels) {
  if (prototypes.size() < 2) return 1.0;
  const double top = static_cast<double>(grid_levels - 1);
  double total = 0.0;
  std::size_t pairs = 0;
  for (std::size_t a = 0; a < prototypes.size(); ++a) {
    for (std::size_t b = a + 1; b < prototypes.size(); ++b) {
      std::size_t differ = 0;
      for (std::size_t i = 0; i < prototypes[a].size(); ++i) {
        differ += quantize(prototypes[a][i], 0.0, top, levels) != quantize(prototypes[b][i], 0.0, top, levels);
      }
      total += static_cast<double>(differ) / static_cast<double>(prototypes[a].size());
      ++pairs;
    }
  }
  return total / static_cast<double>(pairs);
}

}  // namespace hdlock
