#pragma once

// Flat key=value configuration with [section] headers. Keys are addressed as
// "section.key"; later assignments win, and --set overrides apply last.

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hdlock/encoder.hpp"

namespace hdlock::cli {

class Config {
 public:
  // Starts from the built-in defaults.
  Config();

  void merge_text(std::string_view text, const std::string& source);
  void merge_file(const std::string& path);
  // "section.key=value".
  void set(std::string_view assignment);

  [[nodiscard]] const std::string& get(const std::string& key) const;
  [[nodiscard]] std::uint64_t get_uint(const std::string& key) const;
  [[nodiscard]] long get_int(const std::string& key) const;
  [[nodiscard]] double get_double(const std::string& key) const;
  [[nodiscard]] bool get_bool(const std::string& key) const;

  // Sorted "key=value" lines; the config hash is taken over this text.
  [[nodiscard]] std::string canonical() const;
  [[nodiscard]] std::string hash() const;

 private:
  void assign(const std::string& key, std::string value, const std::string& where);

  std::map<std::string, std::string> values_;
};

struct RunConfig {
  std::uint64_t seed = 1;
  std::size_t threads = 0;
  std::size_t dim = 4096;
  std::size_t levels = 8;
  EncodeMode mode = EncodeMode::kBinary;
  std::size_t layers = 0;     // 0 = unlocked
  std::size_t pool_size = 0;  // P
  std::size_t n_features = 128;
  std::size_t classes = 4;
  std::size_t samples_per_class = 200;
  std::size_t test_per_class = 50;
  double noise = 0.2;
  long label_column = -1;
  bool header = true;
  double ambiguity_tolerance = 0.0;
  std::size_t trace_cap = 200000;
  std::uint64_t exhaustive_budget = 1000000;

  [[nodiscard]] bool locked() const noexcept { return layers != 0; }
};

// Validates ranges and cross-field consistency; throws kConfig.
RunConfig resolve(const Config& config);

}  // namespace hdlock::cli
