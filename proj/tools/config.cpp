#include "config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "hdlock/error.hpp"
#include "hdlock/rng.hpp"

namespace hdlock::cli {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"run.seed", "1"},
      {"run.threads", "0"},
      {"model.dim", "4096"},
      {"model.levels", "8"},
      {"model.mode", "binary"},
      {"lock.layers", "0"},
      {"lock.pool_size", "0"},
      {"data.n_features", "128"},
      {"data.classes", "4"},
      {"data.samples_per_class", "200"},
      {"data.test_per_class", "50"},
      {"data.noise", "0.2"},
      {"data.label_column", "-1"},
      {"data.header", "true"},
      {"attack.ambiguity_tolerance", "0"},
      {"attack.trace_cap", "200000"},
      {"attack.exhaustive_budget", "1000000"},
  };
  return d;
}

std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return std::string(s);
}

[[noreturn]] void bad(const std::string& message) { detail::fail(ErrorCode::kConfig, message); }

}  // namespace

Config::Config() : values_(defaults()) {}

void Config::assign(const std::string& key, std::string value, const std::string& where) {
  if (!defaults().contains(key)) bad(where + ": unknown key '" + key + "'");
  values_[key] = std::move(value);
}

void Config::merge_text(std::string_view text, const std::string& source) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::string section;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const std::string where = source + ":" + std::to_string(number);
    std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') bad(where + ": malformed section header");
      section = trim(std::string_view(t).substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) bad(where + ": expected key=value");
    const std::string key = trim(std::string_view(t).substr(0, eq));
    const std::string full = section.empty() ? key : section + "." + key;
    assign(full, trim(std::string_view(t).substr(eq + 1)), where);
  }
}

void Config::merge_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) bad("cannot read config file " + path);
  std::ostringstream text;
  text << in.rdbuf();
  merge_text(text.str(), path);
}

void Config::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) bad("--set expects section.key=value, got '" + std::string(assignment) + "'");
  assign(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)), "--set");
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) bad("missing key '" + key + "'");
  return it->second;
}

std::uint64_t Config::get_uint(const std::string& key) const {
  const std::string& v = get(key);
  std::uint64_t out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key + ": expected a non-negative integer, got '" + v + "'");
  return out;
}

long Config::get_int(const std::string& key) const {
  const std::string& v = get(key);
  long out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key + ": expected an integer, got '" + v + "'");
  return out;
}

double Config::get_double(const std::string& key) const {
  const std::string& v = get(key);
  double out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key + ": expected a number, got '" + v + "'");
  return out;
}

bool Config::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  bad(key + ": expected true or false, got '" + v + "'");
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
  return out;
}

std::string Config::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(hash_label(canonical())));
  return buf;
}

RunConfig resolve(const Config& c) {
  RunConfig r;
  r.seed = c.get_uint("run.seed");
  r.threads = c.get_uint("run.threads");
  r.dim = c.get_uint("model.dim");
  r.levels = c.get_uint("model.levels");
  r.mode = parse_mode(c.get("model.mode"));
  r.layers = c.get_uint("lock.layers");
  r.pool_size = c.get_uint("lock.pool_size");
  r.n_features = c.get_uint("data.n_features");
  r.classes = c.get_uint("data.classes");
  r.samples_per_class = c.get_uint("data.samples_per_class");
  r.test_per_class = c.get_uint("data.test_per_class");
  r.noise = c.get_double("data.noise");
  r.label_column = c.get_int("data.label_column");
  r.header = c.get_bool("data.header");
  r.ambiguity_tolerance = c.get_double("attack.ambiguity_tolerance");
  r.trace_cap = c.get_uint("attack.trace_cap");
  r.exhaustive_budget = c.get_uint("attack.exhaustive_budget");

  if (r.dim < 2) bad("model.dim must be >= 2");
  if (r.levels < 2) bad("model.levels must be >= 2");
  if (r.dim < 2 * (r.levels - 1)) bad("model.dim too small for model.levels level blocks");
  if ((r.layers == 0) != (r.pool_size == 0)) {
    bad("lock.layers and lock.pool_size must both be set (locked) or both be 0 (unlocked)");
  }
  if (r.n_features == 0 || r.classes == 0) bad("data.n_features and data.classes must be >= 1");
  if (!(r.noise >= 0.0 && r.noise < 0.5)) bad("data.noise must lie in [0, 0.5)");
  if (r.ambiguity_tolerance < 0.0) bad("attack.ambiguity_tolerance must be >= 0");
  return r;
}

}  // namespace hdlock::cli
