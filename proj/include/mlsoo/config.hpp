#pragma once

// Flat `key = value` config files mirroring RunConfig. Blank lines and lines
// starting with '#' are ignored; unknown keys are errors.

#include "mlsoo/errors.hpp"
#include "mlsoo/harness.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <string_view>

namespace mlsoo {

namespace detail {

inline std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos)
    return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

inline std::size_t parse_count(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto* end = v.data() + v.size();
  auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc{} || ptr != end)
    throw ConfigError("config key '" + key + "' expects a nonnegative integer, got '" + v + "'");
  return out;
}

inline double parse_double(const std::string& key, const std::string& v) {
  char* end = nullptr;
  const double out = std::strtod(v.c_str(), &end);
  if (v.empty() || *end != '\0')
    throw ConfigError("config key '" + key + "' expects a number, got '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes")
    return true;
  if (v == "false" || v == "0" || v == "no")
    return false;
  throw ConfigError("config key '" + key + "' expects a boolean, got '" + v + "'");
}

} // namespace detail

/// Reads `key = value` pairs; later duplicates override earlier ones.
inline std::map<std::string, std::string> read_key_values(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const std::string t = detail::trim(line);
    if (t.empty() || t.front() == '#')
      continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) + " is not 'key = value'");
    const std::string key = detail::trim(std::string_view(t).substr(0, eq));
    if (key.empty())
      throw ConfigError("config line " + std::to_string(lineno) + " has an empty key");
    kv[key] = detail::trim(std::string_view(t).substr(eq + 1));
  }
  return kv;
}

/// Applies one config key to `cfg`.
inline void apply_config_key(RunConfig& cfg, const std::string& key, const std::string& v) {
  using namespace detail;
  if (key == "problem")
    cfg.problem = parse_problem(v);
  else if (key == "algorithm" || key == "algo")
    cfg.algorithm = parse_algorithm(v);
  else if (key == "budget")
    cfg.budget = parse_count(key, v);
  else if (key == "w")
    cfg.schedule.w = parse_double(key, v);
  else if (key == "p")
    cfg.schedule.p = parse_double(key, v);
  else if (key == "K")
    cfg.schedule.K = parse_count(key, v);
  else if (key == "max_level")
    cfg.schedule.max_level = parse_count(key, v);
  else if (key == "baseline_dims")
    cfg.baseline_dims = parse_count(key, v);
  else if (key == "baseline_lower")
    cfg.baseline_lower = parse_double(key, v);
  else if (key == "baseline_upper")
    cfg.baseline_upper = parse_double(key, v);
  else if (key == "catenary_height")
    cfg.catenary_height = parse_double(key, v);
  else if (key == "reuse_center")
    cfg.reuse_center = parse_bool(key, v);
  else if (key == "regret")
    cfg.regret = parse_bool(key, v);
  else if (key == "out" || key == "trace_out")
    cfg.trace_out = v;
  else if (key == "solution_out")
    cfg.solution_out = v;
  else
    throw ConfigError("unknown config key '" + key + "'");
}

inline RunConfig parse_config(std::istream& is, RunConfig base = {}) {
  for (const auto& [k, v] : read_key_values(is))
    apply_config_key(base, k, v);
  return base;
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
  std::ifstream is(path);
  if (!is)
    throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(is, std::move(base));
}

} // namespace mlsoo
