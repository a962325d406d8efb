#pragma once

// Flat key = value configuration. Every experiment starts from its own
// defaults; a config file and then command-line overrides are layered on
// top. Keys not present in the defaults are rejected, except per-check
// tolerance overrides "tol.<check>".

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "sqt/errors.hpp"

namespace sqt {

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v))
    throw config_error("config: key '" + key + "' expects a finite number, got '" + text + "'");
  return v;
}

/// Shortest text that reads back to the same double.
inline std::string format_double(double v) {
  char buf[40];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

}  // namespace detail

class Config {
 public:
  Config() = default;
  Config(std::initializer_list<std::pair<const std::string, std::string>> init) : values_(init) {}

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { values_[key] = detail::trim(value); }
  void set(const std::string& key, double value) { values_[key] = detail::format_double(value); }
  const std::map<std::string, std::string>& entries() const { return values_; }

  std::string get(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw config_error("config: missing key '" + key + "'");
    return it->second;
  }

  double get_double(const std::string& key) const { return detail::parse_double(key, get(key)); }

  int get_int(const std::string& key) const {
    const double v = get_double(key);
    if (v != std::floor(v) || std::abs(v) > 2e9)
      throw config_error("config: key '" + key + "' expects an integer, got '" + get(key) + "'");
    return static_cast<int>(v);
  }

  /// Comma-separated list of numbers.
  std::vector<double> get_list(const std::string& key) const {
    std::vector<double> out;
    std::stringstream ss(get(key));
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(detail::parse_double(key, item));
    if (out.empty()) throw config_error("config: key '" + key + "' expects a non-empty list");
    return out;
  }

  /// Applies `other` on top of this config. Unknown keys are rejected.
  void merge(const Config& other) {
    for (const auto& [k, v] : other.values_) {
      if (!has(k) && k.rfind("tol.", 0) != 0)
        throw config_error("config: unknown key '" + k + "'");
      values_[k] = v;
    }
  }

 private:
  std::map<std::string, std::string> values_;
};

/// Parses "key = value" lines. '#' starts a comment; blank lines are
/// skipped. A repeated key keeps the last value.
inline Config parse_config(std::istream& in, const std::string& source = "<config>") {
  Config cfg;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw config_error(source + ":" + std::to_string(lineno) + ": expected key = value");
    const std::string key = detail::trim(line.substr(0, eq));
    if (key.empty()) throw config_error(source + ":" + std::to_string(lineno) + ": empty key");
    cfg.set(key, line.substr(eq + 1));
  }
  return cfg;
}

inline Config load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("config: cannot open '" + path + "'");
  return parse_config(in, path);
}

}  // namespace sqt
