#pragma once

#include <map>
#include <string>
#include <vector>

#include "splbm/errors.hpp"

namespace splbm {

/// Plain-text `key = value` configuration with dotted section keys and `#`
/// comments. Later assignments override earlier ones, so command-line flags
/// can be layered on top of a file.
class Config {
 public:
  Config() = default;

  static Config parse(const std::string& text);
  static Config parse_file(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool has(const std::string& key) const { return values_.count(key) != 0; }

  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::string require_string(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long get_long(const std::string& key, long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Comma-separated list; empty when absent.
  std::vector<std::string> get_list(const std::string& key) const;

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace splbm
