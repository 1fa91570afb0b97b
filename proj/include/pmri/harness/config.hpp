#pragma once

#include <map>
#include <string>
#include <vector>

namespace pmri {

/// Flat dotted-key configuration. Text form is `key = value` per line with `#` comments and optional
/// `[section]` headers that prefix the following keys; a JSON object is accepted and flattened to the same keys.
class Config
{
public:
  static Config parse(std::string const &text);
  static Config parse_json(std::string const &text);
  /// Picks JSON when the first non-blank character is '{'.
  static Config load(std::string const &path);

  bool has(std::string const &key) const { return values_.count(key) != 0; }
  void set(std::string const &key, std::string value) { values_[key] = std::move(value); }

  std::string get(std::string const &key, std::string const &fallback) const;
  double get_double(std::string const &key, double fallback) const;
  long long get_int(std::string const &key, long long fallback) const;
  bool get_bool(std::string const &key, bool fallback) const;
  /// Comma-separated list with surrounding blanks trimmed.
  std::vector<std::string> get_list(std::string const &key, std::vector<std::string> const &fallback) const;

  std::map<std::string, std::string> const &values() const { return values_; }
  /// Canonical `key = value` text, keys sorted.
  std::string to_text() const;

private:
  std::map<std::string, std::string> values_;
};

} // namespace pmri
