#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace rmt {

/// Flat string-keyed configuration. Parsed either from `key = value` text
/// (one entry per line, `#` starts a comment) or from a flat JSON object.
class KeyValues {
 public:
  KeyValues() = default;

  static KeyValues parse_text(const std::string& text);
  static KeyValues parse_json(const std::string& text);
  /// Picks the encoding from the first non-blank character (`{` means JSON).
  static KeyValues parse(const std::string& text);
  static KeyValues load(const std::string& path);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

  std::string get_string(const std::string& key) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key) const;
  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key) const;
  long long get_int(const std::string& key, long long fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  /// Canonical `key = value` rendering, keys sorted.
  std::string to_text() const;
  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace rmt
