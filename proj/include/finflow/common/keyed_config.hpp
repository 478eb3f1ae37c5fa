#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>

namespace finflow {

/// Flat `key = value` text configuration. Blank lines and `#` comments are
/// ignored; later keys override earlier ones.
class KeyedConfig {
 public:
  KeyedConfig() = default;

  static KeyedConfig parse(std::string_view text);
  static KeyedConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value) { values_[key] = value; }
  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  const std::map<std::string, std::string>& values() const { return values_; }

  /// Overlays every key of `other` onto this config.
  void merge(const KeyedConfig& other);

  double get_double(const std::string& key, double fallback) const;
  long long get_int(const std::string& key, long long fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;

  /// Deterministic serialization (keys sorted).
  std::string to_text() const;

 private:
  std::map<std::string, std::string> values_;
};

/// Shortest round-trip decimal representation of a double.
std::string format_double(double v);

}  // namespace finflow
