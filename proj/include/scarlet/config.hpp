#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace scarlet {

/// Sectioned "key = value" configuration. Keys are addressed as
/// "section.key"; '#' and ';' start comment lines.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  /// Applies "section.key=value"; later calls win.
  void set(std::string_view assignment);
  void set(const std::string& key, const std::string& value) { values_[key] = value; }

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  std::string get(const std::string& key, const std::string& fallback = {}) const;
  double get_double(const std::string& key, double fallback) const;
  std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<std::size_t> get_list(const std::string& key,
                                    const std::vector<std::size_t>& fallback) const;

  const std::map<std::string, std::string>& values() const { return values_; }

  /// Directory relative paths resolve against (the config file's folder).
  std::filesystem::path base_dir;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace scarlet
