#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>

namespace annulus {

// Flat key=value parameters. Blank lines and '#' comments are ignored;
// whitespace around keys and values is trimmed.
class RunConfig {
 public:
  static RunConfig parse(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);

  // Sorted key=value lines, readable by parse().
  std::string serialize() const;

  void set(const std::string& key, const std::string& value);
  bool contains(const std::string& key) const { return values_.count(key) != 0; }
  std::optional<std::string> get(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_real(const std::string& key, double fallback) const;
  long long get_integer(const std::string& key, long long fallback) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  friend bool operator==(const RunConfig&, const RunConfig&) = default;

 private:
  std::map<std::string, std::string> values_;
};

double parse_real(const std::string& key, const std::string& text);
long long parse_integer(const std::string& key, const std::string& text);

}  // namespace annulus
