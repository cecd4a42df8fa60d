#include "annulus/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "annulus/common.hpp"

namespace annulus {

namespace {

std::string trim(const std::string& s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return "";
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig config;
  std::istringstream in(text);
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParameterError("config line " + std::to_string(number) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    if (key.empty()) throw ParameterError("config line " + std::to_string(number) + ": empty key");
    config.values_[key] = trim(line.substr(eq + 1));
  }
  return config;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot read config file " + path.string());
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

std::string RunConfig::serialize() const {
  std::string out;
  for (const auto& [key, value] : values_) out += key + '=' + value + '\n';
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (trim(key).empty() || key.find_first_of("=#\n") != std::string::npos)
    throw ParameterError("invalid config key '" + key + "'");
  if (value.find_first_of("#\n") != std::string::npos)
    throw ParameterError("invalid config value for '" + key + "'");
  values_[trim(key)] = trim(value);
}

std::optional<std::string> RunConfig::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
  return get(key).value_or(fallback);
}

double RunConfig::get_real(const std::string& key, double fallback) const {
  const auto v = get(key);
  return v ? parse_real(key, *v) : fallback;
}

long long RunConfig::get_integer(const std::string& key, long long fallback) const {
  const auto v = get(key);
  return v ? parse_integer(key, *v) : fallback;
}

double parse_real(const std::string& key, const std::string& text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value))
    throw ParameterError(key + ": expected a finite number, got '" + text + "'");
  return value;
}

long long parse_integer(const std::string& key, const std::string& text) {
  long long value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) throw ParameterError(key + ": expected an integer, got '" + text + "'");
  return value;
}

}  // namespace annulus
