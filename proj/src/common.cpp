#include "annulus/common.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>

namespace annulus {

Coupling Coupling::parse(const std::string& text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  if (lower == "inf" || lower == "infinity" || lower == "+inf") return infinite();
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ParameterError("cannot parse epsilon '" + text + "'");
  }
  if (used != text.size()) throw ParameterError("cannot parse epsilon '" + text + "'");
  return finite(value);
}

std::string Coupling::to_string() const { return infinite_ ? "inf" : format_real(epsilon_); }

namespace {

double pairwise_block(const double* data, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += data[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_block(data, half) + pairwise_block(data + half, n - half);
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_block(values.data(), values.size());
}

std::string format_real(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (std::isnan(value)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace annulus
