#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>

namespace annulus {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Error hierarchy. The CLI maps ParameterError to exit code 1 and every
// other annulus::Error to exit code 2.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParameterError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, double last_residual)
      : Error(what), last_residual_(last_residual) {}
  double last_residual() const noexcept { return last_residual_; }

 private:
  double last_residual_;
};

class DegenerateBoundaryError : public Error {
 public:
  using Error::Error;
};

// Branch-II tangent argument hits (or passes) an odd multiple of pi/2.
class SingularityError : public Error {
 public:
  using Error::Error;
};

// Discrete quadratic form is indefinite: the infimum is -infinity.
class UnboundedBelowError : public Error {
 public:
  using Error::Error;
};

class InsufficientResolutionError : public Error {
 public:
  using Error::Error;
};

class StepSizeError : public Error {
 public:
  using Error::Error;
};

class NoRootError : public Error {
 public:
  using Error::Error;
};

class NonMonotoneError : public Error {
 public:
  using Error::Error;
};

// Coupling parameter epsilon in (0, inf]. The infinite value is a distinct
// state: the potential term is dropped exactly instead of using a large float.
class Coupling {
 public:
  static Coupling infinite() { return Coupling(); }
  static Coupling finite(double epsilon) {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon))
      throw ParameterError("epsilon must be a finite positive number");
    return Coupling(epsilon);
  }
  // Accepts "inf" (also "infinity", "Inf") or a positive decimal.
  static Coupling parse(const std::string& text);

  bool is_infinite() const noexcept { return infinite_; }
  double value() const noexcept {
    return infinite_ ? std::numeric_limits<double>::infinity() : epsilon_;
  }
  // 1/eps^2, exactly 0 for the infinite coupling.
  double inverse_square() const noexcept {
    return infinite_ ? 0.0 : 1.0 / (epsilon_ * epsilon_);
  }
  std::string to_string() const;

  friend bool operator==(const Coupling&, const Coupling&) = default;

 private:
  Coupling() = default;
  explicit Coupling(double eps) : infinite_(false), epsilon_(eps) {}

  bool infinite_ = true;
  double epsilon_ = 0.0;
};

// Pairwise (cascade) summation with a fixed, size-only-dependent order.
double pairwise_sum(std::span<const double> values);

// Shortest round-trip decimal representation ("%.17g"), used by every CSV writer.
std::string format_real(double value);

}  // namespace annulus
