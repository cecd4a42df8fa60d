#pragma once

#include <complex>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "annulus/common.hpp"

namespace annulus {

using Complex = std::complex<double>;

// Circular annulus B(0,1) \ closure(B(0,R)).
class AnnulusSpec {
 public:
  explicit AnnulusSpec(double inner_radius);

  double inner_radius() const noexcept { return inner_radius_; }
  // H^1 capacity -2*pi / ln R.
  double capacity() const noexcept { return capacity_; }
  double thickness() const noexcept { return 1.0 - inner_radius_; }

 private:
  double inner_radius_;
  double capacity_;
};

enum class Spacing { uniform, cosine_clustered };

std::string to_string(Spacing spacing);
Spacing parse_spacing(const std::string& text);

// Structured polar grid. Radial nodes include both boundary rings; the
// angular direction is periodic without a duplicated seam column.
class PolarGrid {
 public:
  PolarGrid(AnnulusSpec annulus, std::vector<double> radial_nodes, int n_angular,
            Spacing spacing);

  const AnnulusSpec& annulus() const noexcept { return annulus_; }
  int n_radial() const noexcept { return static_cast<int>(radial_nodes_.size()); }
  int n_angular() const noexcept { return n_angular_; }
  std::size_t size() const noexcept { return radial_nodes_.size() * static_cast<std::size_t>(n_angular_); }
  Spacing spacing() const noexcept { return spacing_; }

  std::span<const double> radial_nodes() const noexcept { return radial_nodes_; }
  double r(int i) const { return radial_nodes_[static_cast<std::size_t>(i)]; }
  double theta(int j) const { return d_theta_ * j; }
  double d_theta() const noexcept { return d_theta_; }

  // Trapezoid weights in r (half cells on both boundary rings).
  std::span<const double> radial_weights() const noexcept { return radial_weights_; }

  std::size_t index(int i, int j) const noexcept {
    return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_angular_) + static_cast<std::size_t>(j);
  }

 private:
  AnnulusSpec annulus_;
  std::vector<double> radial_nodes_;
  std::vector<double> radial_weights_;
  int n_angular_;
  double d_theta_;
  Spacing spacing_;
};

PolarGrid make_grid(const AnnulusSpec& annulus, int n_radial, int n_angular,
                    Spacing spacing = Spacing::uniform);

// Complex order parameter sampled on a PolarGrid, stored radial-major.
class ComplexField {
 public:
  ComplexField(PolarGrid grid, std::vector<Complex> values);
  // Field filled with a constant.
  ComplexField(PolarGrid grid, Complex constant);

  const PolarGrid& grid() const noexcept { return grid_; }
  std::span<const Complex> values() const noexcept { return values_; }
  const Complex& operator()(int i, int j) const { return values_[grid_.index(i, j)]; }
  std::span<const Complex> ring(int i) const {
    return std::span<const Complex>(values_).subspan(grid_.index(i, 0),
                                                     static_cast<std::size_t>(grid_.n_angular()));
  }

 private:
  PolarGrid grid_;
  std::vector<Complex> values_;
};

struct RadialProfile;

// rho(r_i) * exp(i * winding * theta_j). The profile must live on the grid's
// radial nodes, or be a closed-form harmonic profile that can be re-sampled.
ComplexField radial_ansatz(const PolarGrid& grid, const RadialProfile& profile, int winding);

// Field CSV: header "r,theta,re,im", radial-major, 17 significant digits.
void write_field_csv(const ComplexField& field, const std::filesystem::path& path);
// Grid metadata sidecar (JSON object with keys R, n_radial, n_angular, spacing).
void write_grid_metadata(const PolarGrid& grid, const std::filesystem::path& path);
PolarGrid read_grid_metadata(const std::filesystem::path& path);
ComplexField read_field_csv(const PolarGrid& grid, const std::filesystem::path& path);

}  // namespace annulus
