#pragma once

#include <complex>
#include <span>
#include <string>
#include <vector>

#include "annulus/angular_fft.hpp"
#include "annulus/common.hpp"
#include "annulus/grid.hpp"

namespace annulus {

struct EnergyReport {
  double dirichlet = 0.0;  // (1/2) int |grad u|^2
  double potential = 0.0;  // (1/(4 eps^2)) int (1 - |u|^2)^2, exactly 0 for eps = inf
  double total = 0.0;
  Coupling coupling = Coupling::infinite();
};

// CSV row "epsilon,dirichlet,potential,total" (no trailing newline).
std::string energy_csv_header();
std::string to_csv_row(const EnergyReport& report);

enum class Boundary { outer, inner };

struct DegreeReading {
  int outer = 0;
  int inner = 0;
  double outer_residual = 0.0;
  double inner_residual = 0.0;
  bool valid() const noexcept { return outer_residual < 0.5 && inner_residual < 0.5; }
};

struct BoundaryDegree {
  int degree = 0;
  // |raw line integral / 2pi - degree|, the raw integral using the spectral
  // tangential derivative.
  double residual = 0.0;
};

// Discrete energy on a polar grid:
//   radial part:  midpoint rule on each radial edge, (u_{i+1}-u_i)/h_i;
//   angular part: spectral d/dtheta with trapezoid weights in r;
//   potential:    trapezoid in r, rectangle rule in theta.
// The gradient is the exact derivative of this discrete functional, so it
// matches the conservative stencil used by solve_gl_profile.
class EnergyOperator {
 public:
  EnergyOperator(const PolarGrid& grid, Coupling coupling);

  const PolarGrid& grid() const noexcept { return grid_; }
  Coupling coupling() const noexcept { return coupling_; }

  EnergyReport evaluate(std::span<const Complex> u) const;
  // Energy and its real gradient dE/dRe(u) + i dE/dIm(u) per node.
  EnergyReport evaluate_with_gradient(std::span<const Complex> u, std::span<Complex> gradient) const;

  // Area (trapezoid) weight of node (i, .): r_i w_i dtheta.
  double node_area(int i) const { return area_[static_cast<std::size_t>(i)]; }
  // Coefficient of |u_{i+1,j} - u_{i,j}|^2 / 2 in the energy.
  double edge_coeff(int i) const { return edge_coeff_[static_cast<std::size_t>(i)]; }
  // Coefficient of |d_theta u_{i,j}|^2 / 2 in the energy.
  double angular_coeff(int i) const { return angular_coeff_[static_cast<std::size_t>(i)]; }

  // Sup over interior nodes of |-Delta_h u - u (1 - |u|^2)/eps^2|.
  double interior_residual(std::span<const Complex> gradient) const;
  // Sup over both rings of the discrete conormal flux u ^ d_nu u, i.e. the
  // tangential gradient component per unit boundary length.
  double natural_condition_residual(std::span<const Complex> u, std::span<const Complex> gradient) const;

  const AngularFft& fft() const noexcept { return fft_; }

 private:
  PolarGrid grid_;
  Coupling coupling_;
  AngularFft fft_;
  std::vector<double> edge_coeff_;     // r_{i+1/2} / h_i * dtheta, one per radial edge
  std::vector<double> angular_coeff_;  // w_i / r_i * dtheta
  std::vector<double> area_;           // w_i r_i dtheta
  mutable std::vector<Complex> spectrum_;
  mutable std::vector<double> terms_;
};

EnergyReport evaluate_energy(const ComplexField& field, Coupling coupling);

BoundaryDegree boundary_degree(const ComplexField& field, Boundary boundary);
DegreeReading read_degrees(const ComplexField& field);

// Radial derivative at every node: centered three-point in the interior,
// one-sided second-order on the boundary rings.
std::vector<Complex> radial_derivative(const ComplexField& field);
// Spectral angular derivative at every node.
std::vector<Complex> angular_derivative(const ComplexField& field);

// int_A Jac u, with Jac u = u_x ^ u_y = (1/r) u_r ^ u_theta.
double jacobian_integral(const ComplexField& field);
// |int Jac u| - pi |deg_outer - deg_inner|.
double jacobian_degree_defect(const ComplexField& field);
// min over interior nodes of |grad u|^2 - 2 |Jac u|.
double pointwise_lower_bound_check(const ComplexField& field);

inline double wedge(Complex a, Complex b) { return a.real() * b.imag() - a.imag() * b.real(); }

}  // namespace annulus
