#pragma once

#include <filesystem>
#include <span>
#include <vector>

#include "annulus/common.hpp"
#include "annulus/grid.hpp"

namespace annulus {

// Sampled modulus rho(r) of a radial solution rho(|x|) (x/|x|)^p.
struct RadialProfile {
  AnnulusSpec annulus;
  int winding = 1;
  Coupling coupling = Coupling::infinite();
  std::vector<double> nodes;
  std::vector<double> values;
  // True for the explicit harmonic profile, which can be re-evaluated anywhere.
  bool closed_form = false;
};

// (r^p + R^p / r^p) / (1 + R^p), the harmonic modulus with rho(R) = rho(1) = 1.
double harmonic_value(double R, int p, double r);

RadialProfile harmonic_profile(const AnnulusSpec& annulus, int p, std::span<const double> nodes);

// Profile identically equal to one (the winding-0 modulus).
RadialProfile constant_profile(const AnnulusSpec& annulus, std::span<const double> nodes);

struct SolveOptions {
  double tol = 1e-12;
  int max_newton_iterations = 100;
  // Below this epsilon the solve is continued from epsilon = 1 downwards.
  double continuation_threshold = 0.2;
};

// Finite-difference solution of
//   -rho'' - rho'/r + p^2 rho / r^2 = rho (1 - rho^2) / eps^2,  rho(R) = rho(1) = 1
// on the given nodes (which must run from R to 1). The stencil is the
// conservative three-point form -(1/(r w)) [r_{+} D_{+} - r_{-} D_{-}], which
// is exactly the radial part of the discrete 2D energy gradient.
// An infinite coupling solves the linear (harmonic) problem.
RadialProfile solve_gl_profile(const AnnulusSpec& annulus, int p, Coupling coupling,
                               std::span<const double> nodes, const SolveOptions& options = {});
// Uniform nodes, n_nodes >= 32.
RadialProfile solve_gl_profile(const AnnulusSpec& annulus, int p, Coupling coupling, int n_nodes,
                               double tol);

// Sup-norm over interior nodes of the discrete modulus-equation residual.
double radial_residual(const RadialProfile& profile);
// Same, with an explicit coupling and winding (used to test the closed form
// against the discrete operator).
double radial_residual(std::span<const double> nodes, std::span<const double> values, int p,
                       Coupling coupling);

double profile_min(const RadialProfile& profile);

struct GbCriterion {
  double value;  // 1 / [ (1/R - 1) * int_R^1 t rho_{inf,p}(t)^{-2} dt ]
  double gamma;
  bool holds;  // value >= gamma
};

// Integral criterion with the harmonic profile; relative quadrature error < 1e-10.
GbCriterion gb_integral_criterion(const AnnulusSpec& annulus, int p, double gamma = 4.0);

// Profile CSV: header "r,rho".
void write_profile_csv(const RadialProfile& profile, const std::filesystem::path& path);

}  // namespace annulus
