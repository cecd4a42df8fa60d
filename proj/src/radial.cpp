#include "annulus/radial.hpp"

#include <algorithm>
#include <fstream>
#include <limits>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "annulus/detail/tridiagonal.hpp"

namespace annulus {

double harmonic_value(double R, int p, double r) {
  const double Rp = std::pow(R, p);
  const double rp = std::pow(r, p);
  return (rp + Rp / rp) / (1.0 + Rp);
}

namespace {

void check_nodes(const AnnulusSpec& annulus, std::span<const double> nodes) {
  if (nodes.size() < 3) throw ParameterError("a radial profile needs at least 3 nodes");
  const double R = annulus.inner_radius();
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (nodes[i] < R - 1e-14 || nodes[i] > 1.0 + 1e-14)
      throw ParameterError("profile nodes must lie in [R,1]");
    if (i > 0 && !(nodes[i] > nodes[i - 1]))
      throw ParameterError("profile nodes must be strictly increasing");
  }
}

// Three-point conservative stencil of -(1/r)(r rho')' at interior node i,
// as coefficients of rho_{i-1}, rho_i, rho_{i+1}.
struct Stencil {
  double lower, diag, upper;
};

Stencil radial_stencil(std::span<const double> r, std::size_t i) {
  const double hm = r[i] - r[i - 1];
  const double hp = r[i + 1] - r[i];
  const double w = 0.5 * (hm + hp);
  const double rm = 0.5 * (r[i] + r[i - 1]);
  const double rp = 0.5 * (r[i] + r[i + 1]);
  const double scale = 1.0 / (r[i] * w);
  return {-rm / hm * scale, (rm / hm + rp / hp) * scale, -rp / hp * scale};
}

double residual_at(std::span<const double> r, std::span<const double> rho, std::size_t i, int p,
                   double kappa) {
  const Stencil s = radial_stencil(r, i);
  const double p2 = static_cast<double>(p) * p;
  return s.lower * rho[i - 1] + s.diag * rho[i] + s.upper * rho[i + 1] + p2 * rho[i] / (r[i] * r[i]) -
         kappa * rho[i] * (1.0 - rho[i] * rho[i]);
}

double sup_residual(std::span<const double> r, std::span<const double> rho, int p, double kappa) {
  double worst = 0.0;
  for (std::size_t i = 1; i + 1 < r.size(); ++i)
    worst = std::max(worst, std::abs(residual_at(r, rho, i, p, kappa)));
  return worst;
}

// Damped Newton on the interior unknowns, starting from rho (modified in place).
// Returns the achieved sup-norm residual.
double newton_solve(std::span<const double> r, std::vector<double>& rho, int p, double kappa,
                    const SolveOptions& options) {
  const std::size_t n = r.size();
  const std::size_t m = n - 2;
  std::vector<double> lower(m), diag(m), upper(m), step(m), work, trial(n);
  const double p2 = static_cast<double>(p) * p;

  // Roundoff floor of the residual evaluation: the operator entries reach
  // 1/h^2 in magnitude, so the tolerance is clamped to a few ulps of that.
  double operator_scale = 0.0;
  for (std::size_t i = 1; i + 1 < n; ++i)
    operator_scale = std::max(operator_scale, radial_stencil(r, i).diag + p2 / (r[i] * r[i]) + kappa);
  const double floor = 64.0 * std::numeric_limits<double>::epsilon() * operator_scale;
  const double target = std::max(options.tol, floor);

  double res = sup_residual(r, rho, p, kappa);
  for (int iter = 0; iter < options.max_newton_iterations; ++iter) {
    if (res < target) return res;
    for (std::size_t k = 0; k < m; ++k) {
      const std::size_t i = k + 1;
      const Stencil s = radial_stencil(r, i);
      lower[k] = s.lower;
      upper[k] = s.upper;
      diag[k] = s.diag + p2 / (r[i] * r[i]) - kappa * (1.0 - 3.0 * rho[i] * rho[i]);
      step[k] = -residual_at(r, rho, i, p, kappa);
    }
    if (!detail::solve_tridiagonal<double>(lower, diag, upper, step, work))
      throw ConvergenceError("singular Newton Jacobian in radial solve", res);
    double alpha = 1.0;
    double trial_res = res;
    for (; alpha > 1e-10; alpha *= 0.5) {
      trial = rho;
      for (std::size_t k = 0; k < m; ++k) trial[k + 1] += alpha * step[k];
      trial_res = sup_residual(r, trial, p, kappa);
      if (trial_res < (1.0 - 1e-4 * alpha) * res) break;
    }
    if (alpha <= 1e-10) {
      // No further decrease is possible.
      if (res < target) return res;
      throw ConvergenceError("radial Newton solve stalled", res);
    }
    rho.swap(trial);
    res = trial_res;
  }
  if (res < target) return res;
  throw ConvergenceError("radial Newton solve did not converge within the iteration cap", res);
}

}  // namespace

RadialProfile harmonic_profile(const AnnulusSpec& annulus, int p, std::span<const double> nodes) {
  if (p <= 0) throw ParameterError("winding p must be >= 1");
  check_nodes(annulus, nodes);
  RadialProfile out{annulus, p, Coupling::infinite(), {nodes.begin(), nodes.end()}, {}, true};
  out.values.resize(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i)
    out.values[i] = harmonic_value(annulus.inner_radius(), p, nodes[i]);
  // Boundary values are exactly one by definition.
  out.values.front() = 1.0;
  out.values.back() = 1.0;
  return out;
}

RadialProfile constant_profile(const AnnulusSpec& annulus, std::span<const double> nodes) {
  check_nodes(annulus, nodes);
  return RadialProfile{annulus, 0, Coupling::infinite(), {nodes.begin(), nodes.end()},
                       std::vector<double>(nodes.size(), 1.0), false};
}

RadialProfile solve_gl_profile(const AnnulusSpec& annulus, int p, Coupling coupling,
                               std::span<const double> nodes, const SolveOptions& options) {
  if (p <= 0) throw ParameterError("winding p must be >= 1");
  check_nodes(annulus, nodes);
  if (std::abs(nodes.front() - annulus.inner_radius()) > 1e-14 || std::abs(nodes.back() - 1.0) > 1e-14)
    throw ParameterError("profile nodes must run from R to 1");

  const double R = annulus.inner_radius();
  std::vector<double> rho(nodes.size());
  for (std::size_t i = 0; i < nodes.size(); ++i) rho[i] = harmonic_value(R, p, nodes[i]);
  rho.front() = 1.0;
  rho.back() = 1.0;

  if (!coupling.is_infinite() && coupling.value() < options.continuation_threshold) {
    // Continuation in epsilon from 1 down to the target.
    double eps = 1.0;
    while (eps > coupling.value()) {
      newton_solve(nodes, rho, p, 1.0 / (eps * eps), options);
      eps = std::max(coupling.value(), eps * 0.7);
      if (eps == coupling.value()) break;
    }
  }
  newton_solve(nodes, rho, p, coupling.inverse_square(), options);

  for (std::size_t i = 1; i + 1 < rho.size(); ++i) {
    if (!(rho[i] > 0.0) || rho[i] > 1.0 + 1e-12)
      throw ConvergenceError("radial solution left (0,1]", sup_residual(nodes, rho, p, coupling.inverse_square()));
    rho[i] = std::min(rho[i], 1.0);
  }
  return RadialProfile{annulus, p, coupling, {nodes.begin(), nodes.end()}, std::move(rho), false};
}

RadialProfile solve_gl_profile(const AnnulusSpec& annulus, int p, Coupling coupling, int n_nodes,
                               double tol) {
  if (n_nodes < 32) throw ParameterError("n_nodes must be >= 32");
  const double R = annulus.inner_radius();
  std::vector<double> nodes(static_cast<std::size_t>(n_nodes));
  for (int i = 0; i < n_nodes; ++i) nodes[static_cast<std::size_t>(i)] = R + (1.0 - R) * i / (n_nodes - 1);
  nodes.front() = R;
  nodes.back() = 1.0;
  SolveOptions options;
  options.tol = tol;
  return solve_gl_profile(annulus, p, coupling, nodes, options);
}

double radial_residual(std::span<const double> nodes, std::span<const double> values, int p,
                       Coupling coupling) {
  return sup_residual(nodes, values, p, coupling.inverse_square());
}

double radial_residual(const RadialProfile& profile) {
  return radial_residual(profile.nodes, profile.values, profile.winding, profile.coupling);
}

double profile_min(const RadialProfile& profile) {
  return *std::min_element(profile.values.begin(), profile.values.end());
}

GbCriterion gb_integral_criterion(const AnnulusSpec& annulus, int p, double gamma) {
  if (p <= 0) throw ParameterError("winding p must be >= 1");
  const double R = annulus.inner_radius();
  // t = R + (1 - R) s keeps the integrand O(1) on thin annuli.
  const double width = 1.0 - R;
  auto integrand = [R, p, width](double s) {
    const double t = R + width * s;
    const double rho = harmonic_value(R, p, t);
    return t / (rho * rho);
  };
  double error = 0.0;
  const double integral = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      integrand, 0.0, 1.0, 20, 1e-13, &error);
  const double value = R / (width * width * integral);
  return {value, gamma, value >= gamma};
}

void write_profile_csv(const RadialProfile& profile, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParameterError("cannot open " + path.string() + " for writing");
  out << "r,rho\n";
  for (std::size_t i = 0; i < profile.nodes.size(); ++i)
    out << format_real(profile.nodes[i]) << ',' << format_real(profile.values[i]) << '\n';
}

}  // namespace annulus
