#include "annulus/energy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace annulus {

std::string energy_csv_header() { return "epsilon,dirichlet,potential,total"; }

std::string to_csv_row(const EnergyReport& r) {
  return r.coupling.to_string() + ',' + format_real(r.dirichlet) + ',' + format_real(r.potential) + ',' +
         format_real(r.total);
}

EnergyOperator::EnergyOperator(const PolarGrid& grid, Coupling coupling)
    : grid_(grid), coupling_(coupling), fft_(grid.n_radial(), grid.n_angular()) {
  const int n = grid.n_radial();
  const double dth = grid.d_theta();
  const auto r = grid.radial_nodes();
  const auto w = grid.radial_weights();
  edge_coeff_.resize(static_cast<std::size_t>(n - 1));
  for (int i = 0; i + 1 < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    edge_coeff_[k] = 0.5 * (r[k] + r[k + 1]) / (r[k + 1] - r[k]) * dth;
  }
  angular_coeff_.resize(static_cast<std::size_t>(n));
  area_.resize(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) {
    angular_coeff_[i] = w[i] / r[i] * dth;
    area_[i] = w[i] * r[i] * dth;
  }
  spectrum_.resize(grid.size());
  terms_.resize(grid.size());
}

EnergyReport EnergyOperator::evaluate(std::span<const Complex> u) const {
  const int n = grid_.n_radial();
  const int m = grid_.n_angular();
  EnergyReport report;
  report.coupling = coupling_;

  // Radial edges.
  std::size_t t = 0;
  for (int i = 0; i + 1 < n; ++i) {
    const double a = 0.5 * edge_coeff_[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j)
      terms_[t++] = a * std::norm(u[grid_.index(i + 1, j)] - u[grid_.index(i, j)]);
  }
  const double radial = pairwise_sum(std::span<const double>(terms_.data(), t));

  // Angular part through Parseval.
  fft_.forward(u, spectrum_);
  t = 0;
  for (int i = 0; i < n; ++i) {
    const double c = 0.5 * angular_coeff_[static_cast<std::size_t>(i)] / m;
    for (int b = 0; b < m; ++b) {
      const double k = fft_.wavenumber(b);
      terms_[t++] = c * k * k * std::norm(spectrum_[grid_.index(i, b)]);
    }
  }
  const double angular = pairwise_sum(std::span<const double>(terms_.data(), t));
  report.dirichlet = radial + angular;

  if (!coupling_.is_infinite()) {
    const double kappa = coupling_.inverse_square();
    t = 0;
    for (int i = 0; i < n; ++i) {
      const double c = 0.25 * kappa * area_[static_cast<std::size_t>(i)];
      for (int j = 0; j < m; ++j) {
        const double d = 1.0 - std::norm(u[grid_.index(i, j)]);
        terms_[t++] = c * d * d;
      }
    }
    report.potential = pairwise_sum(std::span<const double>(terms_.data(), t));
  }
  report.total = report.dirichlet + report.potential;
  return report;
}

EnergyReport EnergyOperator::evaluate_with_gradient(std::span<const Complex> u,
                                                    std::span<Complex> gradient) const {
  const EnergyReport report = evaluate(u);
  const int n = grid_.n_radial();
  const int m = grid_.n_angular();

  // Angular: (w/r) dtheta * (-u_thetatheta).
  fft_.minus_second_derivative(u, gradient);
  for (int i = 0; i < n; ++i) {
    const double c = angular_coeff_[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) gradient[grid_.index(i, j)] *= c;
  }
  for (int i = 0; i + 1 < n; ++i) {
    const double a = edge_coeff_[static_cast<std::size_t>(i)];
    for (int j = 0; j < m; ++j) {
      const Complex diff = a * (u[grid_.index(i + 1, j)] - u[grid_.index(i, j)]);
      gradient[grid_.index(i, j)] -= diff;
      gradient[grid_.index(i + 1, j)] += diff;
    }
  }
  if (!coupling_.is_infinite()) {
    const double kappa = coupling_.inverse_square();
    for (int i = 0; i < n; ++i) {
      const double c = kappa * area_[static_cast<std::size_t>(i)];
      for (int j = 0; j < m; ++j) {
        const Complex v = u[grid_.index(i, j)];
        gradient[grid_.index(i, j)] -= c * (1.0 - std::norm(v)) * v;
      }
    }
  }
  return report;
}

double EnergyOperator::interior_residual(std::span<const Complex> gradient) const {
  double worst = 0.0;
  for (int i = 1; i + 1 < grid_.n_radial(); ++i) {
    const double inv = 1.0 / area_[static_cast<std::size_t>(i)];
    for (int j = 0; j < grid_.n_angular(); ++j)
      worst = std::max(worst, std::abs(gradient[grid_.index(i, j)]) * inv);
  }
  return worst;
}

double EnergyOperator::natural_condition_residual(std::span<const Complex> u,
                                                  std::span<const Complex> gradient) const {
  double worst = 0.0;
  for (int i : {0, grid_.n_radial() - 1}) {
    const double length = grid_.r(i) * grid_.d_theta();
    for (int j = 0; j < grid_.n_angular(); ++j) {
      const Complex v = u[grid_.index(i, j)];
      const double mod = std::abs(v);
      if (mod == 0.0) continue;
      worst = std::max(worst, std::abs(wedge(v, gradient[grid_.index(i, j)])) / (mod * length));
    }
  }
  return worst;
}

EnergyReport evaluate_energy(const ComplexField& field, Coupling coupling) {
  return EnergyOperator(field.grid(), coupling).evaluate(field.values());
}

BoundaryDegree boundary_degree(const ComplexField& field, Boundary boundary) {
  const auto& g = field.grid();
  const int i = boundary == Boundary::outer ? g.n_radial() - 1 : 0;
  const auto ring = field.ring(i);
  const int m = g.n_angular();
  for (const auto& v : ring)
    if (std::abs(v) < 1e-8)
      throw DegenerateBoundaryError("|u| vanishes on the " +
                                    std::string(boundary == Boundary::outer ? "outer" : "inner") +
                                    " boundary; the degree is undefined");
  // Integer reading: unwrapped phase increments.
  std::vector<double> increments(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const Complex a = ring[static_cast<std::size_t>(j)];
    const Complex b = ring[static_cast<std::size_t>((j + 1) % m)];
    increments[static_cast<std::size_t>(j)] = std::arg(b * std::conj(a));
  }
  const double winding = pairwise_sum(increments) / kTwoPi;
  const int degree = static_cast<int>(std::lround(winding));

  // Raw line integral with the spectral tangential derivative.
  AngularFft fft(1, m);
  std::vector<Complex> derivative(static_cast<std::size_t>(m));
  fft.derivative(ring, derivative);
  std::vector<double> density(static_cast<std::size_t>(m));
  for (std::size_t j = 0; j < static_cast<std::size_t>(m); ++j)
    density[j] = wedge(ring[j], derivative[j]) / std::norm(ring[j]);
  const double raw = pairwise_sum(density) / m;
  return {degree, std::abs(raw - degree)};
}

DegreeReading read_degrees(const ComplexField& field) {
  const auto outer = boundary_degree(field, Boundary::outer);
  const auto inner = boundary_degree(field, Boundary::inner);
  return {outer.degree, inner.degree, outer.residual, inner.residual};
}

std::vector<Complex> radial_derivative(const ComplexField& field) {
  const auto& g = field.grid();
  const int n = g.n_radial();
  const int m = g.n_angular();
  const auto r = g.radial_nodes();
  std::vector<Complex> out(g.size());
  auto row = [&](int i) { return field.values().subspan(g.index(i, 0), static_cast<std::size_t>(m)); };
  for (int i = 0; i < n; ++i) {
    double c0, c1, c2;
    int i0, i1, i2;
    const auto k = static_cast<std::size_t>(i);
    if (i == 0) {
      const double h1 = r[1] - r[0], h2 = r[2] - r[1];
      c0 = -(2 * h1 + h2) / (h1 * (h1 + h2));
      c1 = (h1 + h2) / (h1 * h2);
      c2 = -h1 / (h2 * (h1 + h2));
      i0 = 0, i1 = 1, i2 = 2;
    } else if (i == n - 1) {
      const double h1 = r[k] - r[k - 1], h2 = r[k - 1] - r[k - 2];
      c0 = (2 * h1 + h2) / (h1 * (h1 + h2));
      c1 = -(h1 + h2) / (h1 * h2);
      c2 = h1 / (h2 * (h1 + h2));
      i0 = n - 1, i1 = n - 2, i2 = n - 3;
    } else {
      const double hm = r[k] - r[k - 1], hp = r[k + 1] - r[k];
      c0 = -hp / (hm * (hm + hp));
      c1 = (hp - hm) / (hm * hp);
      c2 = hm / (hp * (hm + hp));
      i0 = i - 1, i1 = i, i2 = i + 1;
    }
    const auto a = row(i0), b = row(i1), c = row(i2);
    for (int j = 0; j < m; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      out[g.index(i, j)] = c0 * a[jj] + c1 * b[jj] + c2 * c[jj];
    }
  }
  return out;
}

std::vector<Complex> angular_derivative(const ComplexField& field) {
  const auto& g = field.grid();
  AngularFft fft(g.n_radial(), g.n_angular());
  std::vector<Complex> out(g.size());
  fft.derivative(field.values(), out);
  return out;
}

double jacobian_integral(const ComplexField& field) {
  const auto& g = field.grid();
  const auto ur = radial_derivative(field);
  const auto ut = angular_derivative(field);
  const auto w = g.radial_weights();
  std::vector<double> terms(g.size());
  for (int i = 0; i < g.n_radial(); ++i)
    for (int j = 0; j < g.n_angular(); ++j) {
      const auto k = g.index(i, j);
      terms[k] = w[static_cast<std::size_t>(i)] * g.d_theta() * wedge(ur[k], ut[k]);
    }
  return pairwise_sum(terms);
}

double jacobian_degree_defect(const ComplexField& field) {
  const auto degrees = read_degrees(field);
  return std::abs(jacobian_integral(field)) - kPi * std::abs(degrees.outer - degrees.inner);
}

double pointwise_lower_bound_check(const ComplexField& field) {
  const auto& g = field.grid();
  const auto ur = radial_derivative(field);
  const auto ut = angular_derivative(field);
  double worst = std::numeric_limits<double>::infinity();
  for (int i = 1; i + 1 < g.n_radial(); ++i) {
    const double r = g.r(i);
    for (int j = 0; j < g.n_angular(); ++j) {
      const auto k = g.index(i, j);
      const Complex tangential = ut[k] / r;
      const double grad2 = std::norm(ur[k]) + std::norm(tangential);
      worst = std::min(worst, grad2 - 2.0 * std::abs(wedge(ur[k], tangential)));
    }
  }
  return worst;
}

}  // namespace annulus
