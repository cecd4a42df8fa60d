#include "annulus/flow.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>

#include "annulus/detail/tridiagonal.hpp"

namespace annulus {

void FlowConfig::validate() const {
  if (!(step_size > 0.0)) throw ParameterError("step_size must be positive");
  if (max_iterations < 0) throw ParameterError("max_iterations must be >= 0");
  if (!(grad_tol > 0.0)) throw ParameterError("grad_tol must be positive");
  if (degree_check_interval < 1) throw ParameterError("degree_check_interval must be >= 1");
  if (!(perturbation >= 0.0)) throw ParameterError("perturbation must be >= 0");
  if (!(preconditioner_shift >= 0.0)) throw ParameterError("preconditioner_shift must be >= 0");
  if (!(trust_radius > 0.0)) throw ParameterError("trust_radius must be positive");
  if (max_backtracks < 1) throw ParameterError("max_backtracks must be >= 1");
  if (!(degeneracy_threshold > 0.0 && degeneracy_threshold < 1.0))
    throw ParameterError("degeneracy_threshold must lie in (0,1)");
}

std::string to_string(FlowStatus status) {
  switch (status) {
    case FlowStatus::converged: return "converged";
    case FlowStatus::max_iterations: return "max_iterations";
    case FlowStatus::stalled: return "stalled";
  }
  return "?";
}

bool FlowTrace::has_event(FlowEventKind kind) const {
  return std::any_of(events.begin(), events.end(), [kind](const FlowEvent& e) { return e.kind == kind; });
}

std::optional<double> FlowTrace::escape_energy() const {
  for (const auto& e : events)
    if (e.kind == FlowEventKind::degree_jump) return e.energy_before;
  return std::nullopt;
}

double effective_shift(const FlowConfig& config, const AnnulusSpec& annulus) {
  if (config.preconditioner_shift > 0.0) return config.preconditioner_shift;
  return 1.0 / (annulus.thickness() * annulus.thickness());
}

double stability_bound(Coupling coupling, double preconditioner_shift) {
  // Dirichlet part is bounded by 1; the potential Hessian by 2/eps^2 times the mass.
  return 1.0 + 2.0 * coupling.inverse_square() / preconditioner_shift;
}

namespace {

// (L + shift M)^{-1}, block diagonal in the angular wavenumber.
class Preconditioner {
 public:
  Preconditioner(const EnergyOperator& op, double shift) : op_(op), shift_(shift) {
    const auto& g = op.grid();
    n_ = g.n_radial();
    m_ = g.n_angular();
    spectrum_.resize(g.size());
    column_.resize(static_cast<std::size_t>(n_));
    lower_.resize(static_cast<std::size_t>(n_));
    upper_.resize(static_cast<std::size_t>(n_));
    diag_.resize(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) {
      const auto k = static_cast<std::size_t>(i);
      lower_[k] = i > 0 ? -op.edge_coeff(i - 1) : 0.0;
      upper_[k] = i + 1 < n_ ? -op.edge_coeff(i) : 0.0;
    }
  }

  void apply(std::span<const Complex> in, std::span<Complex> out) {
    const auto& fft = op_.fft();
    fft.forward(in, spectrum_);
    for (int b = 0; b < m_; ++b) {
      const double k = fft.wavenumber(b);
      for (int i = 0; i < n_; ++i) {
        const auto s = static_cast<std::size_t>(i);
        diag_[s] = -lower_[s] - upper_[s] + op_.angular_coeff(i) * k * k + shift_ * op_.node_area(i);
        column_[s] = spectrum_[op_.grid().index(i, b)];
      }
      detail::solve_tridiagonal<Complex>(lower_, diag_, upper_, column_, work_);
      for (int i = 0; i < n_; ++i) spectrum_[op_.grid().index(i, b)] = column_[static_cast<std::size_t>(i)];
    }
    fft.inverse(spectrum_, out);
  }

 private:
  const EnergyOperator& op_;
  double shift_;
  int n_ = 0, m_ = 0;
  std::vector<Complex> spectrum_, column_;
  std::vector<double> lower_, upper_, diag_, work_;
};

struct Midpoint {
  double modulus = 1.0;
  Boundary boundary = Boundary::outer;
  double theta = 0.0;
};

Midpoint min_boundary_midpoint(const PolarGrid& g, std::span<const Complex> u) {
  Midpoint best;
  for (Boundary b : {Boundary::inner, Boundary::outer}) {
    const int i = b == Boundary::outer ? g.n_radial() - 1 : 0;
    for (int j = 0; j < g.n_angular(); ++j) {
      const double mod = 0.5 * std::abs(u[g.index(i, j)] + u[g.index(i, (j + 1) % g.n_angular())]);
      if (mod < best.modulus) best = {mod, b, g.theta(j) + 0.5 * g.d_theta()};
    }
  }
  return best;
}

void fill_interior_minimum(const PolarGrid& g, std::span<const Complex> u, TraceRecord& rec) {
  rec.min_modulus = std::numeric_limits<double>::infinity();
  const int i0 = g.n_radial() > 2 ? 1 : 0;
  const int i1 = g.n_radial() > 2 ? g.n_radial() - 2 : g.n_radial() - 1;
  for (int i = i0; i <= i1; ++i)
    for (int j = 0; j < g.n_angular(); ++j) {
      const double mod = std::abs(u[g.index(i, j)]);
      if (mod < rec.min_modulus) {
        rec.min_modulus = mod;
        rec.min_r = g.r(i);
        rec.min_theta = g.theta(j);
      }
    }
}

DegreeReading safe_read(const ComplexField& field) {
  try {
    return read_degrees(field);
  } catch (const DegenerateBoundaryError&) {
    DegreeReading r;
    r.outer_residual = r.inner_residual = std::numeric_limits<double>::infinity();
    return r;
  }
}

bool reliable(const DegreeReading& r) { return r.outer_residual < 0.25 && r.inner_residual < 0.25; }

void project_boundary(const PolarGrid& g, std::span<const Complex> previous, std::span<Complex> u) {
  for (int i : {0, g.n_radial() - 1})
    for (int j = 0; j < g.n_angular(); ++j) {
      const auto k = g.index(i, j);
      const double mod = std::abs(u[k]);
      u[k] = mod < 1e-12 ? previous[k] / std::abs(previous[k]) : u[k] / mod;
    }
}

}  // namespace

FlowResult run_flow(const ComplexField& initial, Coupling coupling, const FlowConfig& config) {
  config.validate();
  const PolarGrid& g = initial.grid();
  for (int i : {0, g.n_radial() - 1})
    for (const auto& v : initial.ring(i))
      if (std::abs(v) < 0.5) throw ParameterError("initial field must satisfy |u| >= 0.5 on both boundary rings");

  FlowTrace trace;
  const double shift = effective_shift(config, g.annulus());
  trace.stability_bound = stability_bound(coupling, shift);
  if (config.step_size * trace.stability_bound >= 2.0)
    throw StepSizeError("step_size * stability bound = " + format_real(config.step_size * trace.stability_bound) +
                        " must be < 2");

  std::vector<Complex> u(initial.values().begin(), initial.values().end());
  if (config.perturbation > 0.0) {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<double> dist(-config.perturbation, config.perturbation);
    for (int i = 1; i + 1 < g.n_radial(); ++i)
      for (int j = 0; j < g.n_angular(); ++j) {
        const double re = dist(rng);
        const double im = dist(rng);
        u[g.index(i, j)] += Complex(re, im);
      }
  }
  project_boundary(g, initial.values(), u);

  const EnergyOperator op(g, coupling);
  Preconditioner precond(op, shift);
  std::vector<Complex> grad(g.size()), trial(g.size()), trial_grad(g.size()), tangential(g.size()),
      direction(g.size());

  auto field_of = [&g](std::span<const Complex> values) {
    return ComplexField(g, std::vector<Complex>(values.begin(), values.end()));
  };

  EnergyReport energy = op.evaluate_with_gradient(u, grad);
  DegreeReading reading = safe_read(field_of(u));
  std::optional<TraceRecord> last_valid;
  bool degenerate = false;

  auto record = [&](int iteration, bool check_degrees) {
    TraceRecord rec;
    rec.iteration = iteration;
    rec.energy = energy;
    if (check_degrees) reading = safe_read(field_of(u));
    rec.degrees = reading;
    fill_interior_minimum(g, u, rec);
    rec.interior_residual = op.interior_residual(grad);
    rec.boundary_residual = op.natural_condition_residual(u, grad);

    const Midpoint mid = min_boundary_midpoint(g, u);
    trace.min_boundary_midpoint_modulus = std::min(trace.min_boundary_midpoint_modulus, mid.modulus);
    if (mid.modulus < config.degeneracy_threshold && !degenerate) {
      degenerate = true;
      FlowEvent e{FlowEventKind::boundary_degeneracy, iteration, mid.boundary};
      e.energy_before = last_valid ? last_valid->energy.total : energy.total;
      e.theta = mid.theta;
      trace.events.push_back(e);
    } else if (mid.modulus >= config.degeneracy_threshold) {
      degenerate = false;
    }

    if (check_degrees && reliable(reading)) {
      if (last_valid) {
        const auto& prev = last_valid->degrees;
        for (Boundary b : {Boundary::outer, Boundary::inner}) {
          const int before = b == Boundary::outer ? prev.outer : prev.inner;
          const int after = b == Boundary::outer ? reading.outer : reading.inner;
          if (before != after) {
            FlowEvent e{FlowEventKind::degree_jump, iteration, b, before, after};
            e.energy_before = last_valid->energy.total;
            e.theta = mid.theta;
            trace.events.push_back(e);
          }
        }
      }
      last_valid = rec;
    }
    trace.records.push_back(rec);
    return rec;
  };

  TraceRecord current = record(0, true);
  int iteration = 0;
  while (true) {
    if (current.interior_residual < config.grad_tol && current.boundary_residual < config.grad_tol) {
      trace.status = FlowStatus::converged;
      break;
    }
    if (iteration >= config.max_iterations) {
      trace.status = FlowStatus::max_iterations;
      break;
    }
    ++iteration;

    // Boundary nodes only feel the tangential part of the gradient.
    std::copy(grad.begin(), grad.end(), tangential.begin());
    for (int i : {0, g.n_radial() - 1})
      for (int j = 0; j < g.n_angular(); ++j) {
        const auto k = g.index(i, j);
        const Complex n = u[k] / std::abs(u[k]);
        tangential[k] -= (std::conj(n) * tangential[k]).real() * n;
      }
    precond.apply(tangential, direction);

    std::vector<double> slope_terms(g.size());
    double largest = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
      slope_terms[k] = (std::conj(tangential[k]) * direction[k]).real();
      largest = std::max(largest, std::abs(direction[k]));
    }
    const double slope = pairwise_sum(slope_terms);
    double tau = config.step_size;
    if (tau * largest > config.trust_radius) tau = config.trust_radius / largest;

    bool accepted = false;
    double smallest_increase = std::numeric_limits<double>::infinity();
    EnergyReport trial_energy;
    for (int attempt = 0; attempt < config.max_backtracks; ++attempt, tau *= 0.5) {
      for (std::size_t k = 0; k < g.size(); ++k) trial[k] = u[k] - tau * direction[k];
      project_boundary(g, u, trial);
      trial_energy = op.evaluate_with_gradient(trial, trial_grad);
      smallest_increase = std::min(smallest_increase, trial_energy.total - energy.total);
      if (trial_energy.total <= energy.total - 1e-4 * tau * slope) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      if (smallest_increase <= 1e-12 * std::max(1.0, std::abs(energy.total))) {
        trace.status = FlowStatus::stalled;
        break;
      }
      throw StepSizeError("no descent step found at iteration " + std::to_string(iteration));
    }
    if (trial_energy.total > energy.total + 1e-12)
      throw StepSizeError("energy increased at iteration " + std::to_string(iteration));
    u.swap(trial);
    grad.swap(trial_grad);
    energy = trial_energy;
    current = record(iteration, iteration % config.degree_check_interval == 0);
  }
  trace.iterations = iteration;
  return {field_of(u), std::move(trace)};
}

std::string trace_csv_header() {
  return "iter,dirichlet,potential,total,deg_out,deg_in,res_out,res_in,min_mod,min_r,min_theta";
}

void write_trace_csv(const FlowTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << trace_csv_header() << '\n';
  for (const auto& r : trace.records)
    out << r.iteration << ',' << format_real(r.energy.dirichlet) << ',' << format_real(r.energy.potential) << ','
        << format_real(r.energy.total) << ',' << r.degrees.outer << ',' << r.degrees.inner << ','
        << format_real(r.degrees.outer_residual) << ',' << format_real(r.degrees.inner_residual) << ','
        << format_real(r.min_modulus) << ',' << format_real(r.min_r) << ',' << format_real(r.min_theta) << '\n';
}

namespace {

// Unimodular on the unit circle, degree +1 there, equal to -1 at e and
// close to 1 away from it.
Complex moebius(Complex z, Complex e, double delta) {
  const Complex a = (1.0 - delta) * e;
  return -std::conj(e) * (z - a) / (1.0 - std::conj(a) * z);
}

double cutoff(double dist, double rho_c) {
  if (dist <= rho_c) return 1.0;
  if (dist >= 2.0 * rho_c) return 0.0;
  return 0.5 * (1.0 + std::cos(kPi * (dist - rho_c) / rho_c));
}

}  // namespace

ComplexField insert_boundary_bubble(const ComplexField& field, Boundary boundary, BubbleSign sign,
                                    double concentration, double theta0) {
  const auto& g = field.grid();
  const double R = g.annulus().inner_radius();
  if (!(concentration > 0.0 && concentration < 1.0)) throw ParameterError("concentration must lie in (0,1)");
  const bool outer = boundary == Boundary::outer;
  // Work in w = z (outer) or w = R / z (inner); both map the chosen circle to |w| = 1.
  const double delta = outer ? concentration : concentration / R;
  const double rho_c = 0.5 * (1.0 - R);
  if (2.0 * delta >= 1.0 - R)
    throw ParameterError("concentration too large: the bubble does not fit inside the annulus");
  const int ring = outer ? g.n_radial() - 1 : 0;
  for (const auto& v : field.ring(ring))
    if (std::abs(v) < 0.5) throw ParameterError("|u| must be >= 0.5 on the chosen boundary ring");

  const Complex e = std::polar(1.0, outer ? theta0 : -theta0);
  // The inner map reverses orientation.
  const bool conjugate = outer ? sign == BubbleSign::minus : sign == BubbleSign::plus;
  std::vector<Complex> values(field.values().begin(), field.values().end());
  for (int i = 0; i < g.n_radial(); ++i)
    for (int j = 0; j < g.n_angular(); ++j) {
      const Complex z = std::polar(g.r(i), g.theta(j));
      const Complex w = outer ? z : R / z;
      const double chi = cutoff(std::abs(w - e), rho_c);
      if (chi == 0.0) continue;
      const Complex b = moebius(w, e, delta);
      Complex factor = chi == 1.0 ? b : std::exp(chi * std::log(b));
      if (conjugate) factor = std::conj(factor);
      values[g.index(i, j)] *= factor;
    }
  return ComplexField(g, std::move(values));
}

ComplexField assemble_test_field(const AnnulusSpec& annulus, const PolarGrid& grid, DegreePair target,
                                 Coupling coupling) {
  (void)coupling;  // the bubbles are built independently of epsilon
  if (grid.annulus().inner_radius() != annulus.inner_radius())
    throw ParameterError("grid does not match the annulus");
  ComplexField field(grid, Complex(1.0, 0.0));
  if (target.p == 0 && target.q == 0) return field;
  const double R = annulus.inner_radius();
  const double rho_c = 0.5 * (1.0 - R);
  const double delta = std::max(rho_c / 16.0, 3.0 * grid.d_theta());
  if (delta > rho_c / 4.0)
    throw ParameterError("grid too coarse: bubbles of size " + format_real(delta) + " do not fit in an annulus of width " +
                         format_real(1.0 - R));
  auto place = [&](int count, Boundary boundary) {
    const int n = std::abs(count);
    if (n == 0) return;
    // Blending discs of radius 2 rho_c must not overlap on the unit (or w-) circle.
    if (n > 1 && 2.0 * std::sin(kPi / n) < 4.0 * rho_c)
      throw ParameterError("too many bubbles for the boundary length");
    const BubbleSign sign = count > 0 ? BubbleSign::plus : BubbleSign::minus;
    const double c = boundary == Boundary::outer ? delta : delta * R;
    for (int j = 0; j < n; ++j) field = insert_boundary_bubble(field, boundary, sign, c, kTwoPi * j / n);
  };
  place(target.p, Boundary::outer);
  place(target.q, Boundary::inner);
  return field;
}

ComplexField blended_test_field(const PolarGrid& grid, DegreePair target, double bias) {
  if (!(bias > 0.0)) throw ParameterError("bias must be positive");
  const double R = grid.annulus().inner_radius();
  const int m = grid.n_angular();
  std::vector<Complex> values(grid.size());
  auto phase = [m](long long winding, int j) {
    const long long reduced = ((winding * j) % m + m) % m;
    return std::polar(1.0, kTwoPi * static_cast<double>(reduced) / m);
  };
  for (int i = 0; i < grid.n_radial(); ++i) {
    const double t = i + 1 == grid.n_radial() ? 1.0 : (grid.r(i) - R) / (1.0 - R);
    const double s = std::pow(t, bias);
    for (int j = 0; j < m; ++j)
      values[grid.index(i, j)] = phase(target.q, j) * ((1.0 - s) + s * phase(target.p - target.q, j));
  }
  return ComplexField(grid, std::move(values));
}

SharpBubblingDiagnostic sharp_bubbling_diagnostic(const ComplexField& field, Boundary boundary) {
  const auto& g = field.grid();
  const bool outer = boundary == Boundary::outer;
  const int i = outer ? g.n_radial() - 1 : 0;
  const auto ur = radial_derivative(field);
  const auto ut = angular_derivative(field);
  const double r = g.r(i);
  // Outward normal: +r on the outer circle, -r on the inner one.
  const double normal = outer ? 1.0 : -1.0;
  SharpBubblingDiagnostic d{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  for (int j = 0; j < g.n_angular(); ++j) {
    const auto k = g.index(i, j);
    const Complex u = field.values()[k];
    const double twist = wedge(u, ut[k] / r);
    const double flux = normal * (std::conj(u) * ur[k]).real();
    d.lower = std::max(d.lower, twist + flux);
    d.raise = std::min(d.raise, twist - flux);
  }
  return d;
}

}  // namespace annulus
