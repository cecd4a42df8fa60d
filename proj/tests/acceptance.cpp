// Acceptance suite: one PASS/FAIL line per criterion, exit status = number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "annulus/energy.hpp"
#include "annulus/flow.hpp"
#include "annulus/radial.hpp"
#include "annulus/spectral.hpp"
#include "annulus/thresholds.hpp"

using namespace annulus;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const std::function<Outcome()>& check) {
  const auto start = Clock::now();
  Outcome out{false, ""};
  try {
    out = check();
  } catch (const std::exception& e) {
    out = {false, std::string("exception: ") + e.what()};
  }
  if (!out.pass) ++failures;
  std::printf("criterion %2d: %s  %s  [%s] (%.1f s)\n", id, out.pass ? "PASS" : "FAIL", title.c_str(),
              out.detail.c_str(), seconds_since(start));
  std::fflush(stdout);
}

std::string fmt(const char* format, auto... args) {
  char buffer[512];
  std::snprintf(buffer, sizeof buffer, format, args...);
  return buffer;
}

std::vector<double> uniform_nodes(double R, int n) {
  std::vector<double> r(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) r[static_cast<std::size_t>(i)] = R + (1.0 - R) * i / (n - 1);
  r.back() = 1.0;
  return r;
}

// Tolerances.
constexpr double kEnergyRel = 1e-4;
constexpr double kEnergySeconds = 5.0;
constexpr double kRootTol = 1e-10;
constexpr double kRootSeconds = 1e-3;
constexpr double kSpectralRel = 1e-3;
constexpr double kSpectralSeconds = 60.0;
constexpr double kSlack = 1e-6;
constexpr double kComparisonMargin = -1e-9;
constexpr double kMonotoneSlack = 1e-14;
constexpr double kBubbleExcess = 0.15;
constexpr double kAssembleExcess = 0.2;
constexpr double kJacobianDefect = 0.01 * kPi;
constexpr double kJacobianRatio = 4.0;
constexpr double kJacobianRatioTol = 0.15;
constexpr int kStationaryIterations = 50;
constexpr double kStationaryResidual = 1e-6;
constexpr double kEscapeEnergyRel = 0.05;

Outcome criterion_1() {
  double worst = 0.0, slowest = 0.0;
  for (int p = 1; p <= 3; ++p)
    for (double R : {0.3, 0.5, 0.9}) {
      const auto start = Clock::now();
      const auto g = make_grid(AnnulusSpec(R), 512, 512);
      const auto f = radial_ansatz(g, harmonic_profile(g.annulus(), p, g.radial_nodes()), p);
      const double e = evaluate_energy(f, Coupling::infinite()).total;
      slowest = std::max(slowest, seconds_since(start));
      worst = std::max(worst, std::abs(e - radial_harmonic_energy(p, R)) / radial_harmonic_energy(p, R));
    }
  return {worst < kEnergyRel && slowest < kEnergySeconds,
          fmt("max rel err %.2e < %.0e, slowest case %.2f s", worst, kEnergyRel, slowest)};
}

Outcome criterion_2() {
  const auto start = Clock::now();
  const double root = q_root(2);
  const double elapsed = seconds_since(start);
  const double err = std::abs(root - (std::sqrt(2.0) - 1.0));
  return {err < kRootTol && elapsed < kRootSeconds, fmt("|err| %.2e, %.2e s", err, elapsed)};
}

Outcome criterion_3() {
  int mismatches = 0, total = 0;
  for (int p = 2; p <= 6; ++p)
    for (int i = 0; i < 50; ++i) {
      const double R = (i + 0.5) / 50.0;
      const double gap = radial_energy_gap(p, R) - kTwoPi;
      const double Q = q_polynomial(p, R);
      ++total;
      if ((gap < 0) != (Q < 0) || (gap > 0) != (Q > 0)) ++mismatches;
    }
  return {mismatches == 0, fmt("%d mismatches in %d samples", mismatches, total)};
}

Outcome criterion_4() {
  const auto start = Clock::now();
  double worst = 0.0;
  std::string where;
  for (int q = 1; q <= 3; ++q)
    for (double R : {0.95, 0.99})
      for (int k = -4 * q; k <= 4 * q; ++k) {
        const auto bound = mode_bound(k, q, R);
        const double reference = bound.branch == Branch::I ? mode_bound_oracle(k, q, R, 2 * kBranchOneNodes)
                                                           : mode_bound_oracle(k, q, R, kBranchOneNodes);
        const double delta = std::abs(bound.value - reference) / std::max(1.0, std::abs(bound.value));
        if (delta > worst) {
          worst = delta;
          where = fmt("q=%d R=%g k=%d", q, R, k);
        }
      }
  const double elapsed = seconds_since(start);
  return {worst < kSpectralRel && elapsed < kSpectralSeconds,
          fmt("max rel delta %.2e at %s, %.1f s", worst, where.c_str(), elapsed)};
}

Outcome criterion_5() {
  const double R = 0.999;
  const double t = 1.0 - R;
  int first_failures = 0, second_failures = 0, bisa_failures = 0;
  double worst_first = 0.0;
  for (int q = 1; q <= 3; ++q) {
    for (int k = -2 * q; k <= -1; ++k) {
      const double alpha = static_cast<double>(k) * k + 2.0 * q * k;
      const double gap = mode_bound(k, q, R).value - (alpha - kSlack) * t;
      if (gap < 0.0) {
        ++first_failures;
        worst_first = std::min(worst_first, gap);
      }
    }
    for (int k = 1; k <= 2 * q; ++k) {
      const double alpha = static_cast<double>(k) * k + 2.0 * q * k;
      if (mode_bound(k, q, R).value < (alpha - kSlack) * t) ++second_failures;
    }
    if (!(1.0 - 2.0 * q * t > 0.0)) ++bisa_failures;
  }
  return {first_failures == 0 && second_failures == 0 && bisa_failures == 0,
          fmt("negative-k slack violations %d (worst %.2e), positive-k violations %d, 1-2q(1-R) violations %d",
              first_failures, worst_first, second_failures, bisa_failures)};
}

Outcome criterion_6() {
  double worst = 1e300;
  for (double R : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    const auto nodes = uniform_nodes(R, 1024);
    for (int p = 1; p <= 3; ++p) {
      const auto h = harmonic_profile(AnnulusSpec(R), p, nodes);
      for (double eps : {1.0, 10.0, 100.0}) {
        const auto prof = solve_gl_profile(AnnulusSpec(R), p, Coupling::finite(eps), nodes);
        for (std::size_t i = 0; i < nodes.size(); ++i) worst = std::min(worst, prof.values[i] - h.values[i]);
      }
    }
  }
  return {worst >= kComparisonMargin, fmt("min margin %.2e >= %.0e", worst, kComparisonMargin)};
}

Outcome criterion_7() {
  double worst = -1e300;
  for (double R : {0.1, 0.3, 0.5, 0.7, 0.9})
    for (int p = 1; p <= 5; ++p)
      for (double r : uniform_nodes(R, 1024))
        worst = std::max(worst, harmonic_value(R, p + 1, r) - harmonic_value(R, p, r));
  std::vector<double> beta;
  for (int p = 1; p <= 5; ++p) beta.push_back(beta_threshold(p));
  bool monotone = true;
  for (std::size_t i = 1; i < beta.size(); ++i) monotone = monotone && beta[i] >= beta[i - 1];
  return {worst <= kMonotoneSlack && monotone,
          fmt("max rho_{p+1}-rho_p %.2e, beta_1..5 = %.6f %.6f %.6f %.6f %.6f", worst, beta[0], beta[1], beta[2],
              beta[3], beta[4])};
}

Outcome criterion_8() {
  const auto g = make_grid(AnnulusSpec(0.5), 1024, 1024);
  const ComplexField one(g, Complex(1.0, 0.0));
  const Coupling c = Coupling::infinite();
  bool ok = true;
  double worst_bubble = -1e300;
  for (Boundary b : {Boundary::outer, Boundary::inner})
    for (BubbleSign s : {BubbleSign::plus, BubbleSign::minus}) {
      const auto f = insert_boundary_bubble(one, b, s, 0.02);
      const auto d = read_degrees(f);
      const int change = static_cast<int>(s);
      ok = ok && d.outer == (b == Boundary::outer ? change : 0) && d.inner == (b == Boundary::inner ? change : 0);
      worst_bubble = std::max(worst_bubble, evaluate_energy(f, c).total - kPi);
    }
  double worst_assembled = -1e300;
  int pairs = 0;
  for (int p = -4; p <= 4; ++p)
    for (int q = -4; q <= 4; ++q) {
      if (std::abs(p) + std::abs(q) > 4) continue;
      const auto f = assemble_test_field(g.annulus(), g, {p, q}, c);
      const auto d = read_degrees(f);
      ok = ok && d.outer == p && d.inner == q;
      worst_assembled = std::max(worst_assembled, evaluate_energy(f, c).total - kPi * (std::abs(p) + std::abs(q)));
      ++pairs;
    }
  ok = ok && worst_bubble <= kBubbleExcess && worst_assembled <= kAssembleExcess;
  return {ok, fmt("degrees %s, bubble excess %.4f <= %.2f, assembled excess %.4f <= %.1f over %d pairs",
                  ok ? "exact" : "checked", worst_bubble, kBubbleExcess, worst_assembled, kAssembleExcess, pairs)};
}

// Smooth field with degrees (q + d, q), unimodular on both rings, with a
// nonconstant interior modulus and a non-symmetric phase wobble.
ComplexField smooth_field(const PolarGrid& g, int d, int q) {
  const double R = g.annulus().inner_radius();
  std::vector<Complex> v(g.size());
  for (int i = 0; i < g.n_radial(); ++i) {
    const double t = (g.r(i) - R) / (1.0 - R);
    const double s = t * t * (3.0 - 2.0 * t);
    const double bump = std::sin(kPi * t);
    for (int j = 0; j < g.n_angular(); ++j) {
      const double th = g.theta(j);
      const double modulus = 1.0 - 0.3 * bump * (1.0 + 0.5 * std::cos(2.0 * th + 0.3));
      const Complex wobble = std::polar(1.0, 0.4 * bump * std::cos(th) + 0.2 * bump * bump * std::sin(3.0 * th));
      v[g.index(i, j)] =
          modulus * std::polar(1.0, q * th) * ((1.0 - s) + s * std::polar(1.0, d * th)) * wobble;
    }
  }
  return ComplexField(g, std::move(v));
}

Outcome criterion_9() {
  bool ok = true;
  std::ostringstream detail;
  for (int d = 0; d <= 2; ++d) {
    const double coarse = std::abs(jacobian_degree_defect(smooth_field(make_grid(AnnulusSpec(0.5), 128, 128), d, 1)));
    const double fine = std::abs(jacobian_degree_defect(smooth_field(make_grid(AnnulusSpec(0.5), 256, 256), d, 1)));
    const double ratio = coarse / fine;
    // Below roundoff the ratio carries no information.
    const bool at_roundoff = coarse < 1e-12 && fine < 1e-12;
    const bool pass = coarse < kJacobianDefect && fine < kJacobianDefect &&
                      (at_roundoff || std::abs(ratio - kJacobianRatio) <= kJacobianRatioTol * kJacobianRatio);
    ok = ok && pass;
    if (at_roundoff)
      detail << fmt("d=%d defect %.2e -> %.2e (roundoff); ", d, coarse, fine);
    else
      detail << fmt("d=%d defect %.2e -> %.2e ratio %.2f; ", d, coarse, fine, ratio);
  }
  return {ok, detail.str()};
}

FlowConfig stationary_config() {
  FlowConfig config;
  config.max_iterations = kStationaryIterations;
  config.grad_tol = 1e-7;
  return config;
}

FlowResult stationary_run(int p) {
  const auto g = make_grid(AnnulusSpec(0.995), 64, 256);
  const Coupling c = Coupling::finite(100.0);
  const auto prof = solve_gl_profile(g.annulus(), p, c, g.radial_nodes());
  return run_flow(radial_ansatz(g, prof, p), c, stationary_config());
}

Outcome criterion_10() {
  bool ok = true;
  std::ostringstream detail;
  for (int p : {1, 2}) {
    const auto result = stationary_run(p);
    const auto& last = result.trace.records.back();
    const bool pass = result.trace.status == FlowStatus::converged &&
                      result.trace.iterations <= kStationaryIterations && last.degrees.outer == p &&
                      last.degrees.inner == p && last.interior_residual < kStationaryResidual;
    ok = ok && pass;
    detail << fmt("p=%d %s in %d its, degrees (%d,%d), residual %.2e; ", p, to_string(result.trace.status).c_str(),
                  result.trace.iterations, last.degrees.outer, last.degrees.inner, last.interior_residual);
  }
  return {ok, detail.str()};
}

constexpr double kEscapeR = 0.99;
constexpr int kEscapeRadial = 256;
constexpr int kEscapeAngular = 512;

FlowConfig escape_config() {
  FlowConfig config;
  config.max_iterations = 2500;
  config.grad_tol = 1e-7;
  config.perturbation = 1e-2;
  config.seed = 20240611;
  return config;
}

FlowResult escape_run() {
  const auto g = make_grid(AnnulusSpec(kEscapeR), kEscapeRadial, kEscapeAngular);
  return run_flow(blended_test_field(g, {3, 2}), Coupling::finite(100.0), escape_config());
}

std::string trace_bytes(const FlowTrace& trace);

// Trace of the first escape run, reused by the determinism check.
std::string first_escape_trace;

Outcome criterion_11() {
  const auto g = make_grid(AnnulusSpec(kEscapeR), kEscapeRadial, kEscapeAngular);
  const Coupling c = Coupling::finite(100.0);
  // Estimate of m(2,2): energy of the degree-2 radial solution on the same grid.
  const double m22 = evaluate_energy(radial_ansatz(g, solve_gl_profile(g.annulus(), 2, c, g.radial_nodes()), 2), c).total;
  const double target = m22 + kPi;
  const auto result = escape_run();
  first_escape_trace = trace_bytes(result.trace);
  const auto& last = result.trace.records.back();
  const bool event = result.trace.has_event(FlowEventKind::boundary_degeneracy) ||
                     result.trace.has_event(FlowEventKind::degree_jump);
  double degeneracy_energy = std::nan("");
  for (const auto& e : result.trace.events)
    if (e.kind == FlowEventKind::boundary_degeneracy) {
      degeneracy_energy = e.energy_before;
      break;
    }
  // Energy of the (3,2) phase when the outer degree drops.
  const auto escape = result.trace.escape_energy();
  const double rel = escape ? std::abs(*escape - target) / target : std::nan("");
  const bool ok = event && escape && last.degrees.outer == 2 && last.degrees.inner == 2 && rel < kEscapeEnergyRel;
  return {ok, fmt("event %s, terminal degrees (%d,%d), escape energy %.5f vs m(2,2)+pi = %.5f (rel %.3f < %.2f), "
                  "energy at degeneracy onset %.5f, terminal energy %.5f, %s after %d its",
                  event ? "recorded" : "absent", last.degrees.outer, last.degrees.inner, escape ? *escape : std::nan(""),
                  target, rel, kEscapeEnergyRel, degeneracy_energy, last.energy.total,
                  to_string(result.trace.status).c_str(), result.trace.iterations)};
}

std::string trace_bytes(const FlowTrace& trace) {
  const auto path = std::filesystem::temp_directory_path() / "annulus_acceptance_trace.csv";
  write_trace_csv(trace, path);
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  std::filesystem::remove(path);
  return s.str();
}

Outcome criterion_12() {
  bool ok = true;
  for (int p : {1, 2}) ok = ok && trace_bytes(stationary_run(p).trace) == trace_bytes(stationary_run(p).trace);
  const std::string first = first_escape_trace.empty() ? trace_bytes(escape_run().trace) : first_escape_trace;
  const std::string second = trace_bytes(escape_run().trace);
  ok = ok && first == second;
  return {ok, fmt("stationary and escape traces %s (%zu bytes)", ok ? "byte-identical" : "differ", first.size())};
}

}  // namespace

int main() {
  report(1, "radial harmonic energy", criterion_1);
  report(2, "Q_2 root", criterion_2);
  report(3, "gap vs Q_p sign chain", criterion_3);
  report(4, "mode bounds vs oracle", criterion_4);
  report(5, "slack inequalities at R=0.999", criterion_5);
  report(6, "comparison with the harmonic profile", criterion_6);
  report(7, "monotonicity in p", criterion_7);
  report(8, "bubble energy contract", criterion_8);
  report(9, "degree/Jacobian identity", criterion_9);
  report(10, "radial stationarity at R=0.995", criterion_10);
  report(11, "degree escape from (3,2) at R=0.99", criterion_11);
  report(12, "determinism", criterion_12);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
