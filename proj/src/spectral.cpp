#include "annulus/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "annulus/angular_fft.hpp"

namespace annulus {

namespace {

constexpr double kSlack = 1e-6;

void validate(int q, double R) {
  if (q < 1) throw ParameterError("q must be >= 1");
  AnnulusSpec check(R);
}

double sample(const RadialProfile& profile, double r) {
  if (profile.closed_form) return harmonic_value(profile.annulus.inner_radius(), profile.winding, r);
  const auto& x = profile.nodes;
  const auto& y = profile.values;
  if (x.size() == 1) return y.front();
  auto it = std::upper_bound(x.begin(), x.end(), r);
  if (it == x.begin()) return y.front();
  if (it == x.end()) return y.back();
  const auto i = static_cast<std::size_t>(it - x.begin());
  const double t = (r - x[i - 1]) / (x[i] - x[i - 1]);
  return (1.0 - t) * y[i - 1] + t * y[i];
}

}  // namespace

void ModeCoefficients::refresh() {
  std::vector<double> m(a.size()), d(a.size());
  for (int k = -K; k <= K; ++k) {
    const auto i = static_cast<std::size_t>(k + K);
    m[i] = std::norm(a[i]);
    d[i] = k * m[i];
  }
  mass = pairwise_sum(m);
  degree_sum = pairwise_sum(d);
}

ModeCoefficients ModeCoefficients::from_modes(int K, std::vector<Complex> a, std::string source) {
  if (K < 0 || a.size() != static_cast<std::size_t>(2 * K + 1))
    throw ParameterError("coefficient vector must have 2K+1 entries");
  ModeCoefficients c;
  c.K = K;
  c.a = std::move(a);
  c.source = std::move(source);
  c.refresh();
  return c;
}

ModeCoefficients fourier_trace(const ComplexField& field, Boundary boundary, int q) {
  const auto& g = field.grid();
  const int m = g.n_angular();
  const int i = boundary == Boundary::outer ? g.n_radial() - 1 : 0;
  const auto ring = field.ring(i);
  std::vector<Complex> unwound(static_cast<std::size_t>(m));
  for (int j = 0; j < m; ++j) {
    const Complex v = ring[static_cast<std::size_t>(j)];
    if (std::abs(v) < 1e-8) throw DegenerateBoundaryError("trace vanishes on the boundary ring");
    // e^{-i q theta_j} with the phase index reduced mod m.
    const long long phase = ((static_cast<long long>(-q) * j) % m + m) % m;
    unwound[static_cast<std::size_t>(j)] = v * std::polar(1.0, kTwoPi * static_cast<double>(phase) / m);
  }
  AngularFft fft(1, m);
  std::vector<Complex> spectrum(static_cast<std::size_t>(m));
  fft.forward(unwound, spectrum);
  const int K = m / 2 - 1;
  std::vector<Complex> a(static_cast<std::size_t>(2 * K + 1));
  for (int k = -K; k <= K; ++k) a[static_cast<std::size_t>(k + K)] = spectrum[static_cast<std::size_t>((k + m) % m)] / static_cast<double>(m);
  return ModeCoefficients::from_modes(
      K, std::move(a), std::string(boundary == Boundary::outer ? "outer" : "inner") + " trace, q = " + std::to_string(q));
}

std::string to_string(Branch branch) {
  switch (branch) {
    case Branch::I: return "I";
    case Branch::II: return "II";
    case Branch::III: return "III";
  }
  return "?";
}

Branch branch_of(int k, int q) {
  if (k > 0) return Branch::III;
  if (k >= -2 * q) return Branch::II;
  return Branch::I;
}

double rho_min(int q, double R) {
  const double rq = std::pow(R, q);
  return 2.0 * std::sqrt(rq) / (1.0 + rq);
}

CaseThreeParts case_three_parts(int k, int q, double R) {
  if (k <= 0) throw ParameterError("branch III needs k > 0");
  validate(q, R);
  const double alpha = static_cast<double>(k) * k + 2.0 * q * k;
  const double x = std::pow(R, 2.0 * (q + k));
  const double root = std::sqrt(alpha);
  const double y = std::pow(R, 2.0 * root);
  return {alpha * (1.0 - x) / (k * x + 2.0 * q + k), root * (1.0 - y) / (1.0 + y),
          alpha * (1.0 - x) / (k + (2.0 * q + k) * x)};
}

SpectralBound mode_bound(int k, int q, double R) {
  validate(q, R);
  SpectralBound bound{k, q, R, branch_of(k, q), 0.0};
  switch (bound.branch) {
    case Branch::II: {
      if (k == 0 || k == -2 * q) return bound;
      const double s = std::sqrt(-static_cast<double>(k) * k - 2.0 * q * k);
      const double rm = rho_min(q, R);
      const double arg = s * std::log(R) / rm;
      if (std::abs(arg) >= kPi / 2 - 1e-6)
        throw SingularityError("branch II tangent argument " + format_real(arg) + " reaches pi/2 for k = " +
                               std::to_string(k) + ", q = " + std::to_string(q) + ", R = " + format_real(R) +
                               "; the mode functional is unbounded below");
      bound.value = rm * s * std::tan(arg);
      return bound;
    }
    case Branch::III: {
      const auto parts = case_three_parts(k, q, R);
      const double rq = std::pow(R, q);
      bound.value = (parts.m1 + 2.0 * rq * parts.m2 + rq * rq * parts.m3) / ((1.0 + rq) * (1.0 + rq));
      return bound;
    }
    case Branch::I:
      bound.value = mode_bound_oracle(k, q, R, kBranchOneNodes);
      return bound;
  }
  return bound;
}

double minimize_mode_functional(double R, int n_nodes, const std::function<double(double)>& a,
                                const std::function<double(double)>& c) {
  if (n_nodes < 3) throw ParameterError("n_nodes must be >= 3");
  const auto n = static_cast<std::size_t>(n_nodes);
  const double h = (1.0 - R) / (n_nodes - 1);
  auto node = [&](std::size_t i) { return i + 1 == n ? 1.0 : R + h * static_cast<double>(i); };
  std::vector<double> edge(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) edge[i] = a(0.5 * (node(i) + node(i + 1))) / h;
  std::vector<double> diag(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double w = (i == 0 || i + 1 == n) ? 0.5 * h : h;
    diag[i] = c(node(i)) * w;
    if (i > 0) diag[i] += edge[i - 1];
    if (i + 1 < n) diag[i] += edge[i];
  }
  // Unknowns 0..n-2; f(1) = 1 enters the right-hand side.
  const std::size_t m = n - 1;
  std::vector<double> off(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) off[i] = -edge[i];
  std::vector<double> pivot(m);
  std::vector<double> f(m, 0.0);
  f[m - 1] = edge[m - 1];
  pivot[0] = diag[0];
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0) {
      const double l = off[i - 1] / pivot[i - 1];
      pivot[i] = diag[i] - l * off[i - 1];
      f[i] -= l * f[i - 1];
    }
    if (!(pivot[i] > 0.0))
      throw UnboundedBelowError("discrete mode functional is indefinite; the infimum is -infinity");
  }
  f[m - 1] /= pivot[m - 1];
  for (std::size_t i = m - 1; i-- > 0;) f[i] = (f[i] - off[i] * f[i + 1]) / pivot[i];
  return diag[n - 1] - edge[m - 1] * f[m - 1];
}

double mode_bound_oracle(int k, int q, double R, const RadialProfile& weight, int n_nodes) {
  validate(q, R);
  const double alpha = static_cast<double>(k) * k + 2.0 * q * k;
  if (branch_of(k, q) == Branch::III) {
    auto power = [&](double beta) {
      return minimize_mode_functional(
          R, n_nodes, [&](double r) { return std::pow(r, beta + 1.0); },
          [&](double r) { return alpha * std::pow(r, beta - 1.0); });
    };
    const double rq = std::pow(R, q);
    return (power(2.0 * q) + 2.0 * rq * power(0.0) + rq * rq * power(-2.0 * q)) / ((1.0 + rq) * (1.0 + rq));
  }
  for (double v : weight.values)
    if (!(v > 0.0)) throw ParameterError("oracle weight must be strictly positive");
  if (k == 0) return 0.0;
  const bool weighted_potential = alpha > 0.0;
  return minimize_mode_functional(
      R, n_nodes,
      [&](double r) {
        const double w = sample(weight, r);
        return w * w * r;
      },
      [&](double r) {
        const double w = weighted_potential ? sample(weight, r) : 1.0;
        return alpha * w * w / r;
      });
}

double mode_bound_oracle(int k, int q, double R, int n_nodes) {
  validate(q, R);
  RadialProfile weight{AnnulusSpec(R), 0, Coupling::infinite(), {R}, {rho_min(q, R)}, false};
  return mode_bound_oracle(k, q, R, weight, n_nodes);
}

int k_r(int q, double R, int cap) {
  validate(q, R);
  const int start = 2 * q + 2;
  if (cap < start) throw ParameterError("cap must be >= 2q+2");
  auto ok = [&](int k) { return mode_bound(k, q, R).value >= k + 0.25; };
  if (!ok(cap)) throw NoRootError("m_k >= k + 1/4 fails at the cap k = " + std::to_string(cap));
  for (int k = cap; k > start; --k)
    if (!ok(k - 1)) return k;
  return start;
}

LedgerReport nonexistence_ledger(const ModeCoefficients& coeffs, int p, int q, double R) {
  validate(q, R);
  if (p <= q) throw ParameterError("ledger needs p > q");
  LedgerReport report;
  report.p = p;
  report.q = q;
  report.R = R;
  report.d = p - q;
  report.K_R = k_r(q, R);
  if (coeffs.K < report.K_R)
    throw InsufficientResolutionError("coefficients reach K = " + std::to_string(coeffs.K) + " < K_R = " +
                                      std::to_string(report.K_R));
  const double t = 1.0 - R;
  auto abs2 = [&](int k) { return std::norm(coeffs.at(k)); };

  std::vector<double> s1, s2, s3;
  for (int k = 1; k <= 2 * q; ++k) {
    s1.push_back(abs2(k) * ((static_cast<double>(k) * k + 2.0 * q * k - kSlack) * t - k));
    s1.push_back(abs2(-k) * ((static_cast<double>(k) * k - 2.0 * q * k - kSlack) * t + k));
  }
  report.eta = (1.0 - kSlack) * t;
  for (int k = 2 * q + 1; k <= report.K_R - 1; ++k) {
    const double mp = mode_bound(k, q, R).value;
    const double mm = mode_bound(-k, q, R).value;
    s2.push_back(k * (abs2(-k) - abs2(k)) + abs2(k) * mp + abs2(-k) * mm);
    report.eta = std::min({report.eta, mp, mm});
  }
  for (int k = report.K_R; k <= coeffs.K; ++k)
    s3.push_back(abs2(k) / 4.0 + abs2(-k) * (mode_bound(-k, q, R).value + k));
  report.s_1_2q = pairwise_sum(s1);
  report.s_2q1_kr1 = pairwise_sum(s2);
  report.s_kr_inf = pairwise_sum(s3);
  report.partial_total = report.s_1_2q + report.s_2q1_kr1 + report.s_kr_inf;

  std::vector<double> ms, ex;
  for (int k = -coeffs.K; k <= coeffs.K; ++k) {
    const auto bound = mode_bound(k, q, R);
    const double w = abs2(k);
    ms.push_back(w * bound.value);
    ex.push_back(w * (bound.value - k));
    report.rows.push_back({k, bound.branch, std::abs(coeffs.at(k)), bound.value, ex.back()});
  }
  report.mode_sum = pairwise_sum(ms);
  report.excess = pairwise_sum(ex);
  report.degree_sum = coeffs.degree_sum;
  report.feasible = std::abs(coeffs.degree_sum - report.d) < 0.05;
  for (int k = 1; k <= coeffs.K; ++k) report.asymmetry.push_back(std::abs(coeffs.at(k)) - std::abs(coeffs.at(-k)));
  return report;
}

void write_ledger_csv(const LedgerReport& r, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << "k,branch,a_k_abs,m_tilde,k_contribution\n";
  for (const auto& row : r.rows)
    out << row.k << ',' << to_string(row.branch) << ',' << format_real(row.a_abs) << ',' << format_real(row.m_tilde)
        << ',' << format_real(row.contribution) << '\n';
  out << "# S_1_2q=" << format_real(r.s_1_2q) << " S_2q1_KR1=" << format_real(r.s_2q1_kr1)
      << " S_KR_inf=" << format_real(r.s_kr_inf) << " total=" << format_real(r.partial_total)
      << " d_pi=" << format_real(r.d * kPi) << " margin=" << format_real(r.excess) << " K_R=" << r.K_R
      << " feasible=" << (r.feasible ? "yes" : "no") << '\n';
}

}  // namespace annulus
