#include "annulus/thresholds.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <fstream>

#include "annulus/radial.hpp"

namespace annulus {

namespace {

void require_p(int p, int minimum) {
  if (p < minimum) throw ParameterError("p must be >= " + std::to_string(minimum));
}

}  // namespace

double q_polynomial(int p, double R) {
  require_p(p, 1);
  if (!(R >= 0.0 && R <= 1.0)) throw ParameterError("R must lie in [0,1]");
  return static_cast<double>(p - 1) - p * R - std::pow(R, p);
}

double q_root(int p, double tol) {
  if (p == 1)
    throw NoRootError("Q_1(R) = -2R has no zero in (0,1); the hypothesis is unconditional for p = 1");
  require_p(p, 2);
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  double lo = 0.0, hi = 1.0;
  double mid = 0.5;
  for (int it = 0; it < 200; ++it) {
    mid = 0.5 * (lo + hi);
    const double value = q_polynomial(p, mid);
    if (std::abs(value) < tol && hi - lo < tol) break;
    if (value > 0.0)
      lo = mid;
    else
      hi = mid;
    if (hi - lo <= 0.0) break;
  }
  return mid;
}

double radial_harmonic_energy(int p, double R) {
  if (p < 0) throw ParameterError("p must be >= 0");
  const double rp = std::pow(R, p);
  return kTwoPi * p * (1.0 - rp) / (1.0 + rp);
}

double radial_energy_gap(int p, double R) {
  require_p(p, 2);
  AnnulusSpec annulus(R);
  return radial_harmonic_energy(p, R) - radial_harmonic_energy(p - 1, R);
}

HypothesisCheck hypothesis_h_check(int p, double R) {
  require_p(p, 1);
  AnnulusSpec annulus(R);
  HypothesisCheck check;
  if (p == 1) {
    check.holds = true;
    check.margin = kTwoPi - radial_harmonic_energy(1, R);
    check.label = "unconditional (p = 1)";
    return check;
  }
  check.margin = kTwoPi - radial_energy_gap(p, R);
  check.holds = q_polynomial(p, R) < 0.0;
  check.label = check.holds ? "closed-form sufficient condition: holds"
                            : "closed-form sufficient condition: fails; hypothesis undetermined";
  return check;
}

double beta_threshold(int p, double gamma, double tol) {
  require_p(p, 1);
  if (!(gamma > 0.0)) throw ParameterError("gamma must be positive");
  if (!(tol > 0.0)) throw ParameterError("tol must be positive");
  auto criterion = [&](double R) { return gb_integral_criterion(AnnulusSpec(R), p, gamma).value; };

  // Sample on a grid refined towards R = 1, where the threshold lives.
  constexpr int kSamples = 96;
  std::vector<double> Rs, values;
  for (int s = 0; s < kSamples; ++s) {
    const double t = (s + 1.0) / (kSamples + 1.0);
    Rs.push_back(1.0 - std::pow(1.0 - t, 2.0));
    values.push_back(criterion(Rs.back()));
  }
  for (std::size_t s = 1; s < values.size(); ++s)
    if (!(values[s] > values[s - 1]))
      throw NonMonotoneError("integral criterion is not increasing in R between R = " +
                             format_real(Rs[s - 1]) + " and R = " + format_real(Rs[s]));
  if (values.front() >= gamma) return 0.0;
  if (values.back() < gamma) {
    // Continue towards 1: the criterion blows up like 1/(1-R)^2.
    double lo = Rs.back();
    double hi = lo;
    while (criterion(hi) < gamma) {
      lo = hi;
      hi = 1.0 - 0.5 * (1.0 - hi);
      if (1.0 - hi < 1e-14) throw NoRootError("integral criterion stays below gamma");
    }
    Rs = {lo, hi};
    values = {criterion(lo), criterion(hi)};
  }
  std::size_t first = 0;
  while (values[first] < gamma) ++first;
  const double a = Rs[first - 1];
  const double b = Rs[first];
  boost::math::tools::eps_tolerance<double> stop(static_cast<int>(std::ceil(-std::log2(tol))));
  auto bracket = boost::math::tools::bisect([&](double R) { return criterion(R) - gamma; }, a, b,
                                            [&](double x, double y) { return y - x <= tol || stop(x, y); });
  return bracket.second;
}

ThresholdReport threshold_report(int p, std::span<const double> sample_R, double gamma) {
  ThresholdReport report;
  report.p = p;
  if (p >= 2) {
    report.q_root = q_root(p);
    report.capacity_at_root = AnnulusSpec(*report.q_root).capacity();
  }
  report.beta_p = beta_threshold(p, gamma);
  for (double R : sample_R) report.hypothesis_h_holds_at.emplace_back(R, hypothesis_h_check(p, R).holds);
  return report;
}

std::string threshold_csv_header() { return "p,q_root,beta_p,capacity_at_q_root"; }

std::string to_csv_row(const ThresholdReport& r) {
  std::string row = std::to_string(r.p) + ',';
  if (r.q_root) row += format_real(*r.q_root);
  row += ',' + format_real(r.beta_p) + ',';
  if (r.capacity_at_root) row += format_real(*r.capacity_at_root);
  return row;
}

void write_threshold_csv(std::span<const ThresholdReport> reports, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot open " + path.string());
  out << threshold_csv_header() << '\n';
  for (const auto& r : reports) out << to_csv_row(r) << '\n';
}

}  // namespace annulus
