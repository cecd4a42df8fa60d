#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "annulus/grid.hpp"

namespace annulus {

// Q_p(R) = p - 1 - p R - R^p.
double q_polynomial(int p, double R);

// Unique zero of Q_p in (0,1) by bisection, |Q_p| < tol. p = 1 has no root.
double q_root(int p, double tol = 1e-12);

struct HypothesisCheck {
  bool holds = false;
  // 2 pi minus the radial energy gap (p >= 2) or minus E_inf(u_{inf,1}) (p = 1).
  double margin = 0.0;
  std::string label;
};

// Closed-form sufficient condition for m_inf(p,p) < m_inf(p-1,p-1) + 2 pi,
// through the radial energies. A false result leaves the hypothesis open.
HypothesisCheck hypothesis_h_check(int p, double R);

// Smallest R* with gb_integral_criterion(R, p, gamma) >= gamma on (R*, 1).
// The criterion is sampled first and must be increasing in R.
double beta_threshold(int p, double gamma = 4.0, double tol = 1e-6);

// E_inf(u_{inf,p}) - E_inf(u_{inf,p-1}).
double radial_energy_gap(int p, double R);

// 2 pi p (1 - R^p) / (1 + R^p), p >= 0.
double radial_harmonic_energy(int p, double R);

struct ThresholdReport {
  int p = 1;
  std::optional<double> q_root;  // empty for p = 1
  double beta_p = 0.0;
  std::vector<std::pair<double, bool>> hypothesis_h_holds_at;
  std::optional<double> capacity_at_root;
};

ThresholdReport threshold_report(int p, std::span<const double> sample_R, double gamma = 4.0);

std::string threshold_csv_header();  // "p,q_root,beta_p,capacity_at_q_root"
std::string to_csv_row(const ThresholdReport& report);
void write_threshold_csv(std::span<const ThresholdReport> reports, const std::filesystem::path& path);

}  // namespace annulus
