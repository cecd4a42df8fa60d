#pragma once

#include <complex>
#include <filesystem>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "annulus/energy.hpp"
#include "annulus/radial.hpp"

namespace annulus {

// Fourier coefficients a_k, k in [-K, K], of an unwound boundary trace.
struct ModeCoefficients {
  int K = 0;
  std::vector<Complex> a;  // a[k + K]
  std::string source;
  double mass = 0.0;        // sum |a_k|^2
  double degree_sum = 0.0;  // sum k |a_k|^2

  Complex at(int k) const { return (k < -K || k > K) ? Complex{} : a[static_cast<std::size_t>(k + K)]; }
  // Recomputes mass and degree_sum from a.
  void refresh();
  static ModeCoefficients from_modes(int K, std::vector<Complex> a, std::string source);
};

// Ring values divided by e^{i q theta}, then the discrete Fourier transform
// normalized so that a pure e^{i(q+d)theta} gives a_d = 1. K = n_angular/2 - 1.
ModeCoefficients fourier_trace(const ComplexField& field, Boundary boundary, int q);

enum class Branch { I, II, III };
std::string to_string(Branch branch);
// I: k < -2q, II: -2q <= k <= 0, III: k > 0.
Branch branch_of(int k, int q);

struct SpectralBound {
  int k = 0;
  int q = 1;
  double R = 0.5;
  Branch branch = Branch::II;
  double value = 0.0;
};

// 2 R^{q/2} / (1 + R^q).
double rho_min(int q, double R);

// Closed-form parts of branch III.
struct CaseThreeParts {
  double m1, m2, m3;
};
CaseThreeParts case_three_parts(int k, int q, double R);

// Default resolution of the numerical branch-I value.
inline constexpr int kBranchOneNodes = 4096;

SpectralBound mode_bound(int k, int q, double R);

// Minimum of int_R^1 a(r)|f'|^2 + c(r)|f|^2 over f with f(1) = 1, free at R,
// by P1 finite elements on n_nodes uniform nodes (midpoint rule for a,
// trapezoid for c). An indefinite discrete form raises UnboundedBelowError.
double minimize_mode_functional(double R, int n_nodes, const std::function<double(double)>& a,
                                const std::function<double(double)>& c);

// Branches I and II: inf int w^2 r|f'|^2 + (k^2+2qk)/r s(r)|f|^2, with
// s = w^2 when k^2+2qk > 0 and s = 1 otherwise. Branch III: the weight is
// ignored and the three power-weight problems are minimized and combined.
double mode_bound_oracle(int k, int q, double R, const RadialProfile& weight, int n_nodes);
// Same with the constant weight rho_min.
double mode_bound_oracle(int k, int q, double R, int n_nodes);

// Threshold index from the combined bound: m_k >= k + 1/4 for all k >= K_R,
// K_R >= 2q + 2. Found by scanning down from the cap.
int k_r(int q, double R, int cap = 1000000);

struct LedgerRow {
  int k;
  Branch branch;
  double a_abs;
  double m_tilde;
  double contribution;  // |a_k|^2 (m_k - k)
};

struct LedgerReport {
  int p = 0, q = 0;
  double R = 0.0;
  int d = 0;
  int K_R = 0;
  double s_1_2q = 0.0;
  double s_2q1_kr1 = 0.0;
  double s_kr_inf = 0.0;
  double partial_total = 0.0;  // sum of the three partial sums
  double mode_sum = 0.0;       // sum |a_k|^2 m_k
  double excess = 0.0;         // sum |a_k|^2 (m_k - k)
  double degree_sum = 0.0;
  bool feasible = false;  // |degree_sum - d| < 0.05
  double eta = 0.0;       // min over 2q+1 <= |k| <= K_R-1 of m_k and (1-1e-6)(1-R)
  std::vector<double> asymmetry;  // |a_k| - |a_{-k}|, k = 1..K
  std::vector<LedgerRow> rows;
};

LedgerReport nonexistence_ledger(const ModeCoefficients& coeffs, int p, int q, double R);

void write_ledger_csv(const LedgerReport& report, const std::filesystem::path& path);

}  // namespace annulus
