#pragma once

#include <span>
#include <vector>

namespace annulus::detail {

// Thomas algorithm for a real tridiagonal system; `rhs` may hold real or
// complex entries and is overwritten with the solution. lower[0] and
// upper[n-1] are ignored. Returns false on a zero pivot.
template <typename T>
bool solve_tridiagonal(std::span<const double> lower, std::span<const double> diag,
                       std::span<const double> upper, std::span<T> rhs,
                       std::vector<double>& work) {
  const std::size_t n = diag.size();
  work.resize(n);
  double pivot = diag[0];
  if (pivot == 0.0) return false;
  rhs[0] /= pivot;
  for (std::size_t i = 1; i < n; ++i) {
    work[i] = upper[i - 1] / pivot;
    pivot = diag[i] - lower[i] * work[i];
    if (pivot == 0.0) return false;
    rhs[i] = (rhs[i] - lower[i] * rhs[i - 1]) / pivot;
  }
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] -= work[i + 1] * rhs[i + 1];
  return true;
}

// Pivots of the LDL^T factorization of a symmetric tridiagonal matrix
// (diag, off), off[i] coupling i and i+1. All pivots > 0 iff positive definite.
inline std::vector<double> ldl_pivots(std::span<const double> diag, std::span<const double> off) {
  std::vector<double> d(diag.size());
  d[0] = diag[0];
  for (std::size_t i = 1; i < diag.size(); ++i) d[i] = diag[i] - off[i - 1] * off[i - 1] / d[i - 1];
  return d;
}

}  // namespace annulus::detail
