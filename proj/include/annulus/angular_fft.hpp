#pragma once

#include <complex>
#include <memory>
#include <span>
#include <vector>

namespace annulus {

// Batched FFTW transforms along the angular (contiguous) direction of a
// radial-major array with `rows` rings of `n` samples. Forward transforms are
// unnormalized, U_k = sum_j u_j exp(-i k theta_j).
class AngularFft {
 public:
  AngularFft(int rows, int n);
  ~AngularFft();
  AngularFft(AngularFft&&) noexcept;
  AngularFft& operator=(AngularFft&&) noexcept;
  AngularFft(const AngularFft&) = delete;
  AngularFft& operator=(const AngularFft&) = delete;

  int rows() const noexcept { return rows_; }
  int n() const noexcept { return n_; }

  void forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;
  // Inverse including the 1/n normalization.
  void inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;

  // Signed wavenumber of FFT bin b, in (-n/2, n/2]; the Nyquist bin is +n/2.
  int wavenumber(int bin) const noexcept { return bin <= n_ / 2 ? bin : bin - n_; }

  // d/dtheta, spectrally; the Nyquist mode is dropped.
  void derivative(std::span<const std::complex<double>> in, std::span<std::complex<double>> out) const;
  // -d^2/dtheta^2, spectrally, Nyquist mode kept (multiplier (n/2)^2).
  void minus_second_derivative(std::span<const std::complex<double>> in,
                               std::span<std::complex<double>> out) const;

 private:
  struct Plans;
  int rows_;
  int n_;
  std::unique_ptr<Plans> plans_;
  mutable std::vector<std::complex<double>> scratch_;
};

}  // namespace annulus
