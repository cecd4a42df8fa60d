#include "annulus/angular_fft.hpp"

#include <fftw3.h>

#include <algorithm>

#include "annulus/common.hpp"

namespace annulus {

struct AngularFft::Plans {
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  ~Plans() {
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
};

namespace {

fftw_complex* as_fftw(std::complex<double>* p) { return reinterpret_cast<fftw_complex*>(p); }

}  // namespace

AngularFft::AngularFft(int rows, int n) : rows_(rows), n_(n), plans_(std::make_unique<Plans>()) {
  if (rows < 1 || n < 1) throw ParameterError("AngularFft needs positive dimensions");
  const std::size_t total = static_cast<std::size_t>(rows) * static_cast<std::size_t>(n);
  std::vector<std::complex<double>> a(total), b(total);
  int dims[1] = {n};
  const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
  plans_->forward = fftw_plan_many_dft(1, dims, rows, as_fftw(a.data()), nullptr, 1, n,
                                       as_fftw(b.data()), nullptr, 1, n, FFTW_FORWARD, flags);
  plans_->backward = fftw_plan_many_dft(1, dims, rows, as_fftw(a.data()), nullptr, 1, n,
                                        as_fftw(b.data()), nullptr, 1, n, FFTW_BACKWARD, flags);
  if (!plans_->forward || !plans_->backward) throw Error("FFTW planning failed");
  scratch_.resize(total);
}

AngularFft::~AngularFft() = default;
AngularFft::AngularFft(AngularFft&&) noexcept = default;
AngularFft& AngularFft::operator=(AngularFft&&) noexcept = default;

void AngularFft::forward(std::span<const std::complex<double>> in,
                         std::span<std::complex<double>> out) const {
  const std::complex<double>* src = in.data();
  if (src == out.data()) {
    std::copy(in.begin(), in.end(), scratch_.begin());
    src = scratch_.data();
  }
  fftw_execute_dft(plans_->forward, as_fftw(const_cast<std::complex<double>*>(src)), as_fftw(out.data()));
}

void AngularFft::inverse(std::span<const std::complex<double>> in,
                         std::span<std::complex<double>> out) const {
  const std::complex<double>* src = in.data();
  if (src == out.data()) {
    std::copy(in.begin(), in.end(), scratch_.begin());
    src = scratch_.data();
  }
  fftw_execute_dft(plans_->backward, as_fftw(const_cast<std::complex<double>*>(src)), as_fftw(out.data()));
  const double scale = 1.0 / n_;
  for (auto& v : out) v *= scale;
}

void AngularFft::derivative(std::span<const std::complex<double>> in,
                            std::span<std::complex<double>> out) const {
  std::vector<std::complex<double>> spec(in.size());
  forward(in, spec);
  for (int row = 0; row < rows_; ++row) {
    auto* s = spec.data() + static_cast<std::size_t>(row) * n_;
    for (int b = 0; b < n_; ++b) {
      const int k = wavenumber(b);
      s[b] = (2 * k == n_) ? std::complex<double>(0.0) : s[b] * std::complex<double>(0.0, k);
    }
  }
  inverse(spec, out);
}

void AngularFft::minus_second_derivative(std::span<const std::complex<double>> in,
                                         std::span<std::complex<double>> out) const {
  std::vector<std::complex<double>> spec(in.size());
  forward(in, spec);
  for (int row = 0; row < rows_; ++row) {
    auto* s = spec.data() + static_cast<std::size_t>(row) * n_;
    for (int b = 0; b < n_; ++b) {
      const double k = wavenumber(b);
      s[b] *= k * k;
    }
  }
  inverse(spec, out);
}

}  // namespace annulus
