#pragma once

// RAII wrapper around FFTW real-to-complex transforms on an N-point periodic grid.

#include <fftw3.h>

#include <algorithm>
#include <complex>
#include <cstddef>
#include <mutex>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace phi4 {

namespace detail {
// FFTW's planner is not re-entrant.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace detail

/// Per-run transform workspace. Not shareable between threads; create one per job.
class FourierWorkspace {
 public:
  using Complex = std::complex<double>;

  explicit FourierWorkspace(std::size_t n) : n_(n), modes_(n / 2 + 1) {
    if (n < 2 || n % 2 != 0) throw std::invalid_argument("FFT size must be even and >= 2");
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(modes_);
    std::lock_guard lock(detail::fftw_planner_mutex());
    forward_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec_, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec_, real_, FFTW_ESTIMATE);
  }

  FourierWorkspace(const FourierWorkspace&) = delete;
  FourierWorkspace& operator=(const FourierWorkspace&) = delete;

  ~FourierWorkspace() {
    {
      std::lock_guard lock(detail::fftw_planner_mutex());
      fftw_destroy_plan(backward_);
      fftw_destroy_plan(forward_);
    }
    fftw_free(spec_);
    fftw_free(real_);
  }

  std::size_t size() const noexcept { return n_; }
  std::size_t modes() const noexcept { return modes_; }

  /// Normalized coefficients: values_j = sum_n c_n exp(2 pi i n j / N) (Hermitian completion implied).
  void forward(std::span<const double> values, std::span<Complex> coeffs) {
    std::copy(values.begin(), values.end(), real_);
    fftw_execute(forward_);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t m = 0; m < modes_; ++m) coeffs[m] = Complex(spec_[m][0], spec_[m][1]) * scale;
  }

  void backward(std::span<const Complex> coeffs, std::span<double> values) {
    for (std::size_t m = 0; m < modes_; ++m) {
      spec_[m][0] = coeffs[m].real();
      spec_[m][1] = coeffs[m].imag();
    }
    fftw_execute(backward_);
    std::copy(real_, real_ + n_, values.begin());
  }

 private:
  std::size_t n_;
  std::size_t modes_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan forward_ = nullptr;
  fftw_plan backward_ = nullptr;
};

/// Physical wavenumber 2 pi m / L of the r2c mode index m.
inline double wavenumber(std::size_t m, double period) {
  return 2.0 * std::numbers::pi * static_cast<double>(m) / period;
}

}  // namespace phi4
