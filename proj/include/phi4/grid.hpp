#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "phi4/fourier.hpp"

namespace phi4 {

/// Samples of an L-periodic function at x_j = j L / N, j = 0..N-1.
class GridField {
 public:
  static constexpr std::size_t kMinSize = 16;

  GridField(double period, std::vector<double> values) : period_(period), values_(std::move(values)) {
    if (!(period > 0.0)) throw std::invalid_argument("grid period must be positive");
    if (values_.size() < kMinSize || values_.size() % 2 != 0) {
      throw std::invalid_argument("grid size must be even and >= 16");
    }
  }

  static GridField zeros(double period, std::size_t n) { return {period, std::vector<double>(n, 0.0)}; }

  template <class F>
  static GridField sample(double period, std::size_t n, F&& f) {
    std::vector<double> v(n);
    for (std::size_t j = 0; j < n; ++j) v[j] = f(period * static_cast<double>(j) / static_cast<double>(n));
    return {period, std::move(v)};
  }

  double period() const noexcept { return period_; }
  std::size_t size() const noexcept { return values_.size(); }
  double spacing() const noexcept { return period_ / static_cast<double>(values_.size()); }
  double x(std::size_t j) const noexcept { return spacing() * static_cast<double>(j); }

  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double& operator[](std::size_t j) noexcept { return values_[j]; }

  /// Trapezoid mean over one period (the plain average on a periodic grid).
  double mean() const noexcept {
    return std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
  }
  /// Trapezoid integral over one period; exact for band-limited data.
  double integral() const noexcept { return period_ * mean(); }
  double max_abs() const noexcept {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  /// Fourier spectral derivative. Odd orders drop the Nyquist mode.
  GridField derivative(int order = 1) const {
    FourierWorkspace fft(size());
    std::vector<FourierWorkspace::Complex> c(fft.modes());
    fft.forward(values_, c);
    const std::complex<double> I(0.0, 1.0);
    for (std::size_t m = 0; m < c.size(); ++m) {
      if (order % 2 == 1 && m == size() / 2) {
        c[m] = 0.0;
        continue;
      }
      c[m] *= std::pow(I * wavenumber(m, period_), order);
    }
    GridField out = zeros(period_, size());
    fft.backward(c, out.values());
    return out;
  }

  Eigen::Map<const Eigen::VectorXd> vector() const noexcept {
    return {values_.data(), static_cast<Eigen::Index>(values_.size())};
  }

 private:
  double period_;
  std::vector<double> values_;
};

/// L^2 inner product by the trapezoid rule.
inline double inner(const GridField& u, const GridField& v) {
  if (u.size() != v.size()) throw std::invalid_argument("grid size mismatch");
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) s += u[j] * v[j];
  return s * u.spacing();
}

namespace detail {

// i - j reduced to (-n/2, n/2]. Entries depend only on the offset mod n, and the reduced
// offset keeps the trigonometric arguments in [-pi/2, pi/2] where they are well conditioned.
inline long periodic_offset(std::size_t i, std::size_t j, std::size_t n) {
  const long len = static_cast<long>(n);
  long d = (static_cast<long>(i) - static_cast<long>(j)) % len;
  if (d > len / 2) d -= len;
  if (d <= -len / 2) d += len;
  return d;
}

}  // namespace detail

/// Fourier collocation first-derivative matrix (skew-symmetric) on N points of period L.
inline Eigen::MatrixXd fourier_first_derivative_matrix(std::size_t n, double period) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double scale = 2.0 * std::numbers::pi / period;
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      const long diff = detail::periodic_offset(i, j, n);
      if (2 * static_cast<std::size_t>(std::abs(diff)) == n) continue;  // cot(pi/2) = 0
      const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
      const double arg = 0.5 * static_cast<double>(diff) * h;
      d(i, j) = scale * 0.5 * sign * std::cos(arg) / std::sin(arg);
    }
  }
  return d;
}

/// Fourier collocation second-derivative matrix (symmetric) on N points of period L.
inline Eigen::MatrixXd fourier_second_derivative_matrix(std::size_t n, double period) {
  const double h = 2.0 * std::numbers::pi / static_cast<double>(n);
  const double scale = std::pow(2.0 * std::numbers::pi / period, 2);
  Eigen::MatrixXd d(n, n);
  const double diag = -std::numbers::pi * std::numbers::pi / (3.0 * h * h) - 1.0 / 6.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) {
        d(i, j) = scale * diag;
        continue;
      }
      const long diff = detail::periodic_offset(i, j, n);
      const double sign = (diff % 2 == 0) ? 1.0 : -1.0;
      const double s = std::sin(0.5 * static_cast<double>(diff) * h);
      d(i, j) = -scale * 0.5 * sign / (s * s);
    }
  }
  return d;
}

}  // namespace phi4
