#pragma once

/**
 * \file waves.hpp
 * \brief Snoidal periodic traveling waves of the phi^4 equation.
 *
 * A wave phi(x, t) = h(x + c t) with pair (h, c h') solves
 * -omega h'' - h + h^3 = 0, omega = 1 - c^2, and is given by
 *
 *     h(x) = a sn(b x; k),  a = sqrt(2) k / sqrt(1 + k^2),  b = 4 K(k) / L,
 *
 * where the modulus k is fixed by the period relation
 *
 *     omega = L^2 / (16 K(k)^2 (1 + k^2)).
 *
 * Because K(k) > pi/2, an L-periodic wave exists only when
 * 0 < omega < L^2 / (4 pi^2), i.e. sqrt(1 - L^2/(4 pi^2)) < |c| < 1.
 * The right-hand side is strictly decreasing in k, so the modulus is found
 * by bisection and polished by Newton steps.
 */

#include <cmath>
#include <cstddef>
#include <numbers>
#include <sstream>
#include <vector>

#include "phi4/elliptic.hpp"
#include "phi4/errors.hpp"
#include "phi4/grid.hpp"

namespace phi4 {

class WaveParameters;
WaveParameters solve_modulus(double period, double speed);

/// One wave on the curve c -> h_c for a fixed period L. Immutable once built.
class WaveParameters {
 public:
  double period() const noexcept { return L_; }
  double speed() const noexcept { return c_; }
  double omega() const noexcept { return omega_; }
  double modulus() const noexcept { return jac_.modulus(); }
  double amplitude() const noexcept { return a_; }
  double wavenumber() const noexcept { return b_; }
  double K() const noexcept { return jac_.K(); }
  double E() const noexcept { return jac_.E(); }
  const JacobiElliptic& jacobi() const noexcept { return jac_; }

  /// |16 K^2 (1 + k^2) omega / L^2 - 1|
  double dispersion_residual() const noexcept { return dispersion_residual_; }

 private:
  friend WaveParameters solve_modulus(double, double);
  WaveParameters(double L, double c, double omega, EllipticModulus k)
      : L_(L), c_(c), omega_(omega), jac_(k) {
    const double kk = k.value();
    a_ = std::numbers::sqrt2 * kk / std::sqrt(1.0 + kk * kk);
    b_ = 4.0 * jac_.K() / L_;
    dispersion_residual_ = std::abs(16.0 * jac_.K() * jac_.K() * (1.0 + kk * kk) * omega_ / (L_ * L_) - 1.0);
    check(std::abs(b_ * b_ * omega_ * (1.0 + kk * kk) - 1.0), "b^2 omega (1+k^2) = 1");
    check(std::abs(a_ * a_ / (2.0 * b_ * b_ * kk * kk * omega_) - 1.0), "a^2 = 2 b^2 k^2 omega");
    check(std::abs(b_ * L_ / (4.0 * jac_.K()) - 1.0), "b L = 4 K");
  }

  static void check(double rel, const char* what) {
    if (!(rel <= 1e-10)) {
      std::ostringstream os;
      os << "wave invariant violated: " << what << " (relative error " << rel << ")";
      throw ConsistencyError(os.str());
    }
  }

  double L_;
  double c_;
  double omega_;
  JacobiElliptic jac_;
  double a_ = 0.0;
  double b_ = 0.0;
  double dispersion_residual_ = 0.0;
};

/// Upper end of the admissible omega window for period L.
inline double max_omega(double period) {
  return period * period / (4.0 * std::numbers::pi * std::numbers::pi);
}

/// Smallest admissible |c| for period L.
inline double min_speed(double period) { return std::sqrt(1.0 - max_omega(period)); }

inline WaveParameters solve_modulus(double period, double speed) {
  constexpr double kLow = 1e-10;
  constexpr double kHigh = 1.0 - 1e-10;
  constexpr int kBisections = 200;
  constexpr int kNewtonSteps = 3;

  if (!(period > 0.0 && period < 2.0 * std::numbers::pi)) {
    std::ostringstream os;
    os << "period L=" << period << " outside (0, 2*pi)";
    throw OutOfRange(os.str());
  }
  const double omega = (1.0 - speed) * (1.0 + speed);
  const double omega_max = max_omega(period);
  if (!(omega > 0.0 && omega < omega_max)) {
    std::ostringstream os;
    os.precision(17);
    os << "no L-periodic snoidal wave at c=" << speed << ": omega=1-c^2=" << omega
       << " must lie in (0, L^2/(4 pi^2)) = (0, " << omega_max << "), i.e. "
       << min_speed(period) << " < |c| < 1";
    throw OutOfRange(os.str());
  }

  // f(k) = 16 K^2 (1+k^2) omega / L^2 - 1, strictly increasing in k.
  const double scale = 16.0 * omega / (period * period);
  auto f = [&](double k) {
    const JacobiElliptic j{EllipticModulus(k)};
    return scale * j.K() * j.K() * (1.0 + k * k) - 1.0;
  };

  double lo = kLow;
  double hi = kHigh;
  double flo = f(lo);
  double fhi = f(hi);
  if (!(flo < 0.0 && fhi > 0.0)) {
    std::ostringstream os;
    os << "modulus root not bracketed in (" << kLow << ", " << kHigh << ") for omega=" << omega;
    throw ModulusAtBoundary(os.str());
  }
  for (int it = 0; it < kBisections && hi - lo > 0.0; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm == 0.0) {
      lo = hi = mid;
      break;
    }
    (fm < 0.0 ? lo : hi) = mid;
  }

  double k = 0.5 * (lo + hi);
  double fk = f(k);
  for (int it = 0; it < kNewtonSteps && fk != 0.0; ++it) {
    const JacobiElliptic j{EllipticModulus(k)};
    const double kp2 = (1.0 - k) * (1.0 + k);
    const double dK = (j.E() - kp2 * j.K()) / (k * kp2);
    const double df = scale * (2.0 * j.K() * dK * (1.0 + k * k) + 2.0 * k * j.K() * j.K());
    const double next = k - fk / df;
    if (!(next > kLow && next < kHigh)) break;
    const double fn = f(next);
    if (std::abs(fn) >= std::abs(fk)) break;
    k = next;
    fk = fn;
  }
  if (k <= kLow * (1.0 + 1e-6) || k >= kHigh - 1e-16) {
    std::ostringstream os;
    os << "modulus k=" << k << " hit the bracket endpoint for omega=" << omega;
    throw ModulusAtBoundary(os.str());
  }
  return WaveParameters(period, speed, omega, EllipticModulus(k));
}

struct ProfileValues {
  double h;
  double dh;
  double d2h;
};

/// h, h', h'' at a single point.
inline ProfileValues profile_eval(const WaveParameters& p, double x) {
  const double a = p.amplitude();
  const double b = p.wavenumber();
  const double k2 = p.modulus() * p.modulus();
  const SnCnDn s = p.jacobi()(b * x);
  return {a * s.sn, a * b * s.cn * s.dn, -a * b * b * s.sn * (1.0 + k2 - 2.0 * k2 * s.sn * s.sn)};
}

struct WaveSamples {
  GridField h;
  GridField dh;
  GridField d2h;
};

inline WaveSamples sample_wave(const WaveParameters& p, std::size_t n) {
  WaveSamples out{GridField::zeros(p.period(), n), GridField::zeros(p.period(), n),
                  GridField::zeros(p.period(), n)};
  for (std::size_t j = 0; j < n; ++j) {
    const ProfileValues v = profile_eval(p, out.h.x(j));
    out.h[j] = v.h;
    out.dh[j] = v.dh;
    out.d2h[j] = v.d2h;
  }
  return out;
}

/// sup_j |-omega h'' - h + h^3| on the grid. amplitude_scale != 1 evaluates a corrupted profile.
inline double ode_residual(const WaveParameters& p, std::size_t n, double amplitude_scale = 1.0) {
  const WaveSamples w = sample_wave(p, n);
  double r = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double h = amplitude_scale * w.h[j];
    const double d2h = amplitude_scale * w.d2h[j];
    r = std::max(r, std::abs(-p.omega() * d2h - h + h * h * h));
  }
  return r;
}

}  // namespace phi4
