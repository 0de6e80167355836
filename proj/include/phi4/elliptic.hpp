#pragma once

/**
 * \file elliptic.hpp
 * \brief Complete elliptic integrals K(k), E(k) and Jacobi functions sn, cn, dn.
 *
 * Everything is computed from the arithmetic-geometric mean of 1 and the
 * complementary modulus k' = sqrt(1 - k^2):
 *  - K = pi / (2 a_N),
 *  - E = K (1 - sum_n 2^(n-1) c_n^2),
 *  - sn, cn by the descending recursion on the AGM amplitudes
 *    (Abramowitz & Stegun 16.4), dn = sqrt(1 - k^2 sn^2).
 *
 * Arguments of the Jacobi functions are reduced to [0, K] using the
 * quarter-period symmetries before the recursion runs, so sn is exactly odd
 * and the accuracy does not degrade for large |u|.
 */

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "phi4/errors.hpp"

namespace phi4 {

/// Modulus k of the Jacobi functions, strictly inside (0, 1).
class EllipticModulus {
 public:
  /// Moduli closer than this to 0 or 1 are rejected.
  static constexpr double kEdgeGuard = 1e-12;

  explicit EllipticModulus(double k) : k_(k) {
    if (!(k >= kEdgeGuard && k <= 1.0 - kEdgeGuard)) {
      std::ostringstream os;
      os << "elliptic modulus k=" << k << " outside (0, 1) (guard " << kEdgeGuard << ")";
      throw OutOfRange(os.str());
    }
  }

  double value() const noexcept { return k_; }
  /// k' = sqrt(1 - k^2), formed without cancellation near k = 1.
  double complement() const noexcept { return std::sqrt((1.0 - k_) * (1.0 + k_)); }

 private:
  double k_;
};

struct SnCnDn {
  double sn;
  double cn;
  double dn;
};

/// AGM tables for one modulus; evaluates K, E and sn/cn/dn without repeating the iteration.
class JacobiElliptic {
 public:
  static constexpr int kMaxIterations = 64;
  static constexpr double kTolerance = 1e-15;

  explicit JacobiElliptic(EllipticModulus k) : k_(k.value()) {
    double a = 1.0;
    double b = k.complement();
    a_[0] = a;
    c_[0] = k_;
    double sum = 0.5 * k_ * k_;  // 2^(n-1) c_n^2 at n = 0
    double weight = 0.5;
    int n = 0;
    while (std::abs(a - b) > kTolerance * a) {
      if (n + 1 >= kMaxIterations) {
        throw ConsistencyError("AGM did not converge");
      }
      const double c = 0.5 * (a - b);
      const double an = 0.5 * (a + b);
      b = std::sqrt(a * b);
      a = an;
      ++n;
      weight *= 2.0;
      a_[n] = a;
      c_[n] = c;
      sum += weight * c * c;
    }
    steps_ = n;
    K_ = std::numbers::pi / (2.0 * a);
    E_ = K_ * (1.0 - sum);
  }

  double modulus() const noexcept { return k_; }
  double K() const noexcept { return K_; }
  double E() const noexcept { return E_; }
  int agm_steps() const noexcept { return steps_; }

  SnCnDn operator()(double u) const {
    const double odd = std::signbit(u) ? -1.0 : 1.0;
    double v = std::fmod(std::abs(u), 4.0 * K_);
    double sn_sign = odd;
    double cn_sign = 1.0;
    // sn(v + 2K) = -sn(v), cn(v + 2K) = -cn(v)
    if (v >= 2.0 * K_) {
      v -= 2.0 * K_;
      sn_sign = -sn_sign;
      cn_sign = -cn_sign;
    }
    // sn(2K - v) = sn(v), cn(2K - v) = -cn(v)
    if (v > K_) {
      v = 2.0 * K_ - v;
      cn_sign = -cn_sign;
    }
    const double phi = amplitude(v);
    const double sn = std::sin(phi);
    const double cn = std::cos(phi);
    const double dn = std::sqrt(std::max(0.0, 1.0 - k_ * k_ * sn * sn));
    return {sn_sign * sn, cn_sign * cn, dn};
  }

 private:
  // Jacobi amplitude am(u) for u in [0, K].
  double amplitude(double u) const {
    double phi = std::ldexp(a_[steps_] * u, steps_);
    for (int n = steps_; n >= 1; --n) {
      phi = 0.5 * (phi + std::asin(c_[n] / a_[n] * std::sin(phi)));
    }
    return phi;
  }

  double k_;
  double K_ = 0.0;
  double E_ = 0.0;
  int steps_ = 0;
  std::array<double, kMaxIterations> a_{};
  std::array<double, kMaxIterations> c_{};
};

/// Complete elliptic integral of the first kind.
inline double complete_K(EllipticModulus k) { return JacobiElliptic(k).K(); }

/// Complete elliptic integral of the second kind.
inline double complete_E(EllipticModulus k) { return JacobiElliptic(k).E(); }

inline SnCnDn jacobi_sn_cn_dn(double u, EllipticModulus k) { return JacobiElliptic(k)(u); }

}  // namespace phi4
