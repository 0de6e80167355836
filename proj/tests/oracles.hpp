#pragma once

// Test-side reference computations, independent of the library's AGM and
// descending-Landen code paths: adaptive quadrature for K and E, RK4 on the
// Jacobi ODE system for sn/cn/dn, and a plain scan-and-bisect for the modulus.

#include <array>
#include <cmath>
#include <functional>
#include <numbers>

namespace oracle {

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  // The second bound stops refinement once the estimate is at roundoff level.
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol || std::abs(diff) <= 1e-14 * std::abs(whole)) return left + right + diff / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

/// Adaptive Simpson on [a, b].
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-13) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson(f, a, b, fa, fm, fb, whole, tol, 40);
}

// 1 - k^2 sin^2 t written as cos^2 t + k'^2 sin^2 t, free of cancellation near k = 1.
inline double delta2(double k, double t) {
  const double s = std::sin(t);
  const double c = std::cos(t);
  return c * c + (1.0 - k) * (1.0 + k) * s * s;
}

inline double K(double k) {
  return integrate([k](double t) { return 1.0 / std::sqrt(delta2(k, t)); }, 0.0, std::numbers::pi / 2);
}

inline double E(double k) {
  return integrate([k](double t) { return std::sqrt(delta2(k, t)); }, 0.0, std::numbers::pi / 2);
}

/// (sn, cn, dn)(u) by RK4 on sn' = cn dn, cn' = -sn dn, dn' = -k^2 sn cn.
inline std::array<double, 3> sn_cn_dn(double u, double k, int steps = 20000) {
  std::array<double, 3> y{0.0, 1.0, 1.0};
  const double k2 = k * k;
  auto rhs = [k2](const std::array<double, 3>& s) {
    return std::array<double, 3>{s[1] * s[2], -s[0] * s[2], -k2 * s[0] * s[1]};
  };
  const double h = u / steps;
  for (int i = 0; i < steps; ++i) {
    const auto k1 = rhs(y);
    std::array<double, 3> t;
    for (int j = 0; j < 3; ++j) t[j] = y[j] + 0.5 * h * k1[j];
    const auto k2v = rhs(t);
    for (int j = 0; j < 3; ++j) t[j] = y[j] + 0.5 * h * k2v[j];
    const auto k3 = rhs(t);
    for (int j = 0; j < 3; ++j) t[j] = y[j] + h * k3[j];
    const auto k4 = rhs(t);
    for (int j = 0; j < 3; ++j) y[j] += h / 6.0 * (k1[j] + 2.0 * k2v[j] + 2.0 * k3[j] + k4[j]);
  }
  return y;
}

/// Speed of the wave of period L whose modulus is k: omega = L^2 / (16 K^2 (1 + k^2)), c = sqrt(1 - omega).
inline double speed_for_modulus(double L, double k) {
  const double kk = K(k);
  return std::sqrt(1.0 - L * L / (16.0 * kk * kk * (1.0 + k * k)));
}

/// Modulus for (L, c) by a 200-point scan for the sign change, then bisection.
inline double modulus_for(double L, double c) {
  const double omega = 1.0 - c * c;
  auto g = [&](double k) {
    const double kk = K(k);
    return L * L / (16.0 * kk * kk * (1.0 + k * k)) - omega;
  };
  double lo = 1e-6;
  double glo = g(lo);
  for (int i = 1; i <= 200; ++i) {
    const double hi = std::min(1.0 - 1e-6, i / 200.0);
    const double ghi = g(hi);
    if ((glo > 0) != (ghi > 0)) {
      double a = lo;
      double b = hi;
      for (int it = 0; it < 80; ++it) {
        const double m = 0.5 * (a + b);
        if ((g(m) > 0) == (glo > 0)) a = m; else b = m;
      }
      return 0.5 * (a + b);
    }
    lo = hi;
    glo = ghi;
  }
  return std::nan("");
}

}  // namespace oracle
