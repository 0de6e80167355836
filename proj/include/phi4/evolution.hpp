#pragma once

/**
 * \file evolution.hpp
 * \brief Time integration of the (zero-mean projected) phi^4 equation.
 *
 * The projected flow is
 *
 *     phi_tt - phi_xx - phi + phi^3 - (1/L) int phi^3 dx = 0,
 *
 * which keeps the means of phi and phi_t at zero. The integrator is Strang
 * splitting (half kick, exact linear flow, half kick). The linear part
 * phi_tt = phi_xx + phi is advanced exactly per Fourier mode; for L < 2 pi
 * every nonzero mode oscillates with frequency sqrt(xi^2 - 1).
 *
 * The traveling wave phi(x, t) = h(x + c t) has data (h, c h'); orbits are
 * measured in Y = H^1 x L^2 with ||p||_{H^1}^2 = int (p^2 + p_x^2) dx.
 */

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "phi4/errors.hpp"
#include "phi4/fourier.hpp"
#include "phi4/grid.hpp"
#include "phi4/waves.hpp"

namespace phi4 {

struct FieldState {
  GridField phi;
  GridField phidot;
  double t = 0.0;
};

/// Exact traveling-wave state (h(x + c t), c h'(x + c t)).
inline FieldState wave_state(const WaveParameters& wave, std::size_t n, double t = 0.0) {
  FieldState s{GridField::zeros(wave.period(), n), GridField::zeros(wave.period(), n), t};
  for (std::size_t j = 0; j < n; ++j) {
    const ProfileValues v = profile_eval(wave, s.phi.x(j) + wave.speed() * t);
    s.phi[j] = v.h;
    s.phidot[j] = wave.speed() * v.dh;
  }
  return s;
}

struct IntegratorOptions {
  bool projected = true;
  /// BlowUp is raised once max |phi| exceeds this.
  double blowup_ceiling = std::numeric_limits<double>::infinity();
};

/**
 * Strang splitting stepper for a fixed grid and step. Owns its FFT workspace.
 * A negative step runs the same symmetric scheme backward in time.
 */
class SplittingIntegrator {
 public:
  using Complex = FourierWorkspace::Complex;

  SplittingIntegrator(double period, std::size_t n, double dt, IntegratorOptions opt = {})
      : period_(period), n_(n), dt_(dt), opt_(opt), fft_(n), phi_hat_(fft_.modes()), psi_hat_(fft_.modes()),
        rot_(fft_.modes()) {
    if (!(dt != 0.0 && std::isfinite(dt))) throw std::invalid_argument("time step must be finite and nonzero");
    for (std::size_t m = 0; m < rot_.size(); ++m) {
      const double xi = wavenumber(m, period_);
      rot_[m] = linear_propagator(xi * xi - 1.0, dt_);
    }
  }

  double dt() const noexcept { return dt_; }
  std::size_t size() const noexcept { return n_; }
  const IntegratorOptions& options() const noexcept { return opt_; }

  void step(FieldState& s) {
    kick(s, 0.5 * dt_);
    linear(s);
    kick(s, 0.5 * dt_);
    s.t += dt_;
    const double peak = s.phi.max_abs();
    if (!(peak <= opt_.blowup_ceiling)) {
      std::ostringstream os;
      os << "max|phi| = " << peak << " exceeded the ceiling " << opt_.blowup_ceiling << " at t = " << s.t;
      throw BlowUp(os.str(), s.t);
    }
  }

 private:
  // Flow of u'' = -(xi^2 - 1) u over time tau as the matrix [[c00, c01], [c10, c11]].
  struct Propagator {
    double c00, c01, c10, c11;
  };

  static Propagator linear_propagator(double omega2, double tau) {
    if (omega2 > 0.0) {
      const double w = std::sqrt(omega2);
      return {std::cos(w * tau), std::sin(w * tau) / w, -w * std::sin(w * tau), std::cos(w * tau)};
    }
    if (omega2 < 0.0) {
      const double g = std::sqrt(-omega2);
      return {std::cosh(g * tau), std::sinh(g * tau) / g, g * std::sinh(g * tau), std::cosh(g * tau)};
    }
    return {1.0, tau, 0.0, 1.0};
  }

  void kick(FieldState& s, double tau) const {
    auto phi = s.phi.values();
    auto psi = s.phidot.values();
    double mean_cube = 0.0;
    if (opt_.projected) {
      for (double v : phi) mean_cube += v * v * v;
      mean_cube /= static_cast<double>(n_);
    }
    for (std::size_t j = 0; j < n_; ++j) psi[j] -= tau * (phi[j] * phi[j] * phi[j] - mean_cube);
  }

  void linear(FieldState& s) {
    fft_.forward(s.phi.values(), phi_hat_);
    fft_.forward(s.phidot.values(), psi_hat_);
    for (std::size_t m = 0; m < rot_.size(); ++m) {
      if (m == 0 && opt_.projected) {
        phi_hat_[0] = 0.0;
        psi_hat_[0] = 0.0;
        continue;
      }
      const Propagator& r = rot_[m];
      const Complex p = phi_hat_[m];
      const Complex q = psi_hat_[m];
      phi_hat_[m] = r.c00 * p + r.c01 * q;
      psi_hat_[m] = r.c10 * p + r.c11 * q;
    }
    fft_.backward(phi_hat_, s.phi.values());
    fft_.backward(psi_hat_, s.phidot.values());
  }

  double period_;
  std::size_t n_;
  double dt_;
  IntegratorOptions opt_;
  FourierWorkspace fft_;
  std::vector<Complex> phi_hat_;
  std::vector<Complex> psi_hat_;
  std::vector<Propagator> rot_;
};

/// One Strang step of size dt > 0.
inline FieldState step(FieldState state, double dt, bool projected = true) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  SplittingIntegrator integ(state.phi.period(), state.phi.size(), dt, {projected});
  integ.step(state);
  return state;
}

struct ConservedQuantities {
  double E = 0.0;  // (1/2) int [phi_x^2 + phi_t^2 - phi^2 + phi^4 / 2] dx
  double F = 0.0;  // int phi_x phi_t dx
  double mean_phi = 0.0;
  double mean_phidot = 0.0;
  /// int (phi_x^2 + phi_t^2) dx, bounded by 2 E + L/2.
  double gradient_energy = 0.0;
  double phi_l2 = 0.0;   // int phi^2 dx
  double phix_l2 = 0.0;  // int phi_x^2 dx
};

inline ConservedQuantities conserved(const FieldState& s) {
  const GridField phix = s.phi.derivative(1);
  ConservedQuantities q;
  double quartic = 0.0;
  for (std::size_t j = 0; j < s.phi.size(); ++j) quartic += std::pow(s.phi[j], 4);
  quartic *= s.phi.spacing();
  q.phi_l2 = inner(s.phi, s.phi);
  q.phix_l2 = inner(phix, phix);
  const double psi2 = inner(s.phidot, s.phidot);
  q.E = 0.5 * (q.phix_l2 + psi2 - q.phi_l2 + 0.5 * quartic);
  q.F = inner(phix, s.phidot);
  q.mean_phi = s.phi.mean();
  q.mean_phidot = s.phidot.mean();
  q.gradient_energy = q.phix_l2 + psi2;
  return q;
}

/// ||(p, q)||_Y with ||p||_{H^1}^2 = int (p^2 + p_x^2) dx, evaluated spectrally.
inline double y_norm(const GridField& p, const GridField& q) {
  const GridField px = p.derivative(1);
  return std::sqrt(inner(p, p) + inner(px, px) + inner(q, q));
}

/**
 * inf_s ||T_s(phi, phi_t) - (h, c h')||_Y, T_s U(x) = U(x + s).
 *
 * Shifts act as Fourier phase factors. The infimum is bracketed by a coarse
 * scan over the N grid shifts and refined by golden-section search.
 */
class OrbitDistance {
 public:
  using Complex = FourierWorkspace::Complex;
  static constexpr double kShiftTolerance = 1e-10;

  OrbitDistance(const WaveParameters& wave, std::size_t n)
      : period_(wave.period()), n_(n), fft_(n), wave_phi_(fft_.modes()), wave_psi_(fft_.modes()),
        state_phi_(fft_.modes()), state_psi_(fft_.modes()), weight_h1_(fft_.modes()), weight_l2_(fft_.modes()) {
    const FieldState w = wave_state(wave, n);
    fft_.forward(w.phi.values(), wave_phi_);
    fft_.forward(w.phidot.values(), wave_psi_);
    for (std::size_t m = 0; m < fft_.modes(); ++m) {
      const double mult = (m == 0 || m == n / 2) ? 1.0 : 2.0;
      const double xi = wavenumber(m, period_);
      weight_l2_[m] = period_ * mult;
      weight_h1_[m] = period_ * mult * (1.0 + xi * xi);
    }
  }

  double operator()(const FieldState& s) {
    fft_.forward(s.phi.values(), state_phi_);
    fft_.forward(s.phidot.values(), state_psi_);

    const double h = period_ / static_cast<double>(n_);
    std::size_t best = 0;
    double best_val = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < n_; ++j) {
      const double v = squared(h * static_cast<double>(j));
      if (v < best_val) {
        best_val = v;
        best = j;
      }
    }
    // Golden-section refinement on the two neighbouring grid cells.
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = h * (static_cast<double>(best) - 1.0);
    double b = h * (static_cast<double>(best) + 1.0);
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = squared(x1);
    double f2 = squared(x2);
    while (b - a > kShiftTolerance) {
      if (f1 < f2) {
        b = x2;
        x2 = x1;
        f2 = f1;
        x1 = b - invphi * (b - a);
        f1 = squared(x1);
      } else {
        a = x1;
        x1 = x2;
        f1 = f2;
        x2 = a + invphi * (b - a);
        f2 = squared(x2);
      }
    }
    const double s_mid = 0.5 * (a + b);
    double v = squared(s_mid);
    best_shift_ = s_mid;
    if (best_val < v) {
      v = best_val;
      best_shift_ = h * static_cast<double>(best);
    }
    best_shift_ = std::fmod(best_shift_ + period_, period_);
    return std::sqrt(std::max(0.0, v));
  }

  /// Minimizing shift s from the most recent evaluation.
  double best_shift() const noexcept { return best_shift_; }

 private:
  double squared(double shift) const {
    double acc = 0.0;
    const std::size_t nyquist = n_ / 2;
    for (std::size_t m = 0; m < wave_phi_.size(); ++m) {
      const double xi = wavenumber(m, period_);
      Complex phase = std::polar(1.0, xi * shift);
      Complex dp = state_phi_[m] * phase;
      Complex dq = state_psi_[m] * phase;
      if (m == nyquist) {
        dp = dp.real();
        dq = dq.real();
      }
      dp -= wave_phi_[m];
      dq -= wave_psi_[m];
      acc += weight_h1_[m] * std::norm(dp) + weight_l2_[m] * std::norm(dq);
    }
    return acc;
  }

  double period_;
  std::size_t n_;
  FourierWorkspace fft_;
  std::vector<Complex> wave_phi_, wave_psi_, state_phi_, state_psi_;
  std::vector<double> weight_h1_, weight_l2_;
  double best_shift_ = 0.0;
};

inline double orbit_distance(const FieldState& state, const WaveParameters& wave) {
  OrbitDistance d(wave, state.phi.size());
  return d(state);
}

/// Zero-mean perturbation direction (p, q), normalized to ||(p, q)||_Y = 1.
struct Perturbation {
  GridField p;
  GridField q;
};

namespace detail {

inline Perturbation normalized(Perturbation x) {
  const double norm = y_norm(x.p, x.q);
  for (std::size_t j = 0; j < x.p.size(); ++j) {
    x.p[j] /= norm;
    x.q[j] /= norm;
  }
  return x;
}

}  // namespace detail

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit Mersenne Twister draw.
inline double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

/// p = cos(xi_m x), q = sin(xi_m x), normalized.
inline Perturbation trig_perturbation(double period, std::size_t n, std::size_t mode) {
  if (mode == 0 || mode >= n / 2) throw std::invalid_argument("perturbation mode must lie in [1, N/2)");
  const double xi = wavenumber(mode, period);
  return detail::normalized({GridField::sample(period, n, [&](double x) { return std::cos(xi * x); }),
                             GridField::sample(period, n, [&](double x) { return std::sin(xi * x); })});
}

/**
 * Filtered random field: modes 1..N/8 of both components carry coefficients
 * drawn uniformly from [-1, 1) (std::mt19937_64, fixed draw order), then the
 * pair is normalized. Mean-free by construction.
 */
inline Perturbation random_perturbation(double period, std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const std::size_t top = std::max<std::size_t>(1, n / 8);
  std::vector<double> coeff(4 * top);
  for (double& v : coeff) v = 2.0 * uniform01(rng) - 1.0;
  auto field = [&](std::size_t offset) {
    return GridField::sample(period, n, [&](double x) {
      double s = 0.0;
      for (std::size_t m = 1; m <= top; ++m) {
        const double xi = wavenumber(m, period);
        s += coeff[offset + 2 * (m - 1)] * std::cos(xi * x) + coeff[offset + 2 * (m - 1) + 1] * std::sin(xi * x);
      }
      return s;
    });
  };
  Perturbation out{field(0), field(2 * top)};
  // Remove roundoff-level means.
  const double mp = out.p.mean();
  const double mq = out.q.mean();
  for (std::size_t j = 0; j < n; ++j) {
    out.p[j] -= mp;
    out.q[j] -= mq;
  }
  return detail::normalized(std::move(out));
}

struct TraceSample {
  double t;
  double E;
  double F;
  double mean_phi;
  double mean_phidot;
  double orbit_distance;
};

struct EvolutionTrace {
  std::vector<TraceSample> samples;
  double epsilon = 0.0;
  double max_orbit_distance = 0.0;
  /// max_t orbit distance / epsilon (0 when epsilon = 0).
  double stability_ratio = 0.0;
  double max_energy_drift = 0.0;    // max |E(t) - E(0)| / |E(0)|
  double max_momentum_drift = 0.0;  // max |F(t) - F(0)| / |F(0)|
  double max_abs_mean = 0.0;        // max over samples of |mean phi|, |mean phi_t|
  /// max over samples of int (phi_x^2 + phi_t^2) - (2 E(0) + L/2); <= 0 when the a-priori bound holds.
  double apriori_margin = -std::numeric_limits<double>::infinity();
  /// max over samples of int phi^2 - (L / 2 pi)^2 int phi_x^2; <= 0 by Poincare-Wirtinger.
  double poincare_margin = -std::numeric_limits<double>::infinity();
};

struct ExperimentConfig {
  double epsilon = 0.0;
  double horizon = 100.0;
  double dt = 1e-3;
  std::size_t sample_every = 100;
  IntegratorOptions integrator{};
};

/// Ceiling used by run_experiment when none is set: 10 max|h|.
inline double default_blowup_ceiling(const WaveParameters& wave) { return 10.0 * wave.amplitude(); }

/**
 * Evolves (h, c h') + epsilon (p, q) and samples conserved quantities and the
 * orbit distance every sample_every steps (t = 0 included).
 */
inline EvolutionTrace run_experiment(const WaveParameters& wave, const Perturbation& pert, const ExperimentConfig& cfg) {
  if (!(cfg.epsilon >= 0.0)) throw std::invalid_argument("epsilon must be non-negative");
  if (!(cfg.dt > 0.0 && cfg.horizon > 0.0) || cfg.sample_every == 0) {
    throw std::invalid_argument("need dt > 0, T > 0 and sample_every >= 1");
  }
  const std::size_t n = pert.p.size();
  IntegratorOptions iopt = cfg.integrator;
  if (!std::isfinite(iopt.blowup_ceiling)) iopt.blowup_ceiling = default_blowup_ceiling(wave);

  FieldState state = wave_state(wave, n);
  for (std::size_t j = 0; j < n; ++j) {
    state.phi[j] += cfg.epsilon * pert.p[j];
    state.phidot[j] += cfg.epsilon * pert.q[j];
  }

  SplittingIntegrator integ(wave.period(), n, cfg.dt, iopt);
  OrbitDistance distance(wave, n);
  const auto steps = static_cast<std::size_t>(std::llround(cfg.horizon / cfg.dt));
  const double pw = std::pow(wave.period() / (2.0 * std::numbers::pi), 2);

  EvolutionTrace trace;
  trace.epsilon = cfg.epsilon;
  ConservedQuantities first{};
  auto record = [&](std::size_t i) {
    const ConservedQuantities q = conserved(state);
    if (i == 0) first = q;
    const double d = distance(state);
    trace.samples.push_back({static_cast<double>(i) * cfg.dt, q.E, q.F, q.mean_phi, q.mean_phidot, d});
    trace.max_orbit_distance = std::max(trace.max_orbit_distance, d);
    if (first.E != 0.0) trace.max_energy_drift = std::max(trace.max_energy_drift, std::abs(q.E - first.E) / std::abs(first.E));
    if (first.F != 0.0) trace.max_momentum_drift = std::max(trace.max_momentum_drift, std::abs(q.F - first.F) / std::abs(first.F));
    trace.max_abs_mean = std::max({trace.max_abs_mean, std::abs(q.mean_phi), std::abs(q.mean_phidot)});
    trace.apriori_margin = std::max(trace.apriori_margin, q.gradient_energy - (2.0 * first.E + 0.5 * wave.period()));
    if (iopt.projected) trace.poincare_margin = std::max(trace.poincare_margin, q.phi_l2 - pw * q.phix_l2);
  };

  record(0);
  for (std::size_t i = 1; i <= steps; ++i) {
    integ.step(state);
    state.t = static_cast<double>(i) * cfg.dt;
    if (i % cfg.sample_every == 0 || i == steps) record(i);
  }
  trace.stability_ratio = cfg.epsilon > 0.0 ? trace.max_orbit_distance / cfg.epsilon : 0.0;
  return trace;
}

}  // namespace phi4
