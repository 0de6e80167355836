#pragma once

// Full spectral/index analysis of one wave: the record behind `phi4 spectrum`.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>

#include "phi4/spectral.hpp"
#include "phi4/waves.hpp"

namespace phi4 {

struct SpectrumAnalysis {
  WaveParameters wave;
  std::size_t grid_size = 0;

  SpectralReport L1;
  SpectralReport L;
  SpectralReport L1_Pi;
  SpectralReport L_Pi;

  DMatrixCheck index;
  IndexPrediction predicted_L1_Pi;
  IndexPrediction predicted_L_Pi;
  bool index_consistent = false;

  double D1_closed = 0.0;
  double D1_numeric = 0.0;
  double D1_orthogonality = 0.0;
  double D1_solve_residual = 0.0;

  double lambda0 = 0.0;
  double lambda4 = 0.0;
  double lambda0_error = 0.0;        // |min eig(L1) - lambda0|
  double f0_residual = 0.0;          // ||L1 f0 - lambda0 f0||_inf
  double f4_residual = 0.0;          // ||L1 f4 - lambda4 f4||_inf
  int lambda4_ordinal = -1;          // 0-based position of the eigenvalue nearest lambda4
  double inverse_one_residual = 0.0;  // ||L1 f~ - 1||_inf

  double coercivity = 0.0;
  double speed_step = 0.0;
  double d2 = 0.0;       // d''(c) with step dc
  double d2_half = 0.0;  // d''(c) with step dc / 2
};

namespace detail {

inline double eigen_residual(const OperatorMatrix& m, const GridField& f, double lambda) {
  const Eigen::VectorXd v = f.vector();
  return (m.entries * v - lambda * v).cwiseAbs().maxCoeff();
}

}  // namespace detail

/// Assembles all four operators, their spectra, D, the index prediction and d''(c).
inline SpectrumAnalysis analyze_spectrum(double period, double speed, std::size_t n, double speed_step = 1e-4,
                                         std::optional<double> tau_zero = std::nullopt) {
  const WaveParameters wave = solve_modulus(period, speed);
  const OperatorMatrix l1 = assemble_L1(wave, n);
  const OperatorMatrix lb = assemble_Lblock(wave, n);
  const OperatorMatrix l1c = constrain_zero_mean(l1);
  const OperatorMatrix lbc = constrain_zero_mean(lb);

  SpectrumAnalysis a{wave,
                     n,
                     eigen_report(l1, tau_zero),
                     eigen_report(lb, tau_zero),
                     eigen_report(l1c, tau_zero),
                     eigen_report(lbc, tau_zero),
                     D_matrix(wave, n),
                     {},
                     {}};
  a.predicted_L1_Pi = index_counts(a.L1, a.index.data);
  a.predicted_L_Pi = index_counts(a.L, a.index.data);
  a.index_consistent = a.predicted_L1_Pi.n == a.L1_Pi.n && a.predicted_L1_Pi.z == a.L1_Pi.z &&
                       a.predicted_L_Pi.n == a.L_Pi.n && a.predicted_L_Pi.z == a.L_Pi.z;

  a.D1_closed = D1_closed(wave);
  const D1Solution d1 = solve_D1(wave, n);
  a.D1_numeric = d1.value;
  a.D1_orthogonality = d1.orthogonality;
  a.D1_solve_residual = d1.residual;

  const ClosedFormEigenpairs cf = closed_form_eigenpairs(wave, n);
  a.lambda0 = cf.first.lambda;
  a.lambda4 = cf.fifth.lambda;
  a.lambda0_error = std::abs(a.L1.eigenvalues.front() - a.lambda0);
  a.f0_residual = detail::eigen_residual(l1, cf.first.f, cf.first.lambda);
  a.f4_residual = detail::eigen_residual(l1, cf.fifth.f, cf.fifth.lambda);
  double nearest = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.L1.eigenvalues.size(); ++i) {
    const double d = std::abs(a.L1.eigenvalues[i] - a.lambda4);
    if (d < nearest) {
      nearest = d;
      a.lambda4_ordinal = static_cast<int>(i);
    }
  }
  const GridField inv = closed_form_inverse_of_one(cf);
  a.inverse_one_residual = (l1.entries * inv.vector() - Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)))
                               .cwiseAbs()
                               .maxCoeff();

  a.coercivity = coercivity_constant(lbc);
  a.speed_step = speed_step;
  a.d2 = d_second_derivative(period, speed, speed_step);
  a.d2_half = d_second_derivative(period, speed, 0.5 * speed_step);
  return a;
}

/// Throws IndexMismatch when the index formulas disagree with the constrained spectra.
inline void verify_index(const SpectrumAnalysis& a) {
  verify_index_counts(a.predicted_L1_Pi, a.L1_Pi);
  verify_index_counts(a.predicted_L_Pi, a.L_Pi);
}

}  // namespace phi4
