#pragma once

/**
 * \file spectral.hpp
 * \brief Linearized operators around a snoidal wave and their spectra.
 *
 * Operators are discretized by Fourier collocation on the N-point grid:
 *
 *  - L1     = -omega d_xx - 1 + 3 h^2                         (N x N)
 *  - Lblock = [[-d_xx - 1 + 3 h^2,  c d_x], [-c d_x, 1]]       (2N x 2N)
 *
 * and their zero-mean versions L1_Pi, L_Pi, obtained by subtracting the
 * rank-one term (3/L)(h^2, .) from the first component and restricting to
 * an orthonormal basis of mean-free grid vectors.
 *
 * The L^2 inner product on the grid is (L/N) times the Euclidean one, so
 * symmetric matrices are self-adjoint operators and eigenvalues need no
 * mass-matrix correction.
 */

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "phi4/errors.hpp"
#include "phi4/grid.hpp"
#include "phi4/waves.hpp"

namespace phi4 {

enum class OperatorKind { L1, Lblock, L1Constrained, LblockConstrained };

inline const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::L1: return "L1";
    case OperatorKind::Lblock: return "L";
    case OperatorKind::L1Constrained: return "L1_Pi";
    case OperatorKind::LblockConstrained: return "L_Pi";
  }
  return "?";
}

inline bool is_block(OperatorKind kind) {
  return kind == OperatorKind::Lblock || kind == OperatorKind::LblockConstrained;
}

/// Dense symmetric discretization of one of the linearized operators.
struct OperatorMatrix {
  OperatorKind kind = OperatorKind::L1;
  double period = 0.0;
  std::size_t grid_size = 0;
  Eigen::MatrixXd entries;
  /// h^2 on the grid; needed for the zero-mean rank-one correction.
  Eigen::VectorXd h_squared;
  /// Expected kernel element, in this matrix's own coordinates (h' or (h', c h'')).
  Eigen::VectorXd expected_kernel;

  Eigen::Index dim() const noexcept { return entries.rows(); }

  double asymmetry() const { return (entries - entries.transpose()).cwiseAbs().maxCoeff(); }
};

struct AssemblyOptions {
  /// Drop 3 h^2; leaves the constant-coefficient operator (diagnostics only).
  bool zero_potential = false;
};

namespace detail {

inline void require_grid(std::size_t n, std::size_t min) {
  if (n < min || n % 2 != 0) {
    std::ostringstream os;
    os << "operator grid size must be even and >= " << min << " (got " << n << ")";
    throw std::invalid_argument(os.str());
  }
}

inline void require_symmetric(const OperatorMatrix& m) {
  const double asym = m.asymmetry();
  if (!(asym <= 1e-12 * std::max(1.0, m.entries.cwiseAbs().maxCoeff()))) {
    std::ostringstream os;
    os << to_string(m.kind) << " is not symmetric (max |M - M^T| = " << asym << ")";
    throw ConsistencyError(os.str());
  }
}

inline Eigen::VectorXd to_eigen(const GridField& f) { return f.vector(); }

}  // namespace detail

/**
 * Orthonormal basis (as columns) of the complement of a nonzero vector.
 * Built from one Householder reflector, so it is exactly orthogonal up to roundoff.
 */
inline Eigen::MatrixXd orthonormal_complement(const Eigen::VectorXd& direction) {
  const Eigen::Index n = direction.size();
  Eigen::VectorXd w = direction.normalized();
  Eigen::VectorXd u = w;
  u(0) += (w(0) >= 0.0 ? 1.0 : -1.0);
  const double unorm2 = u.squaredNorm();
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - (2.0 / unorm2) * u * u.transpose();
  return h.rightCols(n - 1);
}

/// Orthonormal basis of mean-free vectors on an n-point grid, n x (n-1).
inline Eigen::MatrixXd mean_free_basis(std::size_t n) {
  return orthonormal_complement(Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n)));
}

inline OperatorMatrix assemble_L1(const WaveParameters& wave, std::size_t n, AssemblyOptions opt = {}) {
  detail::require_grid(n, 32);
  const WaveSamples w = sample_wave(wave, n);
  OperatorMatrix m;
  m.kind = OperatorKind::L1;
  m.period = wave.period();
  m.grid_size = n;
  m.h_squared = detail::to_eigen(w.h).array().square();
  const Eigen::VectorXd potential = opt.zero_potential ? Eigen::VectorXd::Zero(n) : Eigen::VectorXd(3.0 * m.h_squared);
  m.entries = -wave.omega() * fourier_second_derivative_matrix(n, wave.period());
  m.entries.diagonal().array() += potential.array() - 1.0;
  m.expected_kernel = detail::to_eigen(w.dh);
  detail::require_symmetric(m);
  return m;
}

inline OperatorMatrix assemble_Lblock(const WaveParameters& wave, std::size_t n, AssemblyOptions opt = {}) {
  detail::require_grid(n, 32);
  const WaveSamples w = sample_wave(wave, n);
  const auto N = static_cast<Eigen::Index>(n);
  const double c = wave.speed();
  const Eigen::MatrixXd d1 = fourier_first_derivative_matrix(n, wave.period());

  OperatorMatrix m;
  m.kind = OperatorKind::Lblock;
  m.period = wave.period();
  m.grid_size = n;
  m.h_squared = detail::to_eigen(w.h).array().square();
  m.entries = Eigen::MatrixXd::Zero(2 * N, 2 * N);
  m.entries.topLeftCorner(N, N) = -fourier_second_derivative_matrix(n, wave.period());
  m.entries.topLeftCorner(N, N).diagonal().array() +=
      (opt.zero_potential ? Eigen::VectorXd::Zero(N) : Eigen::VectorXd(3.0 * m.h_squared)).array() - 1.0;
  m.entries.topRightCorner(N, N) = c * d1;
  m.entries.bottomLeftCorner(N, N) = -c * d1;
  m.entries.bottomRightCorner(N, N).setIdentity();
  m.expected_kernel.resize(2 * N);
  m.expected_kernel << detail::to_eigen(w.dh), c * detail::to_eigen(w.d2h);
  detail::require_symmetric(m);
  return m;
}

/**
 * Zero-mean constrained operator: subtract (3/L)(h^2, .) acting on the first
 * component, then restrict every component to the mean-free subspace.
 */
inline OperatorMatrix constrain_zero_mean(const OperatorMatrix& m) {
  if (m.kind != OperatorKind::L1 && m.kind != OperatorKind::Lblock) {
    throw std::invalid_argument("constrain_zero_mean expects an unconstrained operator");
  }
  const auto N = static_cast<Eigen::Index>(m.grid_size);
  const Eigen::MatrixXd q = mean_free_basis(m.grid_size);

  // (3/L) int h^2 u dx on the grid is (3/N) sum_j h_j^2 u_j, times the constant function.
  const Eigen::MatrixXd rank_one =
      Eigen::VectorXd::Ones(N) * (3.0 / static_cast<double>(N) * m.h_squared).transpose();

  OperatorMatrix out;
  out.period = m.period;
  out.grid_size = m.grid_size;
  out.h_squared = m.h_squared;
  if (m.kind == OperatorKind::L1) {
    out.kind = OperatorKind::L1Constrained;
    const Eigen::MatrixXd modified = m.entries - rank_one;
    out.entries = q.transpose() * modified * q;
    out.expected_kernel = q.transpose() * m.expected_kernel;
  } else {
    out.kind = OperatorKind::LblockConstrained;
    Eigen::MatrixXd modified = m.entries;
    modified.topLeftCorner(N, N) -= rank_one;
    Eigen::MatrixXd basis = Eigen::MatrixXd::Zero(2 * N, 2 * (N - 1));
    basis.topLeftCorner(N, N - 1) = q;
    basis.bottomRightCorner(N, N - 1) = q;
    out.entries = basis.transpose() * modified * basis;
    out.expected_kernel = basis.transpose() * m.expected_kernel;
  }
  detail::require_symmetric(out);
  // Remove the roundoff-level asymmetry left by the triple product.
  out.entries = 0.5 * (out.entries + out.entries.transpose()).eval();
  return out;
}

/// Counts and spectrum of a symmetric operator matrix.
struct SpectralReport {
  OperatorKind kind = OperatorKind::L1;
  std::vector<double> eigenvalues;  // ascending
  int n = 0;                        // eigenvalues < -tau_zero
  int z = 0;                        // eigenvalues in [-tau_zero, tau_zero]
  int positive = 0;
  double tau_zero = 0.0;
  double spectral_radius = 0.0;
  /// ||M v||_inf for the operator's expected kernel element v.
  double kernel_residual = 0.0;
  /// Eigenvector of the eigenvalue of smallest magnitude.
  Eigen::VectorXd numeric_kernel;
};

/// Default zero band, relative to the spectral radius: a thousand times the eigensolver's
/// backward error. Discrete kernel eigenvalues sit near 1e-16 of the radius; the negative
/// eigenvalue of a near-kink wave can be as small as 1e-7 in absolute terms.
inline constexpr double kZeroToleranceScale = 1e3 * std::numeric_limits<double>::epsilon();

inline SpectralReport eigen_report(const OperatorMatrix& m, std::optional<double> tau_zero = std::nullopt) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.entries);
  if (es.info() != Eigen::Success) {
    throw EigFailure(std::string("symmetric eigensolver failed for ") + to_string(m.kind));
  }
  SpectralReport r;
  r.kind = m.kind;
  const Eigen::VectorXd& ev = es.eigenvalues();
  r.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  r.spectral_radius = ev.cwiseAbs().maxCoeff();
  r.tau_zero = tau_zero.value_or(kZeroToleranceScale * r.spectral_radius);
  for (double lam : r.eigenvalues) {
    if (lam < -r.tau_zero) {
      ++r.n;
    } else if (lam <= r.tau_zero) {
      ++r.z;
    } else {
      ++r.positive;
    }
  }
  Eigen::Index smallest = 0;
  ev.cwiseAbs().minCoeff(&smallest);
  r.numeric_kernel = es.eigenvectors().col(smallest);
  if (m.expected_kernel.size() == m.dim()) {
    r.kernel_residual = (m.entries * m.expected_kernel).cwiseAbs().maxCoeff();
  }
  return r;
}

/// One closed-form eigenpair of L1, sampled on the grid.
struct ClosedFormEigenpair {
  enum class Which { first, fifth };
  double lambda = 0.0;
  GridField f;
  Which which = Which::first;
};

struct ClosedFormEigenpairs {
  ClosedFormEigenpair first;  // lambda_0 < 0
  ClosedFormEigenpair fifth;  // lambda_4 > 0
  double B1 = 0.0;            // 1 + k^2 + sqrt(1 - k^2 + k^4) > 0
  double B2 = 0.0;            // -(1 + k^2 - sqrt(1 - k^2 + k^4)) < 0
  double root = 0.0;          // sqrt(1 - k^2 + k^4)
};

/**
 * Lame eigenpairs of L1 that are quadratic in sn:
 *   lambda_{0,4} = (1 + k^2 -+ 2 r) / (1 + k^2),  f_{0,4} = 1 - (1 + k^2 -+ r) sn^2(b x),
 * with r = sqrt(1 - k^2 + k^4).
 */
inline ClosedFormEigenpairs closed_form_eigenpairs(const WaveParameters& wave, std::size_t n) {
  const double k2 = wave.modulus() * wave.modulus();
  const double r = std::sqrt(1.0 - k2 + k2 * k2);
  const double s = 1.0 + k2;
  const auto sn2 = [&](double x) {
    const double sn = wave.jacobi()(wave.wavenumber() * x).sn;
    return sn * sn;
  };
  ClosedFormEigenpairs out{
      {(s - 2.0 * r) / s, GridField::sample(wave.period(), n, [&](double x) { return 1.0 - (s - r) * sn2(x); }),
       ClosedFormEigenpair::Which::first},
      {(s + 2.0 * r) / s, GridField::sample(wave.period(), n, [&](double x) { return 1.0 - (s + r) * sn2(x); }),
       ClosedFormEigenpair::Which::fifth},
      s + r,
      -(s - r),
      r};
  return out;
}

/// f~ = (lambda_4 B1 f_0 + lambda_0 B2 f_4) / (2 lambda_0 lambda_4 r), which solves L1 f~ = 1.
inline GridField closed_form_inverse_of_one(const ClosedFormEigenpairs& e) {
  GridField out = GridField::zeros(e.first.f.period(), e.first.f.size());
  const double l0 = e.first.lambda;
  const double l4 = e.fifth.lambda;
  const double denom = 2.0 * l0 * l4 * e.root;
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = (l4 * e.B1 * e.first.f[j] + l0 * e.B2 * e.fifth.f[j]) / denom;
  }
  return out;
}

/// D1 = (L1^{-1} 1, 1) = -L (1+k^2)/(1-k^2)^2 [(1+k^2) + 2 (E - K)/K].
inline double D1_closed(const WaveParameters& wave) {
  const double k2 = wave.modulus() * wave.modulus();
  const double kp2 = (1.0 - wave.modulus()) * (1.0 + wave.modulus());
  const double K = wave.K();
  const double E = wave.E();
  return -wave.period() * (1.0 + k2) / (kp2 * kp2) * ((1.0 + k2) + 2.0 * (E - K) / K);
}

namespace detail {

/// Reciprocal-condition floor for the kernel-bordered solves.
inline constexpr double kMinRcond = 1e-14;

/**
 * Solves M u = rhs_j on the complement of the (simple) numeric kernel vector v via the
 * bordered system [[M, v], [v^T, 0]]. Columns of the result are the solutions.
 */
inline Eigen::MatrixXd kernel_bordered_solve(const OperatorMatrix& m, const Eigen::VectorXd& kernel,
                                             const Eigen::MatrixXd& rhs) {
  const Eigen::Index n = m.dim();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n + 1, n + 1);
  a.topLeftCorner(n, n) = m.entries;
  a.topRightCorner(n, 1) = kernel;
  a.bottomLeftCorner(1, n) = kernel.transpose();
  Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n + 1, rhs.cols());
  b.topRows(n) = rhs;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(a);
  const double rcond = lu.rcond();
  if (!(rcond > kMinRcond)) {
    std::ostringstream os;
    os << "kernel-bordered system for " << to_string(m.kind) << " is singular (rcond " << rcond << ")";
    throw SingularSystem(os.str());
  }
  return lu.solve(b).topRows(n);
}

}  // namespace detail

struct D1Solution {
  double value = 0.0;
  GridField solution;
  /// |(f, h')| with the analytic h'.
  double orthogonality = 0.0;
  /// ||L1 f - 1||_inf
  double residual = 0.0;
};

inline D1Solution solve_D1(const WaveParameters& wave, std::size_t n) {
  detail::require_grid(n, 64);
  const OperatorMatrix m = assemble_L1(wave, n);
  const SpectralReport rep = eigen_report(m);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(n));
  const Eigen::VectorXd f = detail::kernel_bordered_solve(m, rep.numeric_kernel, ones).col(0);

  GridField sol(wave.period(), std::vector<double>(f.data(), f.data() + f.size()));
  GridField dh = GridField::zeros(wave.period(), n);
  for (std::size_t j = 0; j < n; ++j) dh[j] = m.expected_kernel(static_cast<Eigen::Index>(j));
  return {sol.integral(), sol, std::abs(inner(sol, dh)), (m.entries * f - ones).cwiseAbs().maxCoeff()};
}

/// (L1^{-1} 1, 1) from the discrete operator, deflating its numeric kernel.
inline double D1_numeric(const WaveParameters& wave, std::size_t n) { return solve_D1(wave, n).value; }

/// Data for the constrained index formulas.
struct ConstrainedIndexData {
  double D1 = 0.0;
  Eigen::Matrix2d Dmatrix = Eigen::Matrix2d::Zero();
  int n0 = 0;
  int z0 = 0;
};

/// n0 / z0 = number of negative / zero eigenvalues of a symmetric D; |lambda| <= tol counts as zero.
inline ConstrainedIndexData index_data_from_matrix(const Eigen::Matrix2d& d, double tol) {
  ConstrainedIndexData out;
  out.Dmatrix = d;
  out.D1 = d(0, 0);
  const Eigen::Vector2d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d>(0.5 * (d + d.transpose())).eigenvalues();
  for (int i = 0; i < 2; ++i) {
    if (ev(i) < -tol) {
      ++out.n0;
    } else if (ev(i) <= tol) {
      ++out.z0;
    }
  }
  return out;
}

/// The structure forced by L(0,1) = (0,1): D = diag(D1, L).
inline ConstrainedIndexData index_data_from_D1(double D1, double period, double tol = 0.0) {
  Eigen::Matrix2d d;
  d << D1, 0.0, 0.0, period;
  return index_data_from_matrix(d, tol);
}

struct DMatrixCheck {
  ConstrainedIndexData data;
  double off_diagonal = 0.0;      // max |D12|, |D21|
  double lower_right_error = 0.0;  // |D22 / L - 1|
};

/**
 * D_ij = (L^{-1} e_i, e_j) with e_1 = (1, 0), e_2 = (0, 1), computed by solving the block
 * system on the complement of its numeric kernel. Throws ConsistencyError unless
 * |D12|, |D21| <= 1e-8 L and D22 = L to relative 1e-8.
 */
inline DMatrixCheck D_matrix(const WaveParameters& wave, std::size_t n, double zero_tol = 1e-12) {
  detail::require_grid(n, 64);
  const auto N = static_cast<Eigen::Index>(n);
  const OperatorMatrix m = assemble_Lblock(wave, n);
  const SpectralReport rep = eigen_report(m);
  Eigen::MatrixXd e = Eigen::MatrixXd::Zero(2 * N, 2);
  e.col(0).head(N).setOnes();
  e.col(1).tail(N).setOnes();
  const Eigen::MatrixXd u = detail::kernel_bordered_solve(m, rep.numeric_kernel, e);
  const double h = wave.period() / static_cast<double>(n);
  const Eigen::Matrix2d d = h * (u.transpose() * e);

  DMatrixCheck out;
  out.data = index_data_from_matrix(d, zero_tol * wave.period());
  out.off_diagonal = std::max(std::abs(d(0, 1)), std::abs(d(1, 0)));
  out.lower_right_error = std::abs(d(1, 1) / wave.period() - 1.0);
  if (!(out.off_diagonal <= 1e-8 * wave.period() && out.lower_right_error <= 1e-8)) {
    std::ostringstream os;
    os << "matrix D lost its structure: off-diagonal " << out.off_diagonal << ", |D22/L - 1| "
       << out.lower_right_error;
    throw ConsistencyError(os.str());
  }
  return out;
}

struct IndexPrediction {
  int n = 0;
  int z = 0;
};

/// n_Pi = n - n0 - z0, z_Pi = z + z0.
inline IndexPrediction index_counts(const SpectralReport& unconstrained, const ConstrainedIndexData& idx) {
  return {unconstrained.n - idx.n0 - idx.z0, unconstrained.z + idx.z0};
}

/// Throws IndexMismatch when the prediction disagrees with a directly computed constrained spectrum.
inline void verify_index_counts(const IndexPrediction& predicted, const SpectralReport& constrained) {
  if (predicted.n != constrained.n || predicted.z != constrained.z) {
    std::ostringstream os;
    os << "index formula predicts (n, z) = (" << predicted.n << ", " << predicted.z << ") for "
       << to_string(constrained.kind) << " but the spectrum gives (" << constrained.n << ", " << constrained.z
       << ")";
    throw IndexMismatch(os.str());
  }
}

/// Smallest eigenvalue of m on the orthogonal complement of its expected kernel element.
inline double coercivity_constant(const OperatorMatrix& m) {
  const Eigen::MatrixXd q = orthonormal_complement(m.expected_kernel);
  const Eigen::MatrixXd restricted = q.transpose() * m.entries * q;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (restricted + restricted.transpose()),
                                                     Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw EigFailure("eigensolver failed on the kernel complement");
  return es.eigenvalues()(0);
}

/// c * int_0^L h'^2 dx, i.e. the momentum F(h, c h').
inline double wave_momentum(double period, double speed, std::size_t n) {
  const WaveParameters wave = solve_modulus(period, speed);
  const WaveSamples w = sample_wave(wave, n);
  return speed * inner(w.dh, w.dh);
}

/// d''(c) = -d/dc (c int h'^2 dx) by a central difference of step dc.
inline double d_second_derivative(double period, double speed, double dc, std::size_t n = 1024) {
  if (!(dc > 0.0)) throw std::invalid_argument("speed step must be positive");
  return -(wave_momentum(period, speed + dc, n) - wave_momentum(period, speed - dc, n)) / (2.0 * dc);
}

}  // namespace phi4
