#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "phi4/analysis.hpp"
#include "phi4/errors.hpp"
#include "phi4/spectral.hpp"

namespace {

constexpr double kPi = std::numbers::pi;

phi4::WaveParameters wave_with_modulus(double L, double k) {
  return phi4::solve_modulus(L, oracle::speed_for_modulus(L, k));
}

std::vector<double> sorted(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

TEST(Operators, ZeroPotentialL1HasFourierSymbol) {
  const auto w = wave_with_modulus(2.0, 0.5);
  const std::size_t n = 32;
  const auto rep = phi4::eigen_report(phi4::assemble_L1(w, n, {.zero_potential = true}));
  std::vector<double> expected;
  for (int m = -static_cast<int>(n) / 2 + 1; m <= static_cast<int>(n) / 2; ++m) {
    const double xi = 2 * kPi * m / w.period();
    expected.push_back(w.omega() * xi * xi - 1.0);
  }
  expected = sorted(expected);
  ASSERT_EQ(rep.eigenvalues.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(rep.eigenvalues[i], expected[i], 1e-9 * std::max(1.0, std::abs(expected[i])));
  }
}

TEST(Operators, ZeroPotentialBlockHasTwoByTwoSymbol) {
  const auto w = wave_with_modulus(kPi, 0.5);
  const double c = w.speed();
  const std::size_t n = 32;
  const auto rep = phi4::eigen_report(phi4::assemble_Lblock(w, n, {.zero_potential = true}));
  std::vector<double> expected;
  for (int m = -static_cast<int>(n) / 2 + 1; m <= static_cast<int>(n) / 2; ++m) {
    const double xi = 2 * kPi * m / w.period();
    // Symbol [[xi^2 - 1, i c xi], [-i c xi, 1]]; the first-derivative matrix vanishes on the Nyquist mode.
    const double cx = (m == static_cast<int>(n) / 2) ? 0.0 : c * xi;
    const double mid = 0.5 * xi * xi;
    const double rad = std::sqrt(0.25 * (xi * xi - 2) * (xi * xi - 2) + cx * cx);
    expected.push_back(mid - rad);
    expected.push_back(mid + rad);
  }
  expected = sorted(expected);
  ASSERT_EQ(rep.eigenvalues.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    EXPECT_NEAR(rep.eigenvalues[i], expected[i], 1e-9 * std::max(1.0, std::abs(expected[i])));
  }
}

TEST(Operators, AreSymmetricAndAnnihilateKernel) {
  // Short period and large modulus give the steepest profile, hence the largest roundoff in the residual.
  for (double L : {1.0, kPi}) {
    const auto w = wave_with_modulus(L, 0.9);
    for (const auto& m : {phi4::assemble_L1(w, 256), phi4::assemble_Lblock(w, 256)}) {
      EXPECT_EQ(m.asymmetry(), 0.0);
      EXPECT_LT((m.entries * m.expected_kernel).cwiseAbs().maxCoeff(), 1e-8) << "L=" << L;
    }
  }
}

TEST(Operators, MeanFreeBasisIsOrthonormal) {
  const Eigen::MatrixXd q = phi4::mean_free_basis(48);
  EXPECT_LT((q.transpose() * q - Eigen::MatrixXd::Identity(47, 47)).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((q.transpose() * Eigen::VectorXd::Ones(48)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Operators, SmallGridsRejected) {
  const auto w = wave_with_modulus(kPi, 0.5);
  EXPECT_THROW(phi4::assemble_L1(w, 16), std::invalid_argument);
  EXPECT_THROW(phi4::solve_D1(w, 32), std::invalid_argument);
}

TEST(Spectra, CountsAcrossPeriodsAndModuli) {
  for (double L : {1.0, kPi, 6.0}) {
    for (double k : {0.3, 0.6, 0.9}) {
      const auto w = wave_with_modulus(L, k);
      const auto l1 = phi4::assemble_L1(w, 128);
      const auto lb = phi4::assemble_Lblock(w, 128);
      const auto r1 = phi4::eigen_report(l1);
      const auto rb = phi4::eigen_report(lb);
      const auto r1c = phi4::eigen_report(phi4::constrain_zero_mean(l1));
      const auto rbc = phi4::eigen_report(phi4::constrain_zero_mean(lb));
      SCOPED_TRACE("L=" + std::to_string(L) + " k=" + std::to_string(k));
      EXPECT_EQ(r1.n, 1);
      EXPECT_EQ(r1.z, 1);
      EXPECT_EQ(rb.n, 1);
      EXPECT_EQ(rb.z, 1);
      EXPECT_EQ(r1c.n, 0);
      EXPECT_EQ(r1c.z, 1);
      EXPECT_EQ(rbc.n, 0);
      EXPECT_EQ(rbc.z, 1);
      EXPECT_LT(r1c.kernel_residual, 1e-8);
      EXPECT_LT(rbc.kernel_residual, 1e-8);
    }
  }
}

TEST(Spectra, ToleranceOverrideMovesClassification) {
  const auto w = wave_with_modulus(kPi, 0.5);
  const auto l1 = phi4::assemble_L1(w, 64);
  const auto tight = phi4::eigen_report(l1);
  const auto loose = phi4::eigen_report(l1, 10.0);
  EXPECT_EQ(tight.n + tight.z + tight.positive, 64);
  EXPECT_EQ(loose.n, 0);
  EXPECT_GT(loose.z, tight.z);
}

TEST(ClosedForms, FrozenEigenvaluesAtHalfModulus) {
  // k = 1/2: r = sqrt(13)/4, lambda_{0,4} = 1 -+ 2 sqrt(13) / 5.
  const auto w = wave_with_modulus(kPi, 0.5);
  const auto cf = phi4::closed_form_eigenpairs(w, 64);
  EXPECT_NEAR(cf.first.lambda, -0.44222051018559572, 1e-10);
  EXPECT_NEAR(cf.fifth.lambda, 2.4422205101855957, 1e-10);
  EXPECT_NEAR(1.0 - 2.0 * std::sqrt(13.0) / 5.0, -0.44222051018559572, 1e-15);
}

TEST(ClosedForms, AlgebraicIdentities) {
  for (double k : {0.1, 0.4, 0.8, 0.95}) {
    const auto cf = phi4::closed_form_eigenpairs(wave_with_modulus(2.0, k), 64);
    const double k2 = k * k;
    EXPECT_NEAR(cf.B1 * cf.B2, -3.0 * k2, 1e-13);
    EXPECT_GT(cf.B1, 0.0);
    EXPECT_LT(cf.B2, 0.0);
    EXPECT_NEAR(cf.first.lambda * cf.fifth.lambda, -3.0 * (1 - k2) * (1 - k2) / ((1 + k2) * (1 + k2)), 1e-13);
    EXPECT_LT(cf.first.lambda, 0.0);
    EXPECT_GT(cf.fifth.lambda, 0.0);
  }
}

TEST(ClosedForms, EigenpairsAndInverseOfOne) {
  for (double k : {0.3, 0.7}) {
    const auto w = wave_with_modulus(kPi, k);
    const auto l1 = phi4::assemble_L1(w, 128);
    const auto cf = phi4::closed_form_eigenpairs(w, 128);
    const auto res = [&](const phi4::GridField& f, double lam) {
      return (l1.entries * f.vector() - lam * f.vector()).cwiseAbs().maxCoeff();
    };
    EXPECT_LT(res(cf.first.f, cf.first.lambda), 1e-8);
    EXPECT_LT(res(cf.fifth.f, cf.fifth.lambda), 1e-8);
    EXPECT_NEAR(phi4::eigen_report(l1).eigenvalues.front(), cf.first.lambda, 1e-8);
    const auto inv = phi4::closed_form_inverse_of_one(cf);
    EXPECT_LT((l1.entries * inv.vector() - Eigen::VectorXd::Ones(128)).cwiseAbs().maxCoeff(), 1e-8);
    // The closed-form D1 is the integral of that same function.
    EXPECT_NEAR(inv.integral(), phi4::D1_closed(w), 1e-10 * std::abs(phi4::D1_closed(w)));
  }
}

TEST(D1, FrozenValueAtHalfModulus) {
  const auto w = wave_with_modulus(kPi, 0.5);
  EXPECT_NEAR(phi4::D1_closed(w) / w.period(), -2.2022657912807265, 1e-11);
}

TEST(D1, NumericMatchesClosedAndIsNegative) {
  for (double L : {1.0, 2.0, kPi, 5.0, 6.0}) {
    for (double k : {0.3, 0.5, 0.7, 0.9}) {
      const auto w = wave_with_modulus(L, k);
      const auto sol = phi4::solve_D1(w, 128);
      const double closed = phi4::D1_closed(w);
      EXPECT_LT(closed, 0.0);
      EXPECT_LE(std::abs(sol.value - closed), 1e-6 * std::abs(closed)) << "L=" << L << " k=" << k;
      EXPECT_LT(sol.orthogonality, 1e-8);
      EXPECT_LT(sol.residual, 1e-8);
    }
  }
}

TEST(D1, SmallModulusLimit) {
  // As k -> 0 the wave vanishes, L1 -> -omega d_xx - 1 and D1 -> -L.
  const auto w = wave_with_modulus(2.0, 1e-3);
  EXPECT_NEAR(phi4::D1_closed(w) / w.period(), -1.0, 1e-5);
}

TEST(DMatrix, IsDiagonalWithPeriodInCorner) {
  const auto w = wave_with_modulus(5.0, 0.6);
  const auto d = phi4::D_matrix(w, 128);
  EXPECT_LE(d.off_diagonal, 1e-8 * w.period());
  EXPECT_LE(d.lower_right_error, 1e-8);
  EXPECT_NEAR(d.data.D1, phi4::D1_closed(w), 1e-6 * std::abs(phi4::D1_closed(w)));
  EXPECT_EQ(d.data.n0, 1);
  EXPECT_EQ(d.data.z0, 0);
}

TEST(IndexFormula, SyntheticDegenerateD) {
  const auto idx = phi4::index_data_from_D1(0.0, 3.0, 1e-12);
  EXPECT_EQ(idx.n0, 0);
  EXPECT_EQ(idx.z0, 1);
  phi4::SpectralReport rep;
  rep.n = 2;
  rep.z = 1;
  const auto p = phi4::index_counts(rep, idx);
  EXPECT_EQ(p.n, 1);
  EXPECT_EQ(p.z, 2);

  const auto neg = phi4::index_data_from_D1(-2.0, 3.0);
  EXPECT_EQ(neg.n0, 1);
  EXPECT_EQ(neg.z0, 0);
  const auto pos = phi4::index_data_from_D1(2.0, 3.0);
  EXPECT_EQ(pos.n0 + pos.z0, 0);
}

TEST(IndexFormula, MismatchRaises) {
  phi4::SpectralReport constrained;
  constrained.kind = phi4::OperatorKind::L1Constrained;
  constrained.n = 0;
  constrained.z = 1;
  EXPECT_NO_THROW(phi4::verify_index_counts({0, 1}, constrained));
  EXPECT_THROW(phi4::verify_index_counts({1, 1}, constrained), phi4::IndexMismatch);
  EXPECT_THROW(phi4::verify_index_counts({0, 2}, constrained), phi4::ConsistencyError);
}

TEST(Analysis, FullRecordIsConsistent) {
  const auto a = phi4::analyze_spectrum(kPi, 0.95, 128);
  EXPECT_TRUE(a.index_consistent);
  EXPECT_NO_THROW(phi4::verify_index(a));
  EXPECT_EQ(a.predicted_L1_Pi.n, 0);
  EXPECT_EQ(a.predicted_L_Pi.z, 1);
  EXPECT_GE(a.coercivity, 1e-3);
  EXPECT_LT(a.lambda0_error, 1e-8);
  EXPECT_LT(a.inverse_one_residual, 1e-8);
  EXPECT_GE(a.lambda4_ordinal, 2);
  EXPECT_LT(a.d2, 0.0);
}

TEST(SecondDerivative, NegativeAndStepIndependent) {
  const double L = kPi;
  for (double c : {0.88, 0.92, 0.96, 0.98}) {
    const double d = phi4::d_second_derivative(L, c, 1e-4);
    const double dh = phi4::d_second_derivative(L, c, 5e-5);
    EXPECT_LT(d, 0.0) << "c=" << c;
    EXPECT_LT(std::abs(d - dh) / std::abs(d), 1e-3);
  }
}

TEST(SecondDerivative, EvenInSpeed) {
  const double d = phi4::d_second_derivative(kPi, 0.93, 1e-4);
  const double dm = phi4::d_second_derivative(kPi, -0.93, 1e-4);
  EXPECT_NEAR(d, dm, 1e-8 * std::abs(d));
}

TEST(SecondDerivative, MomentumMatchesQuadratureOracle) {
  const auto w = phi4::solve_modulus(kPi, 0.95);
  const double ref = w.speed() * oracle::integrate(
                                     [&](double x) {
                                       const double v = phi4::profile_eval(w, x).dh;
                                       return v * v;
                                     },
                                     0.0, w.period(), 1e-13);
  EXPECT_NEAR(phi4::wave_momentum(kPi, 0.95, 1024), ref, 1e-10 * ref);
}

TEST(Spectra, ZeroBandAtTheEndsOfTheSpeedWindow) {
  // Near the kink end the negative eigenvalue of L is O(1e-7); near the small-amplitude end
  // L has a positive eigenvalue O(1e-3) while the radius is O(1e5). Both must stay out of the band.
  const auto kink = phi4::solve_modulus(kPi, 0.99);
  const auto small = wave_with_modulus(1.0, 0.18);
  for (const auto& w : {kink, small}) {
    const auto rb = phi4::eigen_report(phi4::assemble_Lblock(w, 256));
    const auto rbc = phi4::eigen_report(phi4::constrain_zero_mean(phi4::assemble_Lblock(w, 256)));
    EXPECT_EQ(rb.n, 1) << "k=" << w.modulus();
    EXPECT_EQ(rb.z, 1) << "k=" << w.modulus();
    EXPECT_EQ(rbc.n, 0);
    EXPECT_EQ(rbc.z, 1);
  }
}
