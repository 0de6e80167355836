#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "phi4/errors.hpp"
#include "phi4/fourier.hpp"
#include "phi4/grid.hpp"

using phi4::GridField;

TEST(Grid, SpectralDerivativeOfTrigPolynomial) {
  const double L = 2.5;
  const double xi = 2 * std::numbers::pi / L;
  const GridField f = GridField::sample(L, 64, [&](double x) { return std::sin(3 * xi * x) + std::cos(xi * x); });
  const GridField d1 = f.derivative(1);
  const GridField d2 = f.derivative(2);
  for (std::size_t j = 0; j < f.size(); ++j) {
    const double x = f.x(j);
    EXPECT_NEAR(d1[j], 3 * xi * std::cos(3 * xi * x) - xi * std::sin(xi * x), 1e-12);
    EXPECT_NEAR(d2[j], -9 * xi * xi * std::sin(3 * xi * x) - xi * xi * std::cos(xi * x), 1e-10);
  }
}

TEST(Grid, DifferentiationMatricesAgreeWithFft) {
  const double L = 4.0;
  const std::size_t n = 32;
  const GridField f = GridField::sample(L, n, [&](double x) { return std::exp(std::sin(2 * std::numbers::pi * x / L)); });
  const Eigen::VectorXd d1 = phi4::fourier_first_derivative_matrix(n, L) * f.vector();
  const Eigen::VectorXd d2 = phi4::fourier_second_derivative_matrix(n, L) * f.vector();
  const GridField g1 = f.derivative(1);
  const GridField g2 = f.derivative(2);
  for (std::size_t j = 0; j < n; ++j) {
    EXPECT_NEAR(d1(static_cast<Eigen::Index>(j)), g1[j], 1e-11);
    EXPECT_NEAR(d2(static_cast<Eigen::Index>(j)), g2[j], 1e-10);
  }
}

TEST(Grid, DifferentiationMatrixSymmetries) {
  const Eigen::MatrixXd d1 = phi4::fourier_first_derivative_matrix(64, 3.0);
  const Eigen::MatrixXd d2 = phi4::fourier_second_derivative_matrix(64, 3.0);
  EXPECT_LT((d1 + d1.transpose()).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_LT((d2 - d2.transpose()).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_LT((d1 * Eigen::VectorXd::Ones(64)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Grid, TrapezoidIsExactForTrigPolynomials) {
  const double L = 1.7;
  const double xi = 2 * std::numbers::pi / L;
  const GridField f = GridField::sample(L, 32, [&](double x) { return 2.0 + std::cos(5 * xi * x); });
  EXPECT_NEAR(f.integral(), 2.0 * L, 1e-14);
  EXPECT_NEAR(f.mean(), 2.0, 1e-14);
  const GridField s = GridField::sample(L, 32, [&](double x) { return std::sin(xi * x); });
  EXPECT_NEAR(phi4::inner(s, s), L / 2, 1e-14);
}

TEST(Grid, FourierRoundTrip) {
  phi4::FourierWorkspace ws(16);
  std::vector<double> v(16);
  for (std::size_t j = 0; j < 16; ++j) v[j] = std::sin(0.3 * j) + 0.1 * j;
  std::vector<phi4::FourierWorkspace::Complex> c(ws.modes());
  std::vector<double> back(16);
  ws.forward(v, c);
  ws.backward(c, back);
  for (std::size_t j = 0; j < 16; ++j) EXPECT_NEAR(back[j], v[j], 1e-14);
}

TEST(Grid, RejectsOddOrTinyGrids) {
  EXPECT_ANY_THROW(GridField::zeros(1.0, 15));
  EXPECT_ANY_THROW(GridField::zeros(1.0, 8));
}

TEST(Grid, DifferentiationMatricesAreExactlyCirculant) {
  const std::size_t n = 64;
  const Eigen::MatrixXd d1 = phi4::fourier_first_derivative_matrix(n, 1.0);
  const Eigen::MatrixXd d2 = phi4::fourier_second_derivative_matrix(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const auto a = static_cast<Eigen::Index>(i);
      const auto b = static_cast<Eigen::Index>(j);
      const auto a1 = static_cast<Eigen::Index>((i + 1) % n);
      const auto b1 = static_cast<Eigen::Index>((j + 1) % n);
      ASSERT_EQ(d1(a, b), -d1(b, a));
      ASSERT_EQ(d2(a, b), d2(b, a));
      ASSERT_EQ(d1(a, b), d1(a1, b1));
      ASSERT_EQ(d2(a, b), d2(a1, b1));
    }
  }
}
