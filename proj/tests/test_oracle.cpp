#include <gtest/gtest.h>

#include <cmath>

#include "reference.hpp"
#include "test_support.hpp"

using namespace covsel;

namespace {

Instance scalar(double sigma, double rho) {
  return Instance{SymMatrix::constant(1, sigma), SymMatrix::constant(1, rho), {}};
}

SymMatrix one(double v) { return SymMatrix::constant(1, v); }

}  // namespace

TEST(OracleEval, ScalarClosedForm) {
  const OracleEval ev = oracle_eval(scalar(2.0, 1.0), one(1.0), 0.1, 10.0);
  EXPECT_NEAR(ev.x(0, 0), 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(ev.g, std::log(1.0 / 3.0) - 1.0, 1e-15);
  EXPECT_NEAR(ev.grad(0, 0), -1.0 / 3.0, 1e-15);
  EXPECT_FALSE(ev.active);
}

TEST(OracleEval, ClampsAtBeta) {
  const OracleEval ev = oracle_eval(scalar(0.05, 0.0), one(0.0), 0.1, 10.0, 100.0);
  EXPECT_DOUBLE_EQ(ev.x(0, 0), 10.0);
  EXPECT_TRUE(ev.active);
  EXPECT_FALSE(oracle_eval(scalar(0.05, 0.0), one(0.0), 0.1, 10.0, 10.0).active);
  EXPECT_DOUBLE_EQ(oracle_eval(scalar(50.0, 0.0), one(0.0), 0.1, 10.0).x(0, 0), 0.1);
}

TEST(OracleEval, NegativeEigenvalueGoesToBeta) {
  // Rotate diag(2, -1) so the eigenbasis is not the coordinate one.
  const Eigen::Matrix2d r = testutil::rotation(0.3);
  const Eigen::Matrix2d c = r * Eigen::Vector2d(2.0, -1.0).asDiagonal() * r.transpose();
  const Instance inst{SymMatrix::symmetrize(c), SymMatrix::zeros(2), {}};
  const OracleEval ev = oracle_eval(inst, SymMatrix::zeros(2), 0.1, 5.0);
  const Eigen::Vector2d x = sym_eigenvalues(ev.x);
  EXPECT_NEAR(x(0), 5.0, 1e-12);
  EXPECT_NEAR(x(1), 0.5, 1e-12);
  const Eigen::Matrix2d expect = r * Eigen::Vector2d(0.5, 5.0).asDiagonal() * r.transpose();
  EXPECT_LE((ev.x.dense() - expect).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(OracleEval, RejectsPointsOutsideBox) {
  EXPECT_THROW(oracle_eval(scalar(1.0, 0.5), one(1.5), 0.1, 10.0), InvalidInput);
  EXPECT_NO_THROW(oracle_eval(scalar(1.0, 0.5), one(1.0 + 1e-13), 0.1, 10.0));
  EXPECT_THROW(oracle_eval(scalar(1.0, 0.5), one(0.0), 0.0, 10.0), InvalidInput);
  EXPECT_THROW(oracle_eval(scalar(1.0, 0.5), one(0.0), 2.0, 1.0), InvalidInput);
}

TEST(DualityGap, Examples) {
  for (double u : {-1.0, 0.0, 0.7}) {
    const OracleEval ev = oracle_eval(scalar(1.0, 0.0), one(u), 0.5, 2.0);
    EXPECT_DOUBLE_EQ(ev.x(0, 0), 1.0);
    EXPECT_DOUBLE_EQ(ev.g, -1.0);
    EXPECT_DOUBLE_EQ(ev.f, -1.0);
    EXPECT_DOUBLE_EQ(duality_gap(ev), 0.0);
  }

  const OracleEval opt = oracle_eval(scalar(1.0, 0.5), one(1.0), 0.01, 10.0);
  EXPECT_NEAR(opt.x(0, 0), 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(opt.g, std::log(2.0 / 3.0) - 1.0, 1e-15);
  EXPECT_NEAR(opt.f, std::log(2.0 / 3.0) - 2.0 / 3.0 - 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(duality_gap(opt), 0.0, 1e-15);

  std::mt19937_64 rng(30);
  const Instance inst{testutil::random_cov(rng, 4), testutil::random_rho(rng, 4), {}};
  const OracleEval ev = oracle_eval(inst, SymMatrix::zeros(4), 0.01, 100.0);
  const double expect = -inst.rho.dense().cwiseProduct(ev.x.dense().cwiseAbs()).sum();
  EXPECT_GT(duality_gap(ev), 0.0);
  EXPECT_NEAR(ev.f - ev.g, expect, 1e-10);
}

TEST(OracleEval, WeakDualityAndSpectralBox) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 100; ++trial) {
    const Index n = 1 + Index(rng() % 7);
    const Instance inst{testutil::random_sym(rng, n, -1.0, 1.5), testutil::random_rho(rng, n), {}};
    const double alpha = 0.05 + 0.2 * testutil::random_sym(rng, 1, 0.0, 1.0)(0, 0);
    const double beta = alpha * (1.0 + 20.0 * testutil::random_sym(rng, 1, 0.0, 1.0)(0, 0));
    const OracleEval ev = oracle_eval(inst, testutil::random_box(rng, n), alpha, beta);
    EXPECT_GE(ev.gap(), -1e-9 * (1.0 + std::abs(ev.g)));
    const Eigen::VectorXd lam = sym_eigenvalues(ev.x);
    EXPECT_GE(lam.minCoeff(), alpha * (1.0 - 1e-12));
    EXPECT_LE(lam.maxCoeff(), beta * (1.0 + 1e-12));
    EXPECT_EQ(ev.grad, pointwise_product(inst.rho, ev.x) * -1.0);
  }
}

TEST(OracleEval, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(32);
  const double alpha = 1e-3, beta = 1e3;
  for (int trial = 0; trial < 30; ++trial) {
    const Index n = 1 + Index(rng() % 8);
    const Instance inst{testutil::random_cov(rng, n, 0.3), testutil::random_rho(rng, n), {}};
    const SymMatrix u = testutil::random_box(rng, n) * 0.9;
    const OracleEval ev = oracle_eval(inst, u, alpha, beta);
    const Eigen::VectorXd d = sym_eigenvalues(inst.sigma + pointwise_product(inst.rho, u));
    // Skip draws with a spectrum near either clamp point, where g has a kink.
    bool near_kink = false;
    for (Index k = 0; k < n; ++k)
      near_kink |= std::abs(d(k) - 1.0 / beta) < 1e-4 || std::abs(d(k) - 1.0 / alpha) < 1e-2;
    if (near_kink) continue;
    const double scale = std::max(1.0, ev.grad.max_abs());
    for (Index i = 0; i < n; ++i)
      for (Index j = i; j < n; ++j) {
        const double fd = reference::dual_fd(inst, u, i, j, alpha, beta);
        const double an = i == j ? ev.grad(i, i) : 2.0 * ev.grad(i, j);
        EXPECT_LE(std::abs(fd - an), 1e-5 * scale) << "n=" << n << " (" << i << "," << j << ")";
      }
  }
}

TEST(OracleEval, MatchesBruteForceOnTwoByTwo) {
  std::mt19937_64 rng(33);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 25; ++trial) {
    const Instance inst{testutil::random_sym(rng, 2, -1.0, 2.0), testutil::random_rho(rng, 2), {}};
    const SymMatrix u = testutil::random_box(rng, 2);
    const double alpha = 0.05 + 0.5 * unit(rng);
    const double beta = alpha + 4.0 * unit(rng);
    const OracleEval ev = oracle_eval(inst, u, alpha, beta);
    const Eigen::Matrix2d c = (inst.sigma + pointwise_product(inst.rho, u)).dense();
    const double grid = reference::phi_grid_max_2x2(c, alpha, beta, 180, 40);
    EXPECT_GE(phi(inst, ev.x, u), grid - 1e-6);
    EXPECT_NEAR(ev.g, phi(inst, ev.x, u), 1e-12 * (1.0 + std::abs(ev.g)));
  }
}

TEST(OracleEval, MonotoneInBeta) {
  std::mt19937_64 rng(34);
  for (int trial = 0; trial < 50; ++trial) {
    const Index n = 1 + Index(rng() % 6);
    const Instance inst{testutil::random_sym(rng, n, -0.5, 1.0), testutil::random_rho(rng, n), {}};
    const SymMatrix u = testutil::random_box(rng, n);
    double prev = -std::numeric_limits<double>::infinity();
    for (double beta : {0.2, 0.5, 1.0, 3.0, 10.0, 100.0}) {
      const double g = oracle_eval(inst, u, 0.1, beta).g;
      EXPECT_GE(g, prev - 1e-12 * (1.0 + std::abs(g)));
      prev = g;
    }
  }
}

TEST(IsActive, RelativeTolerance) {
  EXPECT_TRUE(is_active(10.0, 10.0, 20.0));
  EXPECT_TRUE(is_active(10.0 * (1.0 - 1e-10), 10.0, 20.0));
  EXPECT_FALSE(is_active(10.0 * (1.0 - 1e-8), 10.0, 20.0));
  EXPECT_FALSE(is_active(10.0, 10.0, 10.0));
}
