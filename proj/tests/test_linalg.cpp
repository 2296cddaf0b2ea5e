#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "test_support.hpp"

using namespace covsel;

TEST(SymMatrix, RejectsAsymmetricInput) {
  Eigen::MatrixXd m(2, 2);
  m << 1, 2, 3, 4;
  EXPECT_THROW(SymMatrix::from_dense(m), InvalidInput);
  const SymMatrix s = SymMatrix::symmetrize(m);
  EXPECT_EQ(s(0, 1), 2.5);
  EXPECT_EQ(s(1, 0), 2.5);
  EXPECT_THROW(SymMatrix(0), InvalidInput);
}

TEST(SymEigen, Identity) {
  const auto es = sym_eigen(SymMatrix::identity(3));
  for (Index i = 0; i < 3; ++i) EXPECT_DOUBLE_EQ(es.lambda(i), 1.0);
  EXPECT_TRUE(es.q.transpose().isApprox(es.q.inverse()));
  // Any orthonormal basis is valid for a repeated eigenvalue.
  EXPECT_LE((es.q * es.q.transpose() - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(SymEigen, DiagonalSortedDescending) {
  const auto es = sym_eigen(SymMatrix::diagonal({1.0, 3.0}));
  EXPECT_DOUBLE_EQ(es.lambda(0), 3.0);
  EXPECT_DOUBLE_EQ(es.lambda(1), 1.0);
}

TEST(SymEigen, TwoByTwoSwap) {
  const auto es = sym_eigen(SymMatrix::from_rows({{0, 1}, {1, 0}}));
  EXPECT_NEAR(es.lambda(0), 1.0, 1e-15);
  EXPECT_NEAR(es.lambda(1), -1.0, 1e-15);
  const double r = 1.0 / std::sqrt(2.0);
  EXPECT_NEAR(std::abs(es.q(0, 0)), r, 1e-14);
  EXPECT_NEAR(es.q(0, 0) * es.q(1, 0), 0.5, 1e-14);   // (1,1)/sqrt2 up to sign
  EXPECT_NEAR(es.q(0, 1) * es.q(1, 1), -0.5, 1e-14);  // (1,-1)/sqrt2 up to sign
}

TEST(SymEigen, RejectsNonFinite) {
  SymMatrix m(2);
  m.set(0, 1, std::numeric_limits<double>::quiet_NaN());
  EXPECT_THROW(sym_eigen(m), InvalidInput);
}

TEST(SymEigen, ReconstructionAndOrthonormalityProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const Index n = 1 + Index(rng() % 50);
    const SymMatrix m = testutil::random_sym(rng, n, -3.0, 3.0);
    const auto es = sym_eigen(m);
    const Eigen::MatrixXd qtq = es.q.transpose() * es.q;
    EXPECT_LE((qtq - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-10 * double(n));
    EXPECT_LE((es.reconstruct().dense() - m.dense()).norm(), 1e-9 * (1.0 + m.frobenius_norm()));
    for (Index i = 1; i < n; ++i) EXPECT_GE(es.lambda(i - 1), es.lambda(i));
  }
}

TEST(SpectralNorm, Examples) {
  EXPECT_DOUBLE_EQ(spectral_norm(SymMatrix::diagonal({2.0, -5.0})), 5.0);
  EXPECT_NEAR(spectral_norm(SymMatrix::constant(2, 0.5)), 1.0, 1e-15);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 10; ++trial) {
    const SymMatrix m = testutil::random_sym(rng, 3);
    EXPECT_NEAR(spectral_norm(m), testutil::power_iteration_norm(m), 1e-8);
  }
}

TEST(PointwiseProduct, Examples) {
  const SymMatrix a = SymMatrix::from_rows({{1, 2}, {2, 3}});
  const SymMatrix b = SymMatrix::from_rows({{4, 5}, {5, 6}});
  EXPECT_EQ(pointwise_product(a, b), SymMatrix::from_rows({{4, 10}, {10, 18}}));
  EXPECT_EQ(pointwise_product(a, SymMatrix::zeros(2)), SymMatrix::zeros(2));
  EXPECT_EQ(pointwise_product(SymMatrix::identity(3), SymMatrix::identity(3)), SymMatrix::identity(3));
  EXPECT_THROW(pointwise_product(a, SymMatrix::zeros(3)), InvalidInput);
}

TEST(ProjectOntoUnitBox, Examples) {
  EXPECT_EQ(project_onto_unit_box(SymMatrix::zeros(3)), SymMatrix::zeros(3));
  EXPECT_EQ(project_onto_unit_box(SymMatrix::constant(3, 5.0)), SymMatrix::constant(3, 1.0));
  EXPECT_EQ(project_onto_unit_box(SymMatrix::from_rows({{0.5, -2}, {-2, 0.3}})),
            SymMatrix::from_rows({{0.5, -1}, {-1, 0.3}}));
}

TEST(ProjectOntoUnitBox, IdempotentAndSymmetrizing) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const SymMatrix m = testutil::random_sym(rng, 6, -3.0, 3.0);
    const SymMatrix p = project_onto_unit_box(m);
    EXPECT_EQ(project_onto_unit_box(p), p);
    EXPECT_LE(p.max_abs(), 1.0);
  }
  Eigen::MatrixXd drift(2, 2);
  drift << 0.2, 0.5 + 1e-17, 0.5, 3.0;
  const SymMatrix p = project_onto_unit_box(drift);
  EXPECT_EQ(p(0, 1), p(1, 0));
  EXPECT_EQ(p(1, 1), 1.0);
}

TEST(ProjectOntoUnitBox, NearestPointAgainstGrid) {
  // Any symmetric U-hat with entries on a grid in [-1,1] is no closer than the projection.
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    const SymMatrix m = testutil::random_sym(rng, 2, -2.5, 2.5);
    const double best = (project_onto_unit_box(m) - m).frobenius_norm();
    for (int a = 0; a <= 20; ++a)
      for (int b = 0; b <= 20; ++b)
        for (int c = 0; c <= 20; ++c) {
          SymMatrix u(2);
          u.set(0, 0, -1.0 + 0.1 * a);
          u.set(0, 1, -1.0 + 0.1 * b);
          u.set(1, 1, -1.0 + 0.1 * c);
          ASSERT_LE(best, (u - m).frobenius_norm() + 1e-15);
        }
  }
}

TEST(PairSet, InvariantsAndErrors) {
  const PairSet s = PairSet::from_unordered({{0, 2}, {1, 3}});
  EXPECT_EQ(s.size(), 4u);
  EXPECT_TRUE(s.contains(2, 0));
  EXPECT_TRUE(s.contains(3, 1));
  EXPECT_FALSE(s.contains(0, 1));
  EXPECT_THROW(PairSet::from_unordered({{1, 1}}), InvalidInput);
  EXPECT_THROW(PairSet::from_ordered({{0, 1}}), InvalidInput);
  EXPECT_NO_THROW(PairSet::from_ordered({{0, 1}, {1, 0}}));
}

TEST(MaxAbsOnSet, Examples) {
  std::mt19937_64 rng(9);
  const SymMatrix any = testutil::random_sym(rng, 3);
  EXPECT_EQ(max_abs_on_set(any, PairSet{}), 0.0);
  EXPECT_DOUBLE_EQ(max_abs_on_set(SymMatrix::from_rows({{1, 0.3}, {0.3, 1}}), PairSet::from_unordered({{0, 1}})), 0.3);
  EXPECT_THROW(max_abs_on_set(any, PairSet::from_unordered({{0, 5}})), InvalidInput);

  const SymMatrix m = testutil::random_sym(rng, 4, -2.0, 2.0);
  std::vector<PairSet::Pair> all;
  double scan = 0.0;
  for (Index i = 0; i < 4; ++i)
    for (Index j = 0; j < 4; ++j)
      if (i != j) {
        all.emplace_back(i, j);
        scan = std::max(scan, std::abs(m(i, j)));
      }
  EXPECT_EQ(max_abs_on_set(m, PairSet::from_ordered(all)), scan);
}
