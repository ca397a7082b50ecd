#include "ritzgn/linalg.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <limits>

namespace ritzgn {
namespace {

Matrix random_matrix(Rng& rng, Index r, Index c) {
  Matrix A(r, c);
  for (Index i = 0; i < r; ++i)
    for (Index j = 0; j < c; ++j) A(i, j) = rng.normal();
  return A;
}

// Random matrix of a prescribed rank as a product of Gaussian factors.
Matrix random_rank(Rng& rng, Index r, Index c, Index k) { return random_matrix(rng, r, k) * random_matrix(rng, k, c); }

Matrix random_orthogonal(Rng& rng, Index n) {
  Eigen::HouseholderQR<Matrix> qr(random_matrix(rng, n, n));
  return qr.householderQ() * Matrix::Identity(n, n);
}

TEST(Svd, IdentityAndDiagonal) {
  EXPECT_EQ(svd(Matrix::Identity(3, 3)).sigma, Vector::Ones(3));
  Matrix D = Matrix::Zero(3, 3);
  D.diagonal() << 3, 0, 2;
  const auto s = svd(D);
  EXPECT_NEAR(s.sigma[0], 3.0, 1e-15);
  EXPECT_NEAR(s.sigma[1], 2.0, 1e-15);
  EXPECT_NEAR(s.sigma[2], 0.0, 1e-15);
  EXPECT_EQ(s.rank, 2);
}

TEST(SvdProperty, ReconstructionAndOrthonormality) {
  Rng rng(1);
  for (int trial = 0; trial < 30; ++trial) {
    const Index r = 1 + static_cast<Index>(rng.below(50)), c = 1 + static_cast<Index>(rng.below(30));
    const Matrix A = random_matrix(rng, r, c);
    const auto s = svd(A);
    const Matrix back = s.U * s.sigma.asDiagonal() * s.V.transpose();
    EXPECT_LE((back - A).norm() / A.norm(), 1e-10);
    const Index k = s.sigma.size();
    EXPECT_LE((s.U.transpose() * s.U - Matrix::Identity(k, k)).norm(), 1e-10);
    EXPECT_LE((s.V.transpose() * s.V - Matrix::Identity(k, k)).norm(), 1e-10);
    for (Index i = 1; i < k; ++i) EXPECT_LE(s.sigma[i], s.sigma[i - 1]);
    EXPECT_GE(s.sigma.minCoeff(), 0.0);
  }
}

TEST(Svd, RejectsNonFinite) {
  Matrix A = Matrix::Ones(2, 2);
  A(0, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW((void)svd(A), Error);
}

TEST(Pinv, IdentityAndDiagonal) {
  EXPECT_LE((pinv_rank_r(Matrix::Identity(4, 4)) - Matrix::Identity(4, 4)).norm(), 1e-15);
  Matrix D = Matrix::Zero(3, 3);
  D.diagonal() << 2, 1, 0;
  Matrix expected = Matrix::Zero(3, 3);
  expected.diagonal() << 0.5, 1, 0;
  EXPECT_LE((pinv_rank_r(D, 1e-12) - expected).norm(), 1e-15);
}

TEST(Pinv, ZeroMatrixGivesZero) {
  const auto s = svd(Matrix::Zero(4, 3));
  EXPECT_EQ(numerical_rank(s, 1e-10), 0);
  EXPECT_EQ(pinv_rank_r(s, 1e-10), Matrix::Zero(3, 4));
}

TEST(Pinv, ThresholdMustBeInUnitInterval) {
  const auto s = svd(Matrix::Identity(2, 2));
  EXPECT_THROW((void)pinv_rank_r(s, 0.0), ConfigError);
  EXPECT_THROW((void)pinv_rank_r(s, 1.0), ConfigError);
}

TEST(PinvProperty, PenroseConditionsIncludingRankDeficient) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const Index r = 1 + static_cast<Index>(rng.below(50)), c = 1 + static_cast<Index>(rng.below(30));
    const Index full = std::min(r, c);
    const Index k = trial % 2 ? full : 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(full)));
    const Matrix A = random_rank(rng, r, c, k);
    const Matrix X = pinv_rank_r(A, 1e-10);
    EXPECT_LE(penrose_residuals(A, X).max(), 1e-10) << r << "x" << c << " rank " << k;
  }
}

TEST(PinvProperty, DoublePinvIsTheRankRProjection) {
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = random_rank(rng, 12, 8, 5);
    const auto s = svd(A);
    const Matrix Ar = s.U.leftCols(s.rank) * s.sigma.head(s.rank).asDiagonal() * s.V.leftCols(s.rank).transpose();
    EXPECT_LE((pinv_rank_r(pinv_rank_r(A, 1e-10), 1e-10) - Ar).norm(), 1e-8);
  }
}

TEST(PinvProperty, ApplyMatchesExplicitPinv) {
  Rng rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = random_rank(rng, 20, 15, 9);
    Vector b(20);
    for (Index i = 0; i < 20; ++i) b[i] = rng.normal();
    int rank = -1;
    const Vector x = pinv_apply(svd(A), b, 1e-10, &rank);
    EXPECT_EQ(rank, 9);
    EXPECT_LE((x - pinv_rank_r(A) * b).norm(), 1e-10 * (1 + x.norm()));
  }
}

TEST(PinvProperty, GramPinvMatchesPinvOfTheGram) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix B = random_rank(rng, 30, 10, 6);
    const Matrix J = B.transpose() * B;
    Vector g(10);
    for (Index i = 0; i < 10; ++i) g[i] = rng.normal();
    const Vector x = gram_pinv_apply(svd(B), g, 1e-10);
    EXPECT_LE((x - pinv_rank_r(J, 1e-10) * g).norm(), 1e-8 * (1 + x.norm()));
  }
}

TEST(Rank, Examples) {
  EXPECT_EQ(numerical_rank(Matrix::Identity(7, 7)), 7);
  Vector u(5);
  u << 1, -2, 3, 0.5, 1;
  EXPECT_EQ(numerical_rank(Matrix(u * u.transpose())), 1);
  Matrix H = Matrix::Zero(2, 2);
  H(0, 0) = 2.0;
  EXPECT_EQ(numerical_rank(H), 1);
}

TEST(RankProperty, InvariantUnderOrthogonalTransforms) {
  Rng rng(6);
  for (int trial = 0; trial < 20; ++trial) {
    const Index k = 1 + static_cast<Index>(rng.below(8));
    const Matrix A = random_rank(rng, 10, 8, k);
    const Matrix Q1 = random_orthogonal(rng, 10), Q2 = random_orthogonal(rng, 8);
    EXPECT_EQ(numerical_rank(Matrix(Q1 * A * Q2)), numerical_rank(A));
    EXPECT_EQ(numerical_rank(A), k);
  }
}

TEST(SpectralNorm, MatchesLargestSingularValue) {
  Rng rng(7);
  const Matrix A = random_matrix(rng, 20, 12);
  EXPECT_NEAR(spectral_norm(A), svd(A).sigma[0], 1e-7 * svd(A).sigma[0]);
  EXPECT_EQ(spectral_norm(Matrix::Zero(3, 3)), 0.0);
}

TEST(Wedin, ZeroPerturbation) {
  Rng rng(8);
  const Matrix A = random_matrix(rng, 6, 4);
  const auto w = wedin_check(A, Matrix::Zero(6, 4));
  EXPECT_TRUE(w.applicable);
  EXPECT_NEAR(w.lhs_2, 0.0, 1e-14);
  EXPECT_NEAR(w.lhs_f, 0.0, 1e-14);
}

TEST(Wedin, ScalarEquality) {
  const Matrix A = Matrix::Constant(1, 1, 2.0), E = Matrix::Constant(1, 1, 0.1);
  const auto w = wedin_check(A, E);
  EXPECT_NEAR(w.lhs_2, 1.0 / 2.0 - 1.0 / 2.1, 1e-15);
  EXPECT_NEAR(w.rhs_2, 0.5 / 2.1 * 0.1, 1e-15);
  EXPECT_NEAR(w.mu_2, 1.0, 1e-12);
}

TEST(WedinProperty, PinvGrowthBound) {
  Rng rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix A = random_matrix(rng, 10, 10) + 5.0 * Matrix::Identity(10, 10);
    const double pinv_norm = 1.0 / svd(A).sigma[9];
    Matrix E = random_matrix(rng, 10, 10);
    E *= 0.5 / (pinv_norm * svd(E).sigma[0]);  // ‖A†‖‖E‖ = 1/2
    const auto w = wedin_check(A, E);
    ASSERT_TRUE(w.applicable);
    EXPECT_LE(w.pinv_norm_b, w.pinv_growth_bound * (1 + 1e-12));
    EXPECT_LE(w.lhs_2, w.rhs_2 * 1.0 + 1e-12);  // μ = 1 suffices for square invertible A
  }
}

TEST(Wedin, RankChangeIsFlagged) {
  Matrix A = Matrix::Zero(2, 2);
  A(0, 0) = 1.0;
  Matrix E = Matrix::Zero(2, 2);
  E(1, 1) = 0.5;
  EXPECT_FALSE(wedin_check(A, E).applicable);
}

}  // namespace
}  // namespace ritzgn
