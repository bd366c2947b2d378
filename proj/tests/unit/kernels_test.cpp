#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "mdoe/error.hpp"
#include "mdoe/kernels.hpp"
#include "oracles.hpp"

namespace mdoe {
namespace {

TEST(KernelEval, RbfAtZeroDistanceIsOne) {
  const Vector x = (Vector(3) << 0.3, -1.0, 2.0).finished();
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::rbf(0.01), x, x), 1.0);
}

TEST(KernelEval, LinearIsDotProduct) {
  EXPECT_DOUBLE_EQ(kernel_eval(KernelSpec::linear(), (Vector(2) << 1, 2).finished(), (Vector(2) << 3, 4).finished()),
                   11.0);
}

TEST(KernelEval, RbfLengthscaleConvention) {
  const Vector x = (Vector(2) << 0.0, 0.0).finished();
  const Vector y = (Vector(2) << 0.01, 0.0).finished();
  EXPECT_NEAR(kernel_eval(KernelSpec::rbf(0.01), x, y), std::exp(-0.5), 1e-12);
  EXPECT_NEAR(kernel_eval(KernelSpec::rbf(0.01), x, y), 0.6065, 1e-4);
}

TEST(KernelEval, RbfGammaConvention) {
  const Vector x = Vector::Zero(2);
  const Vector y = (Vector(2) << 3.0, 4.0).finished();
  EXPECT_NEAR(kernel_eval(KernelSpec::rbf(0.01, RbfConvention::Gamma), x, y), std::exp(-0.25), 1e-14);
}

TEST(KernelEval, DimensionMismatch) {
  try {
    (void)kernel_eval(KernelSpec::linear(), Vector::Zero(2), Vector::Zero(3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(KernelSpec, RejectsNonpositiveRange) {
  EXPECT_THROW(KernelSpec::rbf(0.0), Error);
  EXPECT_THROW(KernelSpec::rbf(-1.0), Error);
}

TEST(Gram, SinglePoint) {
  const Matrix pts = (Matrix(1, 2) << 0.5, 0.5).finished();
  const Matrix k = gram(KernelSpec::rbf(0.01), pts);
  ASSERT_EQ(k.rows(), 1);
  EXPECT_DOUBLE_EQ(k(0, 0), 1.0);
}

TEST(Gram, IdenticalPointsGiveAllOnes) {
  const Matrix pts = (Matrix(2, 2) << 1, 2, 1, 2).finished();
  EXPECT_TRUE(gram(KernelSpec::rbf(0.5), pts).isApprox(Matrix::Ones(2, 2)));
}

TEST(Gram, MatchesEntrywiseLoop) {
  std::mt19937_64 rng(4);
  const Matrix pts = testing::random_matrix(3, 4, rng);
  const Matrix k = gram(KernelSpec::rbf(0.7), pts);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double sq = 0.0;
      for (int c = 0; c < 4; ++c) sq += (pts(i, c) - pts(j, c)) * (pts(i, c) - pts(j, c));
      EXPECT_NEAR(k(i, j), std::exp(-sq / (2 * 0.49)), 1e-14);
    }
  }
}

TEST(Gram, EmptyAndMismatchedInputs) {
  try {
    (void)gram(KernelSpec::linear(), Matrix(0, 2), Matrix::Zero(1, 2));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyInput);
  }
  try {
    (void)gram(KernelSpec::linear(), Matrix::Zero(1, 2), Matrix::Zero(1, 3));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::DimensionMismatch);
  }
}

TEST(Gram, SymmetryRangeAndTransposeProperties) {
  std::mt19937_64 rng(99);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix s = testing::random_matrix(6, 3, rng);
    const Matrix t = testing::random_matrix(4, 3, rng);
    const KernelSpec spec = KernelSpec::rbf(0.3 + 0.1 * trial);
    const Matrix kss = gram(spec, s);
    EXPECT_EQ(kss, kss.transpose());
    EXPECT_TRUE((kss.diagonal().array() == 1.0).all());
    EXPECT_GT(kss.minCoeff(), 0.0);
    EXPECT_LE(kss.maxCoeff(), 1.0);
    EXPECT_EQ(gram(spec, s, t), gram(spec, t, s).transpose());
    // PSD: Cholesky of K + 1e-10 I succeeds.
    Eigen::LLT<Matrix> llt(kss + 1e-10 * Matrix::Identity(6, 6));
    EXPECT_EQ(llt.info(), Eigen::Success);
  }
}

}  // namespace
}  // namespace mdoe
