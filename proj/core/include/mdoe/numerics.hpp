#pragma once

#include <Eigen/Cholesky>
#include <Eigen/Core>

namespace mdoe {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Dense symmetric positive-definite matrix with its lower Cholesky factor.
///
/// The factor is computed once, at construction, so a constructed SpdMatrix is
/// immutable and safe to share read-only between threads. Construction fails
/// with ErrorCode::NotPositiveDefinite when a pivot is not strictly positive;
/// no jitter is ever added.
class SpdMatrix {
 public:
  /// Symmetry is checked to 1e-12 relative to the largest entry.
  explicit SpdMatrix(Matrix values);

  [[nodiscard]] Eigen::Index dim() const noexcept { return values_.rows(); }
  [[nodiscard]] const Matrix& values() const noexcept { return values_; }
  [[nodiscard]] Matrix factor() const { return llt_.matrixL(); }

  [[nodiscard]] double logdet() const;
  [[nodiscard]] Vector solve(const Vector& b) const;
  [[nodiscard]] Matrix solve(const Matrix& b) const;
  [[nodiscard]] Matrix inverse() const;

  /// g^T A^{-1} g.
  [[nodiscard]] double inverse_quadratic(const Vector& g) const;

  /// Smallest diagonal entry of the Cholesky factor.
  [[nodiscard]] double min_pivot() const;

 private:
  Matrix values_;
  Eigen::LLT<Matrix> llt_;
};

double logdet(const SpdMatrix& a);
Vector solve(const SpdMatrix& a, const Vector& b);

/// |A + g g^T| / |A| = 1 + g^T A^{-1} g (matrix determinant lemma).
double rank_one_det_ratio(const SpdMatrix& a, const Vector& g);

/// Returns (A + A^T) / 2.
Matrix symmetrize(const Matrix& a);

}  // namespace mdoe
