#include "mdoe/numerics.hpp"

#include <cmath>
#include <string>

#include "mdoe/error.hpp"

namespace mdoe {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::TooFewPoints: return "TooFewPoints";
    case ErrorCode::SingularSystem: return "SingularSystem";
    case ErrorCode::AlreadyOptimal: return "AlreadyOptimal";
    case ErrorCode::BudgetExceedsPool: return "BudgetExceedsPool";
    case ErrorCode::PoolExhausted: return "PoolExhausted";
    case ErrorCode::NotPerfectSquare: return "NotPerfectSquare";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::AngleOutOfRange: return "AngleOutOfRange";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

SpdMatrix::SpdMatrix(Matrix values) : values_(std::move(values)) {
  if (values_.rows() != values_.cols() || values_.rows() == 0) {
    throw Error(ErrorCode::DimensionMismatch, "SPD matrix must be square and nonempty, got " +
                                                  std::to_string(values_.rows()) + "x" +
                                                  std::to_string(values_.cols()));
  }
  const double scale = values_.cwiseAbs().maxCoeff();
  if (!std::isfinite(scale)) {
    throw Error(ErrorCode::NotPositiveDefinite, "matrix has non-finite entries");
  }
  const double asym = (values_ - values_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-12 * scale) {
    throw Error(ErrorCode::InvalidArgument,
                "matrix is not symmetric (max asymmetry " + std::to_string(asym) + ")");
  }
  llt_.compute(values_);
  if (llt_.info() != Eigen::Success || min_pivot() <= 0.0) {
    throw Error(ErrorCode::NotPositiveDefinite, "Cholesky factorization hit a nonpositive pivot");
  }
}

double SpdMatrix::min_pivot() const { return llt_.matrixLLT().diagonal().minCoeff(); }

double SpdMatrix::logdet() const {
  const auto diag = llt_.matrixLLT().diagonal();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) acc += 2.0 * std::log(diag[i]);
  return acc;
}

Vector SpdMatrix::solve(const Vector& b) const {
  if (b.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "rhs has length " + std::to_string(b.size()) +
                                                  ", matrix has dim " + std::to_string(dim()));
  }
  return llt_.solve(b);
}

Matrix SpdMatrix::solve(const Matrix& b) const {
  if (b.rows() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "rhs has " + std::to_string(b.rows()) +
                                                  " rows, matrix has dim " + std::to_string(dim()));
  }
  return llt_.solve(b);
}

Matrix SpdMatrix::inverse() const {
  return llt_.solve(Matrix::Identity(dim(), dim()));
}

double SpdMatrix::inverse_quadratic(const Vector& g) const {
  if (g.size() != dim()) {
    throw Error(ErrorCode::DimensionMismatch, "vector length does not match matrix dimension");
  }
  // ||L^{-1} g||^2 avoids forming A^{-1}.
  const Vector w = llt_.matrixL().solve(g);
  return w.squaredNorm();
}

double logdet(const SpdMatrix& a) { return a.logdet(); }

Vector solve(const SpdMatrix& a, const Vector& b) { return a.solve(b); }

double rank_one_det_ratio(const SpdMatrix& a, const Vector& g) {
  return 1.0 + a.inverse_quadratic(g);
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace mdoe
