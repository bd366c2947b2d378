#pragma once

#include <vector>

#include "mdoe/graph.hpp"
#include "mdoe/kernels.hpp"
#include "mdoe/pool.hpp"

namespace mdoe {

/// Indices into a candidate pool and the labels revealed for them.
struct LabeledSet {
  std::vector<Index> indices;
  Vector labels;

  [[nodiscard]] Index size() const noexcept { return indices.size(); }
  void validate(Index pool_size) const;
};

/// Fitted Laplacian-regularized least-squares model
///   f(x) = sum_i coefficients_i K(x_i, x)
/// over every candidate x_i (labeled and unlabeled).
struct LapRlsModel {
  Vector coefficients;
  KernelSpec kernel;
  Matrix basis_points;
  double lambda_a = 0.0;
  double lambda_i = 0.0;
};

/// Solves (K_XZ K_XZ^T + lambda_a K + lambda_i K L K) a = K_XZ y with one
/// Cholesky solve on the symmetrized system. A system that is only
/// semidefinite in floating point raises SingularSystem; raise lambda_a
/// instead of expecting jitter.
LapRlsModel fit_coefficients(const CandidatePool& pool, const LabeledSet& labeled, double lambda_a,
                             double lambda_i);

double predict(const LapRlsModel& model, const Eigen::Ref<const Vector>& x);

/// Predictions at every pool point, K * coefficients.
Vector predict_pool(const LapRlsModel& model, const CandidatePool& pool);

/// Value of the representer-form objective at `coefficients`.
double laprls_objective(const CandidatePool& pool, const LabeledSet& labeled, double lambda_a,
                        double lambda_i, const Vector& coefficients);

/// Linear-parameter estimate
///   beta = (Z^T Z + lambda_a I_p + lambda_i X^T L X)^{-1} Z^T y
/// where the rows of `features` are g(x_i)^T and Z holds the labeled rows.
Vector fit_beta_linear(const Matrix& features, const LaplacianMatrix& laplacian, const LabeledSet& labeled,
                       double lambda_a, double lambda_i);

}  // namespace mdoe
