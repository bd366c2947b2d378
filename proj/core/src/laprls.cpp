#include "mdoe/laprls.hpp"

#include <algorithm>
#include <string>

#include "mdoe/error.hpp"

namespace mdoe {

void LabeledSet::validate(Index pool_size) const {
  if (static_cast<Eigen::Index>(indices.size()) != labels.size()) {
    throw Error(ErrorCode::DimensionMismatch, "labeled set has " + std::to_string(indices.size()) +
                                                  " indices but " + std::to_string(labels.size()) + " labels");
  }
  validate_indices(indices, pool_size);
}

namespace {

void check_lambdas(double lambda_a, double lambda_i) {
  if (!(lambda_a > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_a must be positive");
  if (!(lambda_i >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_i must be nonnegative");
}

Matrix gram_columns(const Matrix& gram, const std::vector<Index>& cols) {
  Matrix out(gram.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Eigen::Index>(c)) = gram.col(static_cast<Eigen::Index>(cols[c]));
  return out;
}

}  // namespace

LapRlsModel fit_coefficients(const CandidatePool& pool, const LabeledSet& labeled, double lambda_a,
                             double lambda_i) {
  check_lambdas(lambda_a, lambda_i);
  labeled.validate(pool.size());
  if (labeled.size() == 0) throw Error(ErrorCode::EmptyInput, "fitting needs at least one labeled point");

  const Matrix& k = pool.gram;
  const Matrix kxz = gram_columns(k, labeled.indices);
  Matrix system = kxz * kxz.transpose() + lambda_a * k;
  if (lambda_i > 0.0) {
    if (pool.kernel_laplacian.rows() == k.rows()) {
      system += lambda_i * pool.kernel_laplacian;
    } else {
      system += lambda_i * (k * pool.laplacian.values * k);
    }
  }
  system = symmetrize(system);

  LapRlsModel model;
  try {
    const SpdMatrix spd(std::move(system));
    model.coefficients = spd.solve(Vector(kxz * labeled.labels));
  } catch (const Error& e) {
    if (e.code() != ErrorCode::NotPositiveDefinite) throw;
    throw Error(ErrorCode::SingularSystem,
                "LapRLS system is not numerically positive definite; increase lambda_a or the kernel range");
  }
  model.kernel = pool.kernel;
  model.basis_points = pool.points;
  model.lambda_a = lambda_a;
  model.lambda_i = lambda_i;
  return model;
}

double predict(const LapRlsModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.basis_points.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "query point has dimension " + std::to_string(x.size()) +
                                                  ", model expects " + std::to_string(model.basis_points.cols()));
  }
  double acc = 0.0;
  for (Eigen::Index i = 0; i < model.coefficients.size(); ++i) {
    acc += model.coefficients[i] * kernel_eval(model.kernel, model.basis_points.row(i).transpose(), x);
  }
  return acc;
}

Vector predict_pool(const LapRlsModel& model, const CandidatePool& pool) {
  if (model.coefficients.size() != pool.gram.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "model basis does not match pool");
  }
  return pool.gram * model.coefficients;
}

double laprls_objective(const CandidatePool& pool, const LabeledSet& labeled, double lambda_a, double lambda_i,
                        const Vector& coefficients) {
  labeled.validate(pool.size());
  const Matrix kxz = gram_columns(pool.gram, labeled.indices);
  const Vector resid = labeled.labels - kxz.transpose() * coefficients;
  const Vector ka = pool.gram * coefficients;
  return resid.squaredNorm() + lambda_a * coefficients.dot(ka) + lambda_i * ka.dot(pool.laplacian.values * ka);
}

Vector fit_beta_linear(const Matrix& features, const LaplacianMatrix& laplacian, const LabeledSet& labeled,
                       double lambda_a, double lambda_i) {
  check_lambdas(lambda_a, lambda_i);
  const auto n = static_cast<Index>(features.rows());
  if (laplacian.size() != features.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "Laplacian size does not match number of feature rows");
  }
  labeled.validate(n);
  const Eigen::Index p = features.cols();
  Matrix z(static_cast<Eigen::Index>(labeled.size()), p);
  for (std::size_t r = 0; r < labeled.size(); ++r) z.row(static_cast<Eigen::Index>(r)) = features.row(static_cast<Eigen::Index>(labeled.indices[r]));

  Matrix system = z.transpose() * z + lambda_a * Matrix::Identity(p, p);
  if (lambda_i > 0.0) system += lambda_i * (features.transpose() * laplacian.values * features);
  const SpdMatrix spd(symmetrize(system));
  return spd.solve(Vector(z.transpose() * labeled.labels));
}

}  // namespace mdoe
