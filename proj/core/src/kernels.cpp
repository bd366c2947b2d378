#include "mdoe/kernels.hpp"

#include <cmath>
#include <string>

#include "mdoe/error.hpp"

namespace mdoe {

KernelSpec KernelSpec::rbf(double range, RbfConvention convention) {
  KernelSpec spec{KernelKind::Rbf, range, convention};
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::linear() { return KernelSpec{KernelKind::Linear, 1.0, RbfConvention::Lengthscale}; }

void KernelSpec::validate() const {
  if (kind == KernelKind::Rbf && !(range > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "RBF range must be positive");
  }
}

KernelKind parse_kernel_kind(std::string_view name) {
  if (name == "rbf") return KernelKind::Rbf;
  if (name == "linear") return KernelKind::Linear;
  throw Error(ErrorCode::InvalidArgument, "unknown kernel '" + std::string(name) + "' (rbf|linear)");
}

RbfConvention parse_rbf_convention(std::string_view name) {
  if (name == "lengthscale") return RbfConvention::Lengthscale;
  if (name == "gamma") return RbfConvention::Gamma;
  throw Error(ErrorCode::InvalidArgument,
              "unknown rbf convention '" + std::string(name) + "' (lengthscale|gamma)");
}

std::string_view to_string(KernelKind kind) noexcept {
  return kind == KernelKind::Rbf ? "rbf" : "linear";
}

std::string_view to_string(RbfConvention convention) noexcept {
  return convention == RbfConvention::Lengthscale ? "lengthscale" : "gamma";
}

namespace {

double rbf_from_sqdist(const KernelSpec& spec, double sqdist) {
  if (spec.convention == RbfConvention::Gamma) return std::exp(-spec.range * sqdist);
  return std::exp(-sqdist / (2.0 * spec.range * spec.range));
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& x2) {
  if (x.size() != x2.size()) {
    throw Error(ErrorCode::DimensionMismatch, "kernel arguments have dimensions " +
                                                  std::to_string(x.size()) + " and " +
                                                  std::to_string(x2.size()));
  }
  if (spec.kind == KernelKind::Linear) return x.dot(x2);
  return rbf_from_sqdist(spec, (x - x2).squaredNorm());
}

Matrix gram(const KernelSpec& spec, const Matrix& rows, const Matrix& cols) {
  if (rows.rows() == 0 || cols.rows() == 0) {
    throw Error(ErrorCode::EmptyInput, "Gram matrix needs nonempty point lists");
  }
  if (rows.cols() != cols.cols()) {
    throw Error(ErrorCode::DimensionMismatch, "point lists have different ambient dimensions");
  }
  spec.validate();
  Matrix out(rows.rows(), cols.rows());
  for (Eigen::Index i = 0; i < rows.rows(); ++i) {
    for (Eigen::Index j = 0; j < cols.rows(); ++j) {
      out(i, j) = kernel_eval(spec, rows.row(i).transpose(), cols.row(j).transpose());
    }
  }
  return out;
}

Matrix gram(const KernelSpec& spec, const Matrix& points) {
  if (points.rows() == 0) throw Error(ErrorCode::EmptyInput, "Gram matrix needs a nonempty point list");
  spec.validate();
  const Eigen::Index n = points.rows();
  Matrix out(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kernel_eval(spec, points.row(i).transpose(), points.row(j).transpose());
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

}  // namespace mdoe
