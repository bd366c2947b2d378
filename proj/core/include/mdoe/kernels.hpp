#pragma once

#include <string_view>

#include "mdoe/numerics.hpp"

namespace mdoe {

enum class KernelKind { Rbf, Linear };

/// How the RBF "range" value is read.
///   Lengthscale: k(x, y) = exp(-|x - y|^2 / (2 range^2))
///   Gamma:       k(x, y) = exp(-range |x - y|^2)
enum class RbfConvention { Lengthscale, Gamma };

struct KernelSpec {
  KernelKind kind = KernelKind::Rbf;
  double range = 0.01;
  RbfConvention convention = RbfConvention::Lengthscale;

  static KernelSpec rbf(double range, RbfConvention convention = RbfConvention::Lengthscale);
  static KernelSpec linear();

  /// Throws InvalidArgument when an RBF kernel has a nonpositive range.
  void validate() const;
};

KernelKind parse_kernel_kind(std::string_view name);
RbfConvention parse_rbf_convention(std::string_view name);
std::string_view to_string(KernelKind kind) noexcept;
std::string_view to_string(RbfConvention convention) noexcept;

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x,
                   const Eigen::Ref<const Vector>& x2);

/// Gram matrix between the rows of `rows` and the rows of `cols` (points are
/// rows). Both triangles of a square self-Gram are filled from a single
/// evaluation, so gram(S, S) is exactly symmetric.
Matrix gram(const KernelSpec& spec, const Matrix& rows, const Matrix& cols);
Matrix gram(const KernelSpec& spec, const Matrix& points);

}  // namespace mdoe
