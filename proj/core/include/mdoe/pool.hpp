#pragma once

#include <cstddef>
#include <vector>

#include "mdoe/graph.hpp"
#include "mdoe/kernels.hpp"
#include "mdoe/numerics.hpp"

namespace mdoe {

using Index = std::size_t;

/// The design space: every candidate point plus the structures that depend
/// only on coordinates (Gram matrix and graph Laplacian). Built once per
/// dataset and shared by all strategies.
struct CandidatePool {
  Matrix points;  // n x d, one candidate per row
  KernelSpec kernel;
  Matrix gram;  // n x n
  LaplacianMatrix laplacian;
  Matrix kernel_laplacian;  // K L K, shared by LapRLS fits and the empirical-kernel-map regularizer

  [[nodiscard]] Index size() const noexcept { return static_cast<Index>(points.rows()); }
  [[nodiscard]] Eigen::Index dim() const noexcept { return points.cols(); }

  static CandidatePool build(Matrix points, const KernelSpec& kernel, const GraphOptions& graph);
  /// Pool with an externally supplied Laplacian (tests, custom graphs).
  static CandidatePool with_laplacian(Matrix points, const KernelSpec& kernel, LaplacianMatrix laplacian);
};

/// Throws OutOfRange / InvalidArgument unless the indices are distinct and < n.
void validate_indices(const std::vector<Index>& indices, Index n);

}  // namespace mdoe
