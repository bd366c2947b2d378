#include "mdoe/pool.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "mdoe/error.hpp"

namespace mdoe {

void validate_indices(const std::vector<Index>& indices, Index n) {
  std::vector<Index> sorted(indices);
  std::sort(sorted.begin(), sorted.end());
  if (!sorted.empty() && sorted.back() >= n) {
    throw Error(ErrorCode::OutOfRange,
                "index " + std::to_string(sorted.back()) + " outside pool of size " + std::to_string(n));
  }
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw Error(ErrorCode::InvalidArgument, "indices must be distinct");
  }
}

CandidatePool CandidatePool::build(Matrix points, const KernelSpec& kernel, const GraphOptions& graph) {
  LaplacianMatrix lap = mdoe::laplacian(knn_graph(points, graph));
  return with_laplacian(std::move(points), kernel, std::move(lap));
}

CandidatePool CandidatePool::with_laplacian(Matrix points, const KernelSpec& kernel, LaplacianMatrix laplacian) {
  if (laplacian.size() != points.rows()) {
    throw Error(ErrorCode::DimensionMismatch, "Laplacian size does not match number of points");
  }
  CandidatePool pool;
  pool.gram = mdoe::gram(kernel, points);
  pool.points = std::move(points);
  pool.kernel = kernel;
  pool.laplacian = std::move(laplacian);
  pool.kernel_laplacian = symmetrize(pool.gram * (pool.laplacian.values * pool.gram));
  return pool;
}

}  // namespace mdoe
