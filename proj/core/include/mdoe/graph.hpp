#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "mdoe/numerics.hpp"

namespace mdoe {

struct Edge {
  std::size_t i = 0;  // i < j
  std::size_t j = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Undirected weighted graph on n nodes. Edges are stored once with i < j,
/// sorted lexicographically; no self-loops, no duplicates, weights >= 0.
class AdjacencyGraph {
 public:
  AdjacencyGraph() = default;
  AdjacencyGraph(std::size_t n, std::vector<Edge> edges);

  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  [[nodiscard]] const std::vector<Edge>& edges() const noexcept { return edges_; }
  [[nodiscard]] bool has_edge(std::size_t a, std::size_t b) const;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
};

enum class EdgeWeighting { Binary, Heat };

struct GraphOptions {
  std::size_t k = 7;
  EdgeWeighting weighting = EdgeWeighting::Binary;
  double heat_t = 1.0;  // w = exp(-|xi - xj|^2 / (2 t^2)) when weighting == Heat
};

EdgeWeighting parse_edge_weighting(std::string_view name);

/// Symmetrized kNN graph: (i, j) is an edge iff j is among the k nearest
/// Euclidean neighbours of i, or i among those of j. Distance ties go to the
/// lower index. Throws TooFewPoints when n <= k.
AdjacencyGraph knn_graph(const Matrix& points, const GraphOptions& options);
AdjacencyGraph knn_graph(const Matrix& points, std::size_t k);

/// Combinatorial Laplacian L = D - W (dense).
struct LaplacianMatrix {
  Matrix values;

  [[nodiscard]] Eigen::Index size() const noexcept { return values.rows(); }
  /// f^T L f
  [[nodiscard]] double quadratic_form(const Vector& f) const;
};

LaplacianMatrix laplacian(const AdjacencyGraph& graph);

}  // namespace mdoe
