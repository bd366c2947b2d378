#include "mdoe/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mdoe/error.hpp"

namespace mdoe {

AdjacencyGraph::AdjacencyGraph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  for (auto& e : edges_) {
    if (e.i == e.j) throw Error(ErrorCode::InvalidArgument, "self-loop at node " + std::to_string(e.i));
    if (e.i > e.j) std::swap(e.i, e.j);
    if (e.j >= n_) throw Error(ErrorCode::OutOfRange, "edge endpoint " + std::to_string(e.j) + " >= n");
    if (!(e.weight >= 0.0)) throw Error(ErrorCode::InvalidArgument, "edge weights must be nonnegative");
  }
  std::sort(edges_.begin(), edges_.end(),
            [](const Edge& a, const Edge& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
  const auto dup = std::adjacent_find(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) {
    return a.i == b.i && a.j == b.j;
  });
  if (dup != edges_.end()) {
    throw Error(ErrorCode::InvalidArgument,
                "duplicate edge (" + std::to_string(dup->i) + ", " + std::to_string(dup->j) + ")");
  }
}

bool AdjacencyGraph::has_edge(std::size_t a, std::size_t b) const {
  if (a > b) std::swap(a, b);
  return std::binary_search(edges_.begin(), edges_.end(), Edge{a, b, 0.0},
                            [](const Edge& x, const Edge& y) { return std::pair(x.i, x.j) < std::pair(y.i, y.j); });
}

EdgeWeighting parse_edge_weighting(std::string_view name) {
  if (name == "binary") return EdgeWeighting::Binary;
  if (name == "heat") return EdgeWeighting::Heat;
  throw Error(ErrorCode::InvalidArgument, "unknown edge weighting '" + std::string(name) + "' (binary|heat)");
}

AdjacencyGraph knn_graph(const Matrix& points, const GraphOptions& options) {
  const auto n = static_cast<std::size_t>(points.rows());
  const std::size_t k = options.k;
  if (k < 1) throw Error(ErrorCode::InvalidArgument, "k must be at least 1");
  if (n <= k) {
    throw Error(ErrorCode::TooFewPoints,
                "kNN graph needs more than k=" + std::to_string(k) + " points, got " + std::to_string(n));
  }
  if (options.weighting == EdgeWeighting::Heat && !(options.heat_t > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "heat-kernel width must be positive");
  }

  Matrix sqdist(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    sqdist(i, i) = 0.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double d = (points.row(i) - points.row(j)).squaredNorm();
      sqdist(i, j) = d;
      sqdist(j, i) = d;
    }
  }

  std::vector<char> adj(n * n, 0);
  std::vector<std::size_t> order(n - 1);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t pos = 0;
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i) order[pos++] = j;
    }
    std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(),
                      [&](std::size_t a, std::size_t b) {
                        if (sqdist(i, a) != sqdist(i, b)) return sqdist(i, a) < sqdist(i, b);
                        return a < b;
                      });
    for (std::size_t t = 0; t < k; ++t) {
      const std::size_t j = order[t];
      adj[std::min(i, j) * n + std::max(i, j)] = 1;
    }
  }

  std::vector<Edge> edges;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!adj[i * n + j]) continue;
      double w = 1.0;
      if (options.weighting == EdgeWeighting::Heat) {
        w = std::exp(-sqdist(i, j) / (2.0 * options.heat_t * options.heat_t));
      }
      edges.push_back({i, j, w});
    }
  }
  return AdjacencyGraph(n, std::move(edges));
}

AdjacencyGraph knn_graph(const Matrix& points, std::size_t k) {
  GraphOptions options;
  options.k = k;
  return knn_graph(points, options);
}

double LaplacianMatrix::quadratic_form(const Vector& f) const {
  if (f.size() != values.rows()) throw Error(ErrorCode::DimensionMismatch, "vector length != Laplacian size");
  return f.dot(values * f);
}

LaplacianMatrix laplacian(const AdjacencyGraph& graph) {
  const auto n = static_cast<Eigen::Index>(graph.size());
  LaplacianMatrix lap{Matrix::Zero(n, n)};
  for (const auto& e : graph.edges()) {
    const auto i = static_cast<Eigen::Index>(e.i);
    const auto j = static_cast<Eigen::Index>(e.j);
    lap.values(i, j) -= e.weight;
    lap.values(j, i) -= e.weight;
    lap.values(i, i) += e.weight;
    lap.values(j, j) += e.weight;
  }
  return lap;
}

}  // namespace mdoe
