#include "mdoe/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mdoe/error.hpp"

namespace mdoe {

void StrategySpec::validate() const {
  if ((kind == StrategyKind::Random) != seed.has_value()) {
    throw Error(ErrorCode::InvalidArgument, "a seed is required for the random strategy and only for it");
  }
}

namespace {

struct NamedStrategy {
  std::string_view name;
  StrategyKind kind;
};

constexpr NamedStrategy kStrategies[] = {
    {"odoem", StrategyKind::Odoem},
    {"classical-d", StrategyKind::ClassicalD},
    {"random", StrategyKind::Random},
    {"uniform-l2", StrategyKind::UniformL2Discrepancy},
    {"uniform-minimax", StrategyKind::UniformMinimax},
    {"uniform-maximin", StrategyKind::UniformMaximin},
};

std::vector<char> taken_mask(Index n, const std::vector<Index>& labeled) {
  validate_indices(labeled, n);
  if (labeled.size() >= n) throw Error(ErrorCode::PoolExhausted, "every candidate is already labeled");
  std::vector<char> taken(n, 0);
  for (Index i : labeled) taken[i] = 1;
  return taken;
}

double distance(const Matrix& pts, Index a, Index b) {
  return (pts.row(static_cast<Eigen::Index>(a)) - pts.row(static_cast<Eigen::Index>(b))).norm();
}

// Product kernels of the centered L2 discrepancy.
double cd_single(const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  double prod = 1.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    const double a = std::abs(x[k] - 0.5);
    prod *= 1.0 + 0.5 * a - 0.5 * a * a;
  }
  return prod;
}

double cd_pair(const Eigen::Ref<const Eigen::RowVectorXd>& x, const Eigen::Ref<const Eigen::RowVectorXd>& y) {
  double prod = 1.0;
  for (Eigen::Index k = 0; k < x.size(); ++k) {
    prod *= 1.0 + 0.5 * std::abs(x[k] - 0.5) + 0.5 * std::abs(y[k] - 0.5) - 0.5 * std::abs(x[k] - y[k]);
  }
  return prod;
}

void require_unit_cube(const Matrix& pts) {
  if (pts.size() > 0 && (pts.minCoeff() < -1e-12 || pts.maxCoeff() > 1.0 + 1e-12)) {
    throw Error(ErrorCode::InvalidArgument, "coordinates must be rescaled to [0, 1]^d");
  }
}

}  // namespace

StrategyKind parse_strategy(std::string_view name) {
  for (const auto& s : kStrategies) {
    if (s.name == name) return s.kind;
  }
  std::string valid;
  for (const auto& s : kStrategies) valid += (valid.empty() ? "" : ", ") + std::string(s.name);
  throw Error(ErrorCode::InvalidArgument, "unknown strategy '" + std::string(name) + "'; valid names: " + valid);
}

std::string_view to_string(StrategyKind kind) noexcept {
  for (const auto& s : kStrategies) {
    if (s.kind == kind) return s.name;
  }
  return "odoem";
}

std::vector<std::string> strategy_names() {
  std::vector<std::string> out;
  for (const auto& s : kStrategies) out.emplace_back(s.name);
  return out;
}

Index classical_d_next(const FeatureMap& features, double lambda_a, const std::vector<Index>& labeled) {
  const Regularizer c = regularizer_from_penalty(Matrix::Zero(features.p(), features.p()), lambda_a, 0.0);
  return discrete_next(features, c, labeled);
}

Index random_next(Index n, const std::vector<Index>& labeled, std::mt19937_64& rng) {
  const auto taken = taken_mask(n, labeled);
  const Index remaining = n - labeled.size();
  std::uniform_int_distribution<Index> pick(0, remaining - 1);
  Index target = pick(rng);
  for (Index i = 0; i < n; ++i) {
    if (taken[i]) continue;
    if (target == 0) return i;
    --target;
  }
  throw Error(ErrorCode::PoolExhausted, "no unlabeled candidate left");
}

Matrix rescale_unit_cube(const Matrix& points) {
  Matrix out(points.rows(), points.cols());
  for (Eigen::Index k = 0; k < points.cols(); ++k) {
    const double lo = points.col(k).minCoeff();
    const double hi = points.col(k).maxCoeff();
    if (hi > lo) {
      out.col(k) = ((points.col(k).array() - lo) / (hi - lo)).matrix();
    } else {
      out.col(k).setConstant(0.5);
    }
  }
  return out;
}

Index maximin_next(const Matrix& unit_points, const std::vector<Index>& labeled) {
  const auto n = static_cast<Index>(unit_points.rows());
  const auto taken = taken_mask(n, labeled);
  Index best = n;
  double best_score = -1.0;
  if (labeled.empty()) {
    const Eigen::RowVectorXd centroid = unit_points.colwise().mean();
    for (Index z = 0; z < n; ++z) {
      const double s = (unit_points.row(static_cast<Eigen::Index>(z)) - centroid).norm();
      if (s > best_score) {
        best_score = s;
        best = z;
      }
    }
    return best;
  }
  for (Index z = 0; z < n; ++z) {
    if (taken[z]) continue;
    double nearest = std::numeric_limits<double>::infinity();
    for (Index s : labeled) nearest = std::min(nearest, distance(unit_points, z, s));
    if (nearest > best_score) {
      best_score = nearest;
      best = z;
    }
  }
  return best;
}

Index minimax_next(const Matrix& unit_points, const std::vector<Index>& labeled) {
  const auto n = static_cast<Index>(unit_points.rows());
  const auto taken = taken_mask(n, labeled);
  std::vector<double> to_labeled(n, std::numeric_limits<double>::infinity());
  for (Index x = 0; x < n; ++x) {
    for (Index s : labeled) to_labeled[x] = std::min(to_labeled[x], distance(unit_points, x, s));
  }
  Index best = n;
  double best_radius = std::numeric_limits<double>::infinity();
  for (Index z = 0; z < n; ++z) {
    if (taken[z]) continue;
    double radius = 0.0;
    for (Index x = 0; x < n && radius < best_radius; ++x) {
      radius = std::max(radius, std::min(to_labeled[x], distance(unit_points, x, z)));
    }
    if (radius < best_radius) {
      best_radius = radius;
      best = z;
    }
  }
  return best;
}

double centered_l2_discrepancy(const Matrix& unit_points) {
  require_unit_cube(unit_points);
  const Eigen::Index m = unit_points.rows();
  if (m == 0) throw Error(ErrorCode::EmptyInput, "discrepancy of an empty point set");
  const auto d = static_cast<double>(unit_points.cols());
  double single = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) single += cd_single(unit_points.row(i));
  double pair = 0.0;
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) pair += cd_pair(unit_points.row(i), unit_points.row(j));
  }
  const double md = static_cast<double>(m);
  return std::pow(13.0 / 12.0, d) - (2.0 / md) * single + pair / (md * md);
}

Index l2_discrepancy_next(const Matrix& unit_points, const std::vector<Index>& labeled) {
  require_unit_cube(unit_points);
  const auto n = static_cast<Index>(unit_points.rows());
  const auto taken = taken_mask(n, labeled);
  const auto d = static_cast<double>(unit_points.cols());

  // Sums over the labeled set, reused for every candidate.
  double single = 0.0;
  double pair = 0.0;
  for (Index i : labeled) single += cd_single(unit_points.row(static_cast<Eigen::Index>(i)));
  for (Index i : labeled) {
    for (Index j : labeled) {
      pair += cd_pair(unit_points.row(static_cast<Eigen::Index>(i)), unit_points.row(static_cast<Eigen::Index>(j)));
    }
  }
  const double m = static_cast<double>(labeled.size() + 1);
  const double base = std::pow(13.0 / 12.0, d);

  Index best = n;
  double best_value = std::numeric_limits<double>::infinity();
  for (Index z = 0; z < n; ++z) {
    if (taken[z]) continue;
    const auto zr = unit_points.row(static_cast<Eigen::Index>(z));
    double cross = 0.0;
    for (Index i : labeled) cross += cd_pair(unit_points.row(static_cast<Eigen::Index>(i)), zr);
    const double value =
        base - (2.0 / m) * (single + cd_single(zr)) + (pair + 2.0 * cross + cd_pair(zr, zr)) / (m * m);
    if (value < best_value) {
      best_value = value;
      best = z;
    }
  }
  return best;
}

}  // namespace mdoe
