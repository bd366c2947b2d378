#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "mdoe/design.hpp"

namespace mdoe {

enum class StrategyKind { Odoem, ClassicalD, Random, UniformL2Discrepancy, UniformMinimax, UniformMaximin };

struct StrategySpec {
  StrategyKind kind = StrategyKind::Odoem;
  std::optional<std::uint64_t> seed;  // present iff kind == Random

  /// Throws InvalidArgument when the seed/kind pairing is inconsistent.
  void validate() const;
};

/// CLI names: odoem, classical-d, random, uniform-l2, uniform-minimax, uniform-maximin.
StrategyKind parse_strategy(std::string_view name);
std::string_view to_string(StrategyKind kind) noexcept;
std::vector<std::string> strategy_names();

/// Greedy D-optimal pick for the kernel model without manifold term
/// (C = lambda_a I): identical to the discrete ODOEM pick at lambda_i = 0.
Index classical_d_next(const FeatureMap& features, double lambda_a, const std::vector<Index>& labeled);

/// Uniform draw among unlabeled indices.
Index random_next(Index n, const std::vector<Index>& labeled, std::mt19937_64& rng);

/// Per-coordinate min-max rescaling onto [0, 1]^d; constant coordinates map to 0.5.
Matrix rescale_unit_cube(const Matrix& points);

/// The remaining strategies expect coordinates already in [0, 1]^d.

/// Farthest-point greedy: argmax over unlabeled z of the distance to the
/// nearest labeled point. With nothing labeled, the point farthest from the
/// pool centroid.
Index maximin_next(const Matrix& unit_points, const std::vector<Index>& labeled);

/// Argmin over unlabeled z of the covering radius
/// max_x min_{s in labeled + z} |x - s| over all pool points x.
Index minimax_next(const Matrix& unit_points, const std::vector<Index>& labeled);

/// Argmin over unlabeled z of the centered L2 discrepancy of labeled + z.
Index l2_discrepancy_next(const Matrix& unit_points, const std::vector<Index>& labeled);

/// Squared centered L2 discrepancy (Hickernell's closed form) of the rows of
/// `unit_points`.
double centered_l2_discrepancy(const Matrix& unit_points);

}  // namespace mdoe
