#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "mdoe/graph.hpp"
#include "mdoe/numerics.hpp"
#include "mdoe/pool.hpp"

namespace mdoe {

enum class FeatureKind { ExplicitCoordinates, EmpiricalKernelMap, Custom };

/// Feature map g over the pool, stored as an n x p matrix whose row i is
/// g(x_i)^T. The empirical kernel map sends x_i to column i of the Gram
/// matrix, so p = n.
class FeatureMap {
 public:
  static FeatureMap explicit_coordinates(const Matrix& points);
  static FeatureMap empirical_kernel_map(const Matrix& gram);
  static FeatureMap from_matrix(Matrix rows);

  [[nodiscard]] FeatureKind kind() const noexcept { return kind_; }
  [[nodiscard]] Eigen::Index p() const noexcept { return rows_.cols(); }
  [[nodiscard]] Index n() const noexcept { return static_cast<Index>(rows_.rows()); }
  [[nodiscard]] Vector feature(Index i) const { return rows_.row(static_cast<Eigen::Index>(i)).transpose(); }
  [[nodiscard]] const Matrix& matrix() const noexcept { return rows_; }

 private:
  FeatureMap(FeatureKind kind, Matrix rows) : kind_(kind), rows_(std::move(rows)) {}

  FeatureKind kind_;
  Matrix rows_;
};

/// Probability measure on candidate indices: distinct support points with
/// nonnegative weights summing to one.
struct ContinuousDesign {
  std::vector<Index> support;
  std::vector<double> weights;

  static ContinuousDesign uniform(Index n);
  static ContinuousDesign uniform_over(std::vector<Index> indices);
  static ContinuousDesign point_mass(Index i);
  /// Builds a design from a dense weight vector, keeping strictly positive entries.
  static ContinuousDesign from_dense(const Vector& weights);

  [[nodiscard]] bool empty() const noexcept { return support.empty(); }
  [[nodiscard]] Vector dense(Index n) const;
  /// Throws unless weights are >= 0, sum to 1 within 1e-12 and indices are distinct and < n.
  void validate(Index n) const;
};

/// (1 - a) * first + a * second, merged on the union of supports.
ContinuousDesign mix(const ContinuousDesign& first, const ContinuousDesign& second, double a);

/// Design-independent part of the information matrix,
///   C = lambda_a I_p + lambda_i X^T L X.
class Regularizer {
 public:
  /// Wraps an arbitrary SPD matrix; `lambda_a` records the ambient ridge part
  /// when known (0 otherwise).
  explicit Regularizer(Matrix c, double lambda_a = 0.0);

  [[nodiscard]] const SpdMatrix& matrix() const noexcept { return c_; }
  [[nodiscard]] const Matrix& values() const noexcept { return c_.values(); }
  [[nodiscard]] Eigen::Index p() const noexcept { return c_.dim(); }
  [[nodiscard]] double lambda_a() const noexcept { return lambda_a_; }

 private:
  SpdMatrix c_;
  double lambda_a_;
};

/// X^T L X, the manifold smoothness part of C. Cached by callers that sweep lambda_i.
Matrix manifold_penalty(const FeatureMap& features, const LaplacianMatrix& laplacian);

Regularizer regularizer(const FeatureMap& features, const LaplacianMatrix& laplacian, double lambda_a,
                        double lambda_i);
/// Same, from a precomputed X^T L X.
Regularizer regularizer_from_penalty(const Matrix& penalty, double lambda_a, double lambda_i);

/// sum_i q_i g(z_i) g(z_i)^T + C, without the SPD check.
Matrix information_values(const ContinuousDesign& design, const FeatureMap& features, const Matrix& c);
SpdMatrix information_matrix(const ContinuousDesign& design, const FeatureMap& features, const Regularizer& c);

/// d(z, e) = g(z)^T M^{-1} g(z), with the noise variance fixed to 1.
double pred_variance(Index z, const SpdMatrix& information, const FeatureMap& features);
/// d(z, e) for every candidate.
Vector pred_variances(const SpdMatrix& information, const FeatureMap& features);

/// Tr(M^{-1} C).
double trace_inverse_product(const SpdMatrix& information, const Regularizer& c);

struct GapReport {
  double max_variance = 0.0;
  Index argmax = 0;
  double lower_bound = 0.0;  // p - Tr(M^{-1} C)
  double gap = 0.0;          // max_variance - lower_bound
};

/// max_z d(z, e) - (p - Tr(M^{-1} C)). Zero exactly at the D/G-optimal design.
GapReport equivalence_gap(const SpdMatrix& information, const FeatureMap& features, const Regularizer& c);
GapReport equivalence_gap(const ContinuousDesign& design, const FeatureMap& features, const Regularizer& c);

/// tau / (p (p + tau - 1)) with tau = d_max - (p - trace_mc). Throws
/// AlreadyOptimal when tau <= 0. For p = 1 the bound is 1 and is clamped to
/// 1 - 1e-9 so the previous design keeps some mass.
double step_size_bound(double d_max, Eigen::Index p, double trace_mc);

enum class StepRule { PaperBound, LineSearch };
enum class InitialDesign { Uniform, Empty, Indices };

StepRule parse_step_rule(std::string_view name);
InitialDesign parse_initial_design(std::string_view name);
std::string_view to_string(StepRule rule) noexcept;
std::string_view to_string(InitialDesign init) noexcept;

struct ContinuousOptions {
  double tol = 1e-6;
  int max_iter = 5000;
  StepRule step_rule = StepRule::PaperBound;
  /// Also allow steps that move mass off the lowest-variance support point.
  /// Without them the iteration is the plain add-only scheme, whose gap
  /// decays only like 1/k.
  bool away_steps = true;
  InitialDesign init = InitialDesign::Uniform;
  std::vector<Index> init_indices;
  double prune_threshold = 1e-10;
  double line_search_tol = 1e-10;
};

struct DesignState {
  ContinuousDesign design;
  Matrix information;
  double logdet = 0.0;
  double gap = 0.0;
  int iterations = 0;
  bool converged = false;
  int forward_steps = 0;
  int away_steps = 0;
  /// Per-iteration values, including the initial design.
  std::vector<double> logdet_trace;
  std::vector<double> gap_trace;
};

/// Fedorov-Wynn style search for the D/G-optimal continuous design:
/// move mass toward argmax_z d(z, e_k) with the chosen step rule until the
/// equivalence gap drops to `tol`. Running out of iterations is reported
/// through `converged == false`, not by throwing.
DesignState odoem_continuous(const FeatureMap& features, const Regularizer& c, const ContinuousOptions& options = {});

struct DiscreteResult {
  std::vector<Index> order;
  /// log|M_k|, starting with log|C| before the first pick.
  std::vector<double> logdet_trace;
  /// 1 + g^T M_k^{-1} g for each pick (determinant ratio, > 1).
  std::vector<double> det_ratios;
};

/// Greedy sequential selection: at each step take the unlabeled candidate of
/// largest g^T M^{-1} g and add g g^T to M with unit weight. `already` seeds
/// M with previously labeled indices, which are never picked again.
DiscreteResult odoem_discrete(const FeatureMap& features, const Regularizer& c, Index budget,
                              const std::vector<Index>& already = {});

/// Single greedy pick with M = sum_{labeled} g g^T + C rebuilt from scratch.
Index discrete_next(const FeatureMap& features, const Regularizer& c, const std::vector<Index>& labeled);

/// log|sum_{labeled} g g^T + C|.
double discrete_logdet(const FeatureMap& features, const Regularizer& c, const std::vector<Index>& labeled);

/// Both sides of the one-point mixing determinant formula
///   |(1-a) M + a (g g^T + C)| vs (1-a)^p |M| [1 + a/(1-a) (d + Tr(M^{-1} C))]
/// in log form. The formula is exact when C = 0.
struct MixingIdentityCheck {
  double exact_logdet = 0.0;
  double formula_logdet = 0.0;
  double relative_discrepancy = 0.0;  // |exp(formula - exact) - 1|
};

MixingIdentityCheck mixing_identity_check(const SpdMatrix& information, const Vector& g, const Matrix& c,
                                          double a);

struct MixingIdentityReport {
  int trials = 0;
  double max_discrepancy_general = 0.0;
  double mean_discrepancy_general = 0.0;
  double max_discrepancy_rank_one = 0.0;
};

/// Runs `trials` random instances twice: with a random SPD regularizer and
/// with C = 0 (pure rank-one update).
MixingIdentityReport mixing_identity_report(int trials, std::uint64_t seed);

}  // namespace mdoe
