#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "mdoe/baselines.hpp"
#include "mdoe/datasets.hpp"
#include "mdoe/design.hpp"
#include "mdoe/graph.hpp"
#include "mdoe/kernels.hpp"
#include "mdoe/pool.hpp"

namespace mdoe {

/// -ln(k / n) for 1 <= k <= n; OutOfRange otherwise.
double lambda_i_schedule(Index k, Index n);

struct LambdaSchedule {
  enum class Kind { NegLogFraction, Constant };
  Kind kind = Kind::NegLogFraction;
  double constant = 0.0;

  [[nodiscard]] double at(Index k, Index n) const;
  static LambdaSchedule neg_log_fraction() { return {}; }
  static LambdaSchedule fixed(double value) { return {Kind::Constant, value}; }
};

/// Coordinates and labels of a benchmark dataset. Labels are only read by
/// the harness when a point is revealed and when scoring.
struct ExperimentData {
  Matrix points;
  Vector labels;
  std::string name;

  static ExperimentData from_manifold(const ManifoldDataset& data);
  static ExperimentData from_images(const ImageDataset& data);
};

/// Everything about a dataset that strategies may look at: coordinates,
/// Gram matrix, graph Laplacian, feature map and the cached penalty X^T L X.
/// Deliberately holds no labels.
struct PreparedPool {
  CandidatePool pool;
  FeatureMap features;
  Matrix penalty;      // X^T L X
  Matrix unit_points;  // coordinates rescaled to [0, 1]^d for space-filling designs

  static PreparedPool prepare(const Matrix& points, const KernelSpec& kernel, const GraphOptions& graph,
                              FeatureKind feature_kind = FeatureKind::EmpiricalKernelMap);
};

struct ExperimentConfig {
  StrategySpec strategy;
  double lambda_a = 0.01;
  LambdaSchedule schedule;
  Index budget = 100;
  /// Compute log|M| and the equivalence gap after every pick.
  bool track_design_metrics = true;

  void validate(Index n) const;
};

struct CurveRecord {
  Index k = 0;
  Index index = 0;
  double lambda_i = 0.0;
  double mse = 0.0;
  double logdet = 0.0;
  double gap = 0.0;
};

struct LearningCurve {
  std::string label;
  std::vector<CurveRecord> records;

  [[nodiscard]] double area_under_mse() const;
  [[nodiscard]] double final_mse() const;
  [[nodiscard]] std::vector<Index> chosen() const;
};

/// Next index proposed by `config.strategy` for step k (1-based). Sees only
/// the prepared pool and the labeled indices, never label values.
Index propose_next(const ExperimentConfig& config, const PreparedPool& prepared, const std::vector<Index>& labeled,
                   Index k, std::mt19937_64& rng);

/// Sequential protocol: propose, reveal, refit, score MSE over all n points.
/// ODOEM refits with LapRLS at lambda_i(k); every other strategy refits
/// kernel ridge (lambda_i = 0).
LearningCurve run_experiment(const ExperimentConfig& config, const PreparedPool& prepared, const Vector& labels);

/// Mean over all n points of (y_i - f(x_i))^2 for the LapRLS fit on `labeled`.
double fit_mse(const PreparedPool& prepared, const Vector& labels, const std::vector<Index>& labeled, double lambda_a,
               double lambda_i);

struct ComparisonEntry {
  std::string label;
  std::vector<LearningCurve> runs;  // one per seed
  LearningCurve mean;
};

struct ComparisonTable {
  std::vector<ComparisonEntry> entries;

  [[nodiscard]] Index rows() const;
};

/// Element-wise mean of MSE / logdet / gap across runs; index column is
/// kept only when every run agrees.
LearningCurve mean_curve(const std::vector<LearningCurve>& runs, const std::string& label);

/// Runs every config for every seed and aggregates per config. `jobs` > 1
/// spreads (config, seed) pairs across threads; results do not depend on it.
/// Strategies without randomness run once and the curve is shared by all seeds.
ComparisonTable compare(const std::vector<ExperimentConfig>& configs, const PreparedPool& prepared,
                        const Vector& labels, const std::vector<std::uint64_t>& seeds = {1}, unsigned jobs = 1);

void write_curve_csv(std::ostream& out, const LearningCurve& curve, const std::vector<std::string>& comments = {});
LearningCurve read_curve_csv(std::istream& in);
/// Columns k, then one mean-MSE column per entry; summary rows as comments.
void write_table_csv(std::ostream& out, const ComparisonTable& table, const std::vector<std::string>& comments = {});

}  // namespace mdoe
