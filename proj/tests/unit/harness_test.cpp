#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "mdoe/error.hpp"
#include "mdoe/harness.hpp"
#include "mdoe/laprls.hpp"
#include "oracles.hpp"

namespace mdoe {
namespace {

struct SmallTorus {
  ExperimentData data;
  PreparedPool prepared;
};

const SmallTorus& small_torus() {
  static const SmallTorus t = [] {
    GenerateOptions opt;
    opt.n = 64;
    const auto data = ExperimentData::from_manifold(generate(opt));
    return SmallTorus{data, PreparedPool::prepare(data.points, KernelSpec::rbf(1.0), GraphOptions{})};
  }();
  return t;
}

ExperimentConfig config_for(StrategyKind kind, Index budget) {
  ExperimentConfig cfg;
  cfg.strategy.kind = kind;
  if (kind == StrategyKind::Random) cfg.strategy.seed = 7;
  cfg.budget = budget;
  return cfg;
}

TEST(Schedule, Values) {
  EXPECT_EQ(lambda_i_schedule(400, 400), 0.0);
  EXPECT_NEAR(lambda_i_schedule(1, 400), std::log(400.0), 1e-14);
  EXPECT_NEAR(lambda_i_schedule(36788, 100000), 1.0, 1e-5);
  for (Index k = 1; k < 400; ++k) EXPECT_GT(lambda_i_schedule(k, 400), lambda_i_schedule(k + 1, 400));
  EXPECT_THROW((void)lambda_i_schedule(0, 10), Error);
  EXPECT_THROW((void)lambda_i_schedule(11, 10), Error);
  EXPECT_EQ(LambdaSchedule::fixed(0.4).at(3, 10), 0.4);
}

TEST(RunExperiment, EmptyBudget) {
  const auto& t = small_torus();
  EXPECT_TRUE(run_experiment(config_for(StrategyKind::Odoem, 0), t.prepared, t.data.labels).records.empty());
}

TEST(RunExperiment, RecordsAreConsistent) {
  const auto& t = small_torus();
  for (const auto kind : {StrategyKind::Odoem, StrategyKind::ClassicalD, StrategyKind::Random,
                          StrategyKind::UniformL2Discrepancy, StrategyKind::UniformMinimax,
                          StrategyKind::UniformMaximin}) {
    const auto curve = run_experiment(config_for(kind, 12), t.prepared, t.data.labels);
    ASSERT_EQ(curve.records.size(), 12u) << to_string(kind);
    const auto chosen = curve.chosen();
    EXPECT_EQ(std::set<Index>(chosen.begin(), chosen.end()).size(), 12u);
    for (std::size_t i = 0; i < 12; ++i) {
      const auto& r = curve.records[i];
      EXPECT_EQ(r.k, i + 1);
      EXPECT_EQ(r.lambda_i, lambda_i_schedule(i + 1, 64));
      // Recompute the MSE from scratch with the same fit.
      const std::vector<Index> labeled(chosen.begin(), chosen.begin() + static_cast<std::ptrdiff_t>(i + 1));
      const double fit_li = kind == StrategyKind::Odoem ? r.lambda_i : 0.0;
      EXPECT_EQ(r.mse, fit_mse(t.prepared, t.data.labels, labeled, 0.01, fit_li));
    }
  }
}

TEST(RunExperiment, MseIsMeanOverAllPoints) {
  const auto& t = small_torus();
  const std::vector<Index> labeled{0, 9, 30};
  LabeledSet set{labeled, Vector(3)};
  for (int i = 0; i < 3; ++i) set.labels[i] = t.data.labels[static_cast<Eigen::Index>(labeled[i])];
  const auto model = fit_coefficients(t.prepared.pool, set, 0.01, 0.5);
  double acc = 0.0;
  for (Eigen::Index i = 0; i < 64; ++i) {
    const double e = t.data.labels[i] - predict(model, t.data.points.row(i).transpose());
    acc += e * e;
  }
  EXPECT_NEAR(fit_mse(t.prepared, t.data.labels, labeled, 0.01, 0.5), acc / 64, 1e-10);
}

TEST(RunExperiment, Deterministic) {
  const auto& t = small_torus();
  for (const auto kind : {StrategyKind::Odoem, StrategyKind::Random}) {
    const auto a = run_experiment(config_for(kind, 10), t.prepared, t.data.labels);
    const auto b = run_experiment(config_for(kind, 10), t.prepared, t.data.labels);
    for (std::size_t i = 0; i < 10; ++i) {
      EXPECT_EQ(a.records[i].index, b.records[i].index);
      EXPECT_EQ(a.records[i].mse, b.records[i].mse);
      EXPECT_EQ(a.records[i].logdet, b.records[i].logdet);
    }
  }
}

TEST(RunExperiment, ProposalsIgnoreLabelValues) {
  const auto& t = small_torus();
  const Vector scrambled = Vector::Constant(64, 5.0) - t.data.labels;
  for (const auto kind : {StrategyKind::Odoem, StrategyKind::ClassicalD, StrategyKind::UniformMaximin}) {
    const auto a = run_experiment(config_for(kind, 8), t.prepared, t.data.labels);
    const auto b = run_experiment(config_for(kind, 8), t.prepared, scrambled);
    EXPECT_EQ(a.chosen(), b.chosen());
  }
}

TEST(RunExperiment, FullBudgetEndsWithPlainKernelRidge) {
  GenerateOptions opt;
  opt.n = 16;
  const auto data = ExperimentData::from_manifold(generate(opt));
  const auto prepared = PreparedPool::prepare(data.points, KernelSpec::rbf(1.0), GraphOptions{3});
  const auto curve = run_experiment(config_for(StrategyKind::Odoem, 16), prepared, data.labels);
  EXPECT_EQ(curve.records.back().lambda_i, 0.0);
  std::vector<Index> all = curve.chosen();
  EXPECT_EQ(curve.records.back().mse, fit_mse(prepared, data.labels, all, 0.01, 0.0));
}

TEST(RunExperiment, BudgetLargerThanPool) {
  const auto& t = small_torus();
  EXPECT_THROW((void)run_experiment(config_for(StrategyKind::Odoem, 65), t.prepared, t.data.labels), Error);
}

TEST(Compare, SingleConfigMatchesRun) {
  const auto& t = small_torus();
  const auto cfg = config_for(StrategyKind::ClassicalD, 6);
  const auto table = compare({cfg}, t.prepared, t.data.labels);
  const auto curve = run_experiment(cfg, t.prepared, t.data.labels);
  ASSERT_EQ(table.entries.size(), 1u);
  ASSERT_EQ(table.rows(), 6u);
  for (std::size_t i = 0; i < 6; ++i) {
    EXPECT_EQ(table.entries[0].mean.records[i].mse, curve.records[i].mse);
    EXPECT_EQ(table.entries[0].mean.records[i].index, curve.records[i].index);
  }
}

TEST(Compare, IdenticalConfigsGiveIdenticalColumnsAndJobsDoNotMatter) {
  const auto& t = small_torus();
  const auto cfg = config_for(StrategyKind::Random, 5);
  const std::vector<std::uint64_t> seeds{1, 2, 3};
  const auto serial = compare({cfg, cfg}, t.prepared, t.data.labels, seeds, 1);
  const auto parallel = compare({cfg, cfg}, t.prepared, t.data.labels, seeds, 4);
  for (std::size_t i = 0; i < 5; ++i) {
    EXPECT_EQ(serial.entries[0].mean.records[i].mse, serial.entries[1].mean.records[i].mse);
    EXPECT_EQ(serial.entries[0].mean.records[i].mse, parallel.entries[0].mean.records[i].mse);
  }
  // Seeds actually differ across runs.
  EXPECT_NE(serial.entries[0].runs[0].chosen(), serial.entries[0].runs[1].chosen());
}

TEST(CurveCsv, RoundTrip) {
  const auto& t = small_torus();
  const auto curve = run_experiment(config_for(StrategyKind::Odoem, 4), t.prepared, t.data.labels);
  std::stringstream ss;
  write_curve_csv(ss, curve, {"seed = 1"});
  const auto back = read_curve_csv(ss);
  EXPECT_EQ(back.label, "odoem");
  ASSERT_EQ(back.records.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(back.records[i].index, curve.records[i].index);
    EXPECT_EQ(back.records[i].mse, curve.records[i].mse);
    EXPECT_EQ(back.records[i].gap, curve.records[i].gap);
  }
  std::stringstream bad("k,index\n");
  EXPECT_THROW((void)read_curve_csv(bad), Error);
}

TEST(TableCsv, HasOneColumnPerEntry) {
  const auto& t = small_torus();
  const auto table = compare({config_for(StrategyKind::Odoem, 3), config_for(StrategyKind::UniformMaximin, 3)},
                             t.prepared, t.data.labels);
  std::stringstream ss;
  write_table_csv(ss, table);
  std::string header;
  std::getline(ss, header);
  EXPECT_EQ(header, "k,odoem,uniform-maximin");
  EXPECT_NE(ss.str().find("# summary strategy=odoem runs=1"), std::string::npos);
}

}  // namespace
}  // namespace mdoe
