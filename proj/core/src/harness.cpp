#include "mdoe/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>
#include <thread>

#include "mdoe/error.hpp"
#include "mdoe/laprls.hpp"

namespace mdoe {

double lambda_i_schedule(Index k, Index n) {
  if (k < 1 || k > n) {
    throw Error(ErrorCode::OutOfRange, "schedule needs 1 <= k <= n (k=" + std::to_string(k) + ", n=" +
                                           std::to_string(n) + ")");
  }
  return -std::log(static_cast<double>(k) / static_cast<double>(n));
}

double LambdaSchedule::at(Index k, Index n) const {
  if (kind == Kind::Constant) return constant;
  return lambda_i_schedule(k, n);
}

ExperimentData ExperimentData::from_manifold(const ManifoldDataset& data) {
  return {data.points, data.labels, std::string(to_string(data.kind))};
}

ExperimentData ExperimentData::from_images(const ImageDataset& data) {
  return {data.vectors, data.angles, data.object_id};
}

PreparedPool PreparedPool::prepare(const Matrix& points, const KernelSpec& kernel, const GraphOptions& graph,
                                   FeatureKind feature_kind) {
  CandidatePool pool = CandidatePool::build(points, kernel, graph);
  FeatureMap features = feature_kind == FeatureKind::ExplicitCoordinates
                            ? FeatureMap::explicit_coordinates(points)
                            : FeatureMap::empirical_kernel_map(pool.gram);
  // With the empirical kernel map X = K, so X^T L X is the cached K L K.
  Matrix penalty = feature_kind == FeatureKind::ExplicitCoordinates ? manifold_penalty(features, pool.laplacian)
                                                                    : pool.kernel_laplacian;
  Matrix unit = rescale_unit_cube(points);
  return PreparedPool{std::move(pool), std::move(features), std::move(penalty), std::move(unit)};
}

void ExperimentConfig::validate(Index n) const {
  strategy.validate();
  if (!(lambda_a > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_a must be positive");
  if (budget > n) {
    throw Error(ErrorCode::BudgetExceedsPool,
                "budget " + std::to_string(budget) + " exceeds pool size " + std::to_string(n));
  }
  if (schedule.kind == LambdaSchedule::Kind::Constant && !(schedule.constant >= 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "constant lambda_i must be nonnegative");
  }
}

double LearningCurve::area_under_mse() const {
  double acc = 0.0;
  for (const auto& r : records) acc += r.mse;
  return acc;
}

double LearningCurve::final_mse() const {
  return records.empty() ? std::nan("") : records.back().mse;
}

std::vector<Index> LearningCurve::chosen() const {
  std::vector<Index> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(r.index);
  return out;
}

Index propose_next(const ExperimentConfig& config, const PreparedPool& prepared, const std::vector<Index>& labeled,
                   Index k, std::mt19937_64& rng) {
  const Index n = prepared.pool.size();
  switch (config.strategy.kind) {
    case StrategyKind::Odoem: {
      const Regularizer c = regularizer_from_penalty(prepared.penalty, config.lambda_a, config.schedule.at(k, n));
      return discrete_next(prepared.features, c, labeled);
    }
    case StrategyKind::ClassicalD:
      return classical_d_next(prepared.features, config.lambda_a, labeled);
    case StrategyKind::Random:
      return random_next(n, labeled, rng);
    case StrategyKind::UniformL2Discrepancy:
      return l2_discrepancy_next(prepared.unit_points, labeled);
    case StrategyKind::UniformMinimax:
      return minimax_next(prepared.unit_points, labeled);
    case StrategyKind::UniformMaximin:
      return maximin_next(prepared.unit_points, labeled);
  }
  throw Error(ErrorCode::InvalidArgument, "unhandled strategy");
}

double fit_mse(const PreparedPool& prepared, const Vector& labels, const std::vector<Index>& labeled, double lambda_a,
               double lambda_i) {
  LabeledSet set;
  set.indices = labeled;
  set.labels.resize(static_cast<Eigen::Index>(labeled.size()));
  for (std::size_t i = 0; i < labeled.size(); ++i) set.labels[static_cast<Eigen::Index>(i)] = labels[static_cast<Eigen::Index>(labeled[i])];
  const LapRlsModel model = fit_coefficients(prepared.pool, set, lambda_a, lambda_i);
  const Vector fitted = predict_pool(model, prepared.pool);
  return (labels - fitted).squaredNorm() / static_cast<double>(labels.size());
}

LearningCurve run_experiment(const ExperimentConfig& config, const PreparedPool& prepared, const Vector& labels) {
  const Index n = prepared.pool.size();
  if (static_cast<Index>(labels.size()) != n) {
    throw Error(ErrorCode::DimensionMismatch, "label vector does not match pool size");
  }
  config.validate(n);

  LearningCurve curve;
  curve.label = std::string(to_string(config.strategy.kind));
  std::mt19937_64 rng(config.strategy.seed.value_or(0));
  std::vector<Index> labeled;
  labeled.reserve(config.budget);

  for (Index k = 1; k <= config.budget; ++k) {
    const double lambda_i = config.schedule.at(k, n);
    const Index next = propose_next(config, prepared, labeled, k, rng);
    labeled.push_back(next);

    CurveRecord rec;
    rec.k = k;
    rec.index = next;
    rec.lambda_i = lambda_i;
    const double fit_lambda_i = config.strategy.kind == StrategyKind::Odoem ? lambda_i : 0.0;
    rec.mse = fit_mse(prepared, labels, labeled, config.lambda_a, fit_lambda_i);
    if (config.track_design_metrics) {
      const Regularizer c = regularizer_from_penalty(prepared.penalty, config.lambda_a, lambda_i);
      rec.logdet = discrete_logdet(prepared.features, c, labeled);
      rec.gap = equivalence_gap(ContinuousDesign::uniform_over(labeled), prepared.features, c).gap;
    } else {
      rec.logdet = std::nan("");
      rec.gap = std::nan("");
    }
    curve.records.push_back(rec);
  }
  return curve;
}

Index ComparisonTable::rows() const {
  Index out = 0;
  for (const auto& e : entries) out = std::max<Index>(out, e.mean.records.size());
  return out;
}

LearningCurve mean_curve(const std::vector<LearningCurve>& runs, const std::string& label) {
  LearningCurve out;
  out.label = label;
  if (runs.empty()) return out;
  const std::size_t len = runs.front().records.size();
  for (const auto& r : runs) {
    if (r.records.size() != len) throw Error(ErrorCode::DimensionMismatch, "runs have different lengths");
  }
  const double count = static_cast<double>(runs.size());
  for (std::size_t i = 0; i < len; ++i) {
    CurveRecord rec = runs.front().records[i];
    double mse = 0.0;
    double logdet = 0.0;
    double gap = 0.0;
    bool same_index = true;
    for (const auto& r : runs) {
      mse += r.records[i].mse;
      logdet += r.records[i].logdet;
      gap += r.records[i].gap;
      same_index = same_index && r.records[i].index == rec.index;
    }
    rec.mse = mse / count;
    rec.logdet = logdet / count;
    rec.gap = gap / count;
    if (!same_index) rec.index = static_cast<Index>(-1);
    out.records.push_back(rec);
  }
  return out;
}

ComparisonTable compare(const std::vector<ExperimentConfig>& configs, const PreparedPool& prepared,
                        const Vector& labels, const std::vector<std::uint64_t>& seeds, unsigned jobs) {
  const std::vector<std::uint64_t> seed_list = seeds.empty() ? std::vector<std::uint64_t>{1} : seeds;
  struct Task {
    std::size_t config;
    std::size_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    configs[c].validate(prepared.pool.size());
    // Only random sampling depends on the seed; everything else runs once.
    const std::size_t runs = configs[c].strategy.kind == StrategyKind::Random ? seed_list.size() : 1;
    for (std::size_t s = 0; s < runs; ++s) tasks.push_back({c, s});
  }

  std::vector<std::vector<LearningCurve>> results(configs.size(), std::vector<LearningCurve>(seed_list.size()));
  auto run_task = [&](const Task& t) {
    ExperimentConfig cfg = configs[t.config];
    if (cfg.strategy.kind == StrategyKind::Random) cfg.strategy.seed = seed_list[t.seed];
    results[t.config][t.seed] = run_experiment(cfg, prepared, labels);
  };

  const unsigned workers = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(tasks.size())));
  if (workers <= 1) {
    for (const auto& t : tasks) run_task(t);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = next++; i < tasks.size(); i = next++) run_task(tasks[i]);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& th : pool) th.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  ComparisonTable table;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    if (configs[c].strategy.kind != StrategyKind::Random) {
      for (std::size_t s = 1; s < seed_list.size(); ++s) results[c][s] = results[c][0];
    }
    ComparisonEntry entry;
    entry.label = std::string(to_string(configs[c].strategy.kind));
    entry.runs = std::move(results[c]);
    for (auto& r : entry.runs) r.label = entry.label;
    entry.mean = mean_curve(entry.runs, entry.label);
    table.entries.push_back(std::move(entry));
  }
  return table;
}

void write_curve_csv(std::ostream& out, const LearningCurve& curve, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  if (!curve.label.empty()) out << "# strategy = " << curve.label << '\n';
  out << "k,index,lambda_i,mse,logdet,gap\n";
  out << std::setprecision(17);
  for (const auto& r : curve.records) {
    out << r.k << ',';
    if (r.index == static_cast<Index>(-1)) {
      out << "NA";
    } else {
      out << r.index;
    }
    out << ',' << r.lambda_i << ',' << r.mse << ',' << r.logdet << ',' << r.gap << '\n';
  }
}

LearningCurve read_curve_csv(std::istream& in) {
  LearningCurve curve;
  std::string line;
  int line_no = 0;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      if (const auto pos = line.find("strategy = "); pos != std::string::npos) curve.label = line.substr(pos + 11);
      continue;
    }
    if (!header) {
      if (line != "k,index,lambda_i,mse,logdet,gap") {
        throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": not a learning-curve header");
      }
      header = true;
      continue;
    }
    std::istringstream fields(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(fields, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6) throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": expected 6 fields");
    try {
      CurveRecord r;
      r.k = std::stoull(cells[0]);
      r.index = cells[1] == "NA" ? static_cast<Index>(-1) : std::stoull(cells[1]);
      r.lambda_i = std::stod(cells[2]);
      r.mse = std::stod(cells[3]);
      r.logdet = std::stod(cells[4]);
      r.gap = std::stod(cells[5]);
      curve.records.push_back(r);
    } catch (const std::exception&) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(line_no) + ": bad number");
    }
  }
  if (!header) throw Error(ErrorCode::ParseError, "learning-curve file has no header");
  return curve;
}

void write_table_csv(std::ostream& out, const ComparisonTable& table, const std::vector<std::string>& comments) {
  for (const auto& c : comments) out << "# " << c << '\n';
  out << "k";
  for (const auto& e : table.entries) out << ',' << e.label;
  out << '\n' << std::setprecision(17);
  for (Index row = 0; row < table.rows(); ++row) {
    out << row + 1;
    for (const auto& e : table.entries) {
      out << ',';
      if (row < e.mean.records.size()) out << e.mean.records[row].mse;
    }
    out << '\n';
  }
  for (const auto& e : table.entries) {
    out << "# summary strategy=" << e.label << " runs=" << e.runs.size() << " auc=" << e.mean.area_under_mse()
        << " final_mse=" << e.mean.final_mse() << '\n';
  }
}

}  // namespace mdoe
