// mdoe: generate datasets, compute optimal designs, run sequential
// benchmarks and summarise their output.
//
// Exit codes: 0 success (and, for continuous designs, converged),
// 1 usage error, 2 numerical failure, 3 I/O failure.

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mdoe/datasets.hpp"
#include "mdoe/design.hpp"
#include "mdoe/design_io.hpp"
#include "mdoe/error.hpp"
#include "mdoe/harness.hpp"

namespace fs = std::filesystem;
using namespace mdoe;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitIo = 3;

struct PoolFlags {
  std::string data;
  std::string images;
  std::string kernel = "rbf";
  double range = 0.01;
  std::string rbf_convention = "lengthscale";
  int knn_k = 7;
  std::string weighting = "binary";
  double heat_t = 1.0;
  double lambda_a = 0.01;
  std::string features = "kernel";
};

void add_pool_flags(CLI::App* sub, PoolFlags& f) {
  auto* data = sub->add_option("--data", f.data, "Manifold dataset CSV (x1,x2,x3,u,v,y)");
  auto* images = sub->add_option("--images", f.images, "Image dataset CSV (p0..p1023,angle)");
  data->excludes(images);
  sub->add_option("--kernel", f.kernel, "rbf or linear")->capture_default_str();
  sub->add_option("--range", f.range, "RBF range (lengthscale or gamma)")->capture_default_str();
  sub->add_option("--rbf-convention", f.rbf_convention, "lengthscale: exp(-d^2/(2 r^2)); gamma: exp(-r d^2)")
      ->capture_default_str();
  sub->add_option("--knn-k", f.knn_k, "Neighbours per point in the graph")->capture_default_str();
  sub->add_option("--weighting", f.weighting, "Edge weights: binary or heat")->capture_default_str();
  sub->add_option("--heat-t", f.heat_t, "Heat-kernel width for --weighting heat")->capture_default_str();
  sub->add_option("--lambda-a", f.lambda_a, "Ambient ridge weight")->capture_default_str();
  sub->add_option("--features", f.features, "kernel (empirical kernel map) or coordinates")->capture_default_str();
}

ExperimentData load_input(const PoolFlags& f) {
  if (!f.images.empty()) return ExperimentData::from_images(load_images(f.images));
  if (!f.data.empty()) return ExperimentData::from_manifold(load_manifold_csv(f.data));
  throw Error(ErrorCode::InvalidArgument, "one of --data or --images is required");
}

KernelSpec kernel_from(const PoolFlags& f) {
  const KernelKind kind = parse_kernel_kind(f.kernel);
  if (kind == KernelKind::Linear) return KernelSpec::linear();
  return KernelSpec::rbf(f.range, parse_rbf_convention(f.rbf_convention));
}

PreparedPool prepare_from(const PoolFlags& f, const ExperimentData& data) {
  GraphOptions graph;
  graph.k = f.knn_k;
  graph.weighting = parse_edge_weighting(f.weighting);
  graph.heat_t = f.heat_t;
  FeatureKind features;
  if (f.features == "kernel") {
    features = FeatureKind::EmpiricalKernelMap;
  } else if (f.features == "coordinates") {
    features = FeatureKind::ExplicitCoordinates;
  } else {
    throw Error(ErrorCode::InvalidArgument, "unknown feature map '" + f.features + "' (kernel|coordinates)");
  }
  return PreparedPool::prepare(data.points, kernel_from(f), graph, features);
}

// Every output carries the resolved flags so a run can be repeated from its file.
std::vector<std::string> provenance(const CLI::App* sub) {
  std::vector<std::string> lines{"mdoe " + sub->get_name()};
  std::istringstream cfg(sub->config_to_str(true, false));
  for (std::string line; std::getline(cfg, line);) {
    if (!line.empty() && line[0] != '[') lines.push_back(line);
  }
  return lines;
}

std::ofstream open_output(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path);
  if (!out) throw Error(ErrorCode::Io, "cannot write " + path.string());
  return out;
}

void check_written(std::ostream& out, const std::string& what) {
  if (!out) throw Error(ErrorCode::Io, "write failed for " + what);
}

// --- generate ---------------------------------------------------------------

struct GenerateFlags {
  std::string kind = "torus";
  long n = 400;
  double noise_var = 0.0;
  std::uint64_t seed = 1;
  std::string layout = "grid";
  bool images = false;
  int count = 72;
  double step = 5.0;
  std::string output;
};

int cmd_generate(const GenerateFlags& f, const CLI::App* sub) {
  std::ofstream file;
  if (!f.output.empty()) file = open_output(f.output);
  std::ostream& out = f.output.empty() ? std::cout : file;
  const auto header = provenance(sub);
  if (f.images) {
    write_images(out, rotating_pattern_images(f.count, f.step, f.seed), header);
  } else {
    GenerateOptions opt;
    opt.kind = parse_manifold_kind(f.kind);
    opt.n = f.n;
    opt.noise_variance = f.noise_var;
    opt.seed = f.seed;
    opt.layout = parse_layout(f.layout);
    write_manifold_csv(out, generate(opt), header);
  }
  check_written(out, f.output.empty() ? "stdout" : f.output);
  return kExitOk;
}

// --- design -----------------------------------------------------------------

struct DesignFlags {
  PoolFlags pool;
  std::string mode = "continuous";
  long budget = 100;
  double lambda_i = 1.0;
  std::string step_rule = "paper-bound";
  std::string init = "uniform";
  std::vector<Index> init_indices;
  bool no_away_steps = false;
  double tol = 1e-6;
  int max_iter = 5000;
  std::string output;
};

int cmd_design(const DesignFlags& f, const CLI::App* sub) {
  if (f.mode != "continuous" && f.mode != "discrete") {
    throw Error(ErrorCode::InvalidArgument, "unknown mode '" + f.mode + "' (continuous|discrete)");
  }
  const ExperimentData data = load_input(f.pool);
  std::ofstream file;
  if (!f.output.empty()) file = open_output(f.output);
  std::ostream& out = f.output.empty() ? std::cout : file;

  const PreparedPool prepared = prepare_from(f.pool, data);
  const Regularizer c = regularizer_from_penalty(prepared.penalty, f.pool.lambda_a, f.lambda_i);
  const auto header = provenance(sub);

  if (f.mode == "discrete") {
    if (f.budget < 0) throw Error(ErrorCode::InvalidArgument, "budget must be nonnegative");
    const DiscreteResult r = odoem_discrete(prepared.features, c, static_cast<Index>(f.budget));
    for (const auto& h : header) out << "# " << h << '\n';
    out << "k,index,logdet,det_ratio\n" << std::setprecision(17);
    for (std::size_t k = 0; k < r.order.size(); ++k) {
      out << k + 1 << ',' << r.order[k] << ',' << r.logdet_trace[k + 1] << ',' << r.det_ratios[k] << '\n';
    }
    check_written(out, f.output.empty() ? "stdout" : f.output);
    if (!f.output.empty()) {
      std::cout << "picked " << r.order.size() << " points, final logdet " << std::setprecision(10)
                << r.logdet_trace.back() << '\n';
    }
    return kExitOk;
  }

  ContinuousOptions opt;
  opt.tol = f.tol;
  opt.max_iter = f.max_iter;
  opt.step_rule = parse_step_rule(f.step_rule);
  opt.away_steps = !f.no_away_steps;
  opt.init = parse_initial_design(f.init);
  opt.init_indices = f.init_indices;
  const DesignState s = odoem_continuous(prepared.features, c, opt);

  DesignRecord rec{prepared.features.p(), s.logdet, s.gap, s.iterations, s.design};
  write_design(out, rec, header);
  check_written(out, f.output.empty() ? "stdout" : f.output);
  if (!f.output.empty()) {
    std::cout << std::setprecision(10) << "p " << rec.p << "\nlogdet " << rec.logdet << "\ngap " << rec.gap
              << "\niterations " << rec.iterations << "\nsupport " << rec.design.support.size() << '\n';
  }
  if (!s.converged) {
    std::cerr << "mdoe: gap " << s.gap << " above tolerance " << f.tol << " after " << s.iterations
              << " iterations\n";
    return kExitNumerical;
  }
  return kExitOk;
}

// --- benchmark --------------------------------------------------------------

struct BenchmarkFlags {
  PoolFlags pool;
  std::vector<std::string> strategies{"odoem", "classical-d", "random"};
  std::string seeds = "1";
  unsigned jobs = 1;
  long budget = 100;
  std::string schedule = "neglog";
  bool no_design_metrics = false;
  std::string out_dir = ".";
};

// "3", "1..10" or "1,4,9".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  try {
    if (const auto dots = text.find(".."); dots != std::string::npos) {
      const auto lo = std::stoull(text.substr(0, dots));
      const auto hi = std::stoull(text.substr(dots + 2));
      if (hi < lo) throw Error(ErrorCode::InvalidArgument, "empty seed range '" + text + "'");
      for (auto s = lo; s <= hi; ++s) out.push_back(s);
    } else {
      std::istringstream in(text);
      for (std::string tok; std::getline(in, tok, ',');) out.push_back(std::stoull(tok));
    }
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "bad --seeds '" + text + "' (N, A..B or A,B,C)");
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "no seeds given");
  return out;
}

LambdaSchedule parse_schedule(const std::string& text) {
  if (text == "neglog") return LambdaSchedule::neg_log_fraction();
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used == text.size()) return LambdaSchedule::fixed(v);
  } catch (const std::logic_error&) {
  }
  throw Error(ErrorCode::InvalidArgument, "bad --lambda-i-schedule '" + text + "' (neglog or a constant)");
}

int cmd_benchmark(const BenchmarkFlags& f, const CLI::App* sub) {
  const auto seeds = parse_seeds(f.seeds);
  const LambdaSchedule schedule = parse_schedule(f.schedule);
  std::vector<ExperimentConfig> configs;
  for (const auto& name : f.strategies) {
    ExperimentConfig cfg;
    cfg.strategy.kind = parse_strategy(name);
    if (cfg.strategy.kind == StrategyKind::Random) cfg.strategy.seed = seeds.front();
    cfg.lambda_a = f.pool.lambda_a;
    cfg.schedule = schedule;
    if (f.budget < 0) throw Error(ErrorCode::InvalidArgument, "budget must be nonnegative");
    cfg.budget = static_cast<Index>(f.budget);
    cfg.track_design_metrics = !f.no_design_metrics;
    configs.push_back(cfg);
  }
  if (configs.empty()) throw Error(ErrorCode::InvalidArgument, "no strategies given");

  const ExperimentData data = load_input(f.pool);
  std::error_code ec;
  fs::create_directories(f.out_dir, ec);
  if (ec || !fs::is_directory(f.out_dir)) throw Error(ErrorCode::Io, "cannot create output directory " + f.out_dir);

  const PreparedPool prepared = prepare_from(f.pool, data);
  for (const auto& cfg : configs) cfg.validate(prepared.pool.size());
  const ComparisonTable table = compare(configs, prepared, data.labels, seeds, f.jobs);

  auto header = provenance(sub);
  header.push_back("dataset = " + data.name + " n = " + std::to_string(prepared.pool.size()));
  const fs::path dir(f.out_dir);
  for (const auto& entry : table.entries) {
    {
      auto out = open_output(dir / (entry.label + ".csv"));
      auto h = header;
      if (entry.runs.size() > 1) h.push_back("mean of " + std::to_string(entry.runs.size()) + " runs");
      write_curve_csv(out, entry.mean, h);
      check_written(out, entry.label + ".csv");
    }
    if (entry.runs.size() > 1) {
      for (std::size_t s = 0; s < entry.runs.size(); ++s) {
        const std::string name = entry.label + ".seed" + std::to_string(seeds[s]) + ".csv";
        auto out = open_output(dir / name);
        auto h = header;
        h.push_back("seed = " + std::to_string(seeds[s]));
        write_curve_csv(out, entry.runs[s], h);
        check_written(out, name);
      }
    }
  }
  auto out = open_output(dir / "table.csv");
  write_table_csv(out, table, header);
  check_written(out, "table.csv");

  std::cout << std::left << std::setw(18) << "strategy" << std::setw(8) << "runs" << std::setw(16) << "auc"
            << "final_mse\n";
  for (const auto& e : table.entries) {
    std::cout << std::setw(18) << e.label << std::setw(8) << e.runs.size() << std::setw(16)
              << std::setprecision(6) << e.mean.area_under_mse() << e.mean.final_mse() << '\n';
  }
  return kExitOk;
}

// --- report -----------------------------------------------------------------

struct ReportFlags {
  std::vector<std::string> files;
  bool identity_check = false;
  int trials = 100;
  std::uint64_t seed = 1;
};

struct Column {
  std::string label;
  std::vector<double> mse;
};

// Reads either a single learning curve or a comparison table.
std::vector<Column> read_columns(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path);
  std::string first;
  std::string line;
  std::vector<std::string> lines;
  while (std::getline(in, line)) lines.push_back(line);
  for (const auto& l : lines) {
    if (!l.empty() && l[0] != '#') {
      first = l;
      break;
    }
  }
  std::istringstream all;
  if (first.rfind("k,index,", 0) == 0) {
    std::ostringstream joined;
    for (const auto& l : lines) joined << l << '\n';
    std::istringstream src(joined.str());
    const LearningCurve curve = read_curve_csv(src);
    Column c{curve.label.empty() ? fs::path(path).stem().string() : curve.label, {}};
    for (const auto& r : curve.records) c.mse.push_back(r.mse);
    return {c};
  }
  if (first.rfind("k,", 0) != 0) throw Error(ErrorCode::ParseError, path + ": not a curve or table CSV");

  std::vector<Column> cols;
  bool header = false;
  int line_no = 0;
  for (const auto& l : lines) {
    ++line_no;
    if (l.empty() || l[0] == '#') continue;
    std::istringstream fields(l);
    std::vector<std::string> cells;
    for (std::string cell; std::getline(fields, cell, ',');) cells.push_back(cell);
    if (!header) {
      for (std::size_t i = 1; i < cells.size(); ++i) cols.push_back({cells[i], {}});
      header = true;
      continue;
    }
    for (std::size_t i = 1; i < cells.size() && i <= cols.size(); ++i) {
      if (cells[i].empty()) continue;
      try {
        cols[i - 1].mse.push_back(std::stod(cells[i]));
      } catch (const std::logic_error&) {
        throw Error(ErrorCode::ParseError, path + ": line " + std::to_string(line_no) + ": bad number");
      }
    }
  }
  return cols;
}

int cmd_report(const ReportFlags& f) {
  if (f.files.empty() && !f.identity_check) {
    throw Error(ErrorCode::InvalidArgument, "nothing to report: give CSV files and/or --identity-check");
  }
  std::vector<Column> cols;
  for (const auto& path : f.files) {
    auto more = read_columns(path);
    cols.insert(cols.end(), more.begin(), more.end());
  }
  if (!cols.empty()) {
    std::vector<std::pair<double, std::size_t>> order;
    for (std::size_t i = 0; i < cols.size(); ++i) {
      double auc = 0.0;
      for (double v : cols[i].mse) auc += v;
      order.emplace_back(auc, i);
    }
    std::stable_sort(order.begin(), order.end());
    std::cout << std::left << std::setw(6) << "rank" << std::setw(18) << "strategy" << std::setw(8) << "steps"
              << std::setw(16) << "auc" << "final_mse\n";
    int rank = 1;
    for (const auto& [auc, i] : order) {
      const auto& c = cols[i];
      std::cout << std::setw(6) << rank++ << std::setw(18) << c.label << std::setw(8) << c.mse.size()
                << std::setw(16) << std::setprecision(6) << auc
                << (c.mse.empty() ? std::nan("") : c.mse.back()) << '\n';
    }
  }
  if (f.identity_check) {
    const auto r = mixing_identity_report(f.trials, f.seed);
    std::cout << std::setprecision(3) << std::scientific;
    std::cout << "# mixing determinant formula, " << r.trials << " random steps (seed " << f.seed << ")\n";
    std::cout << "rank_one_max_discrepancy " << r.max_discrepancy_rank_one << '\n';
    std::cout << "general_max_discrepancy " << r.max_discrepancy_general << '\n';
    std::cout << "general_mean_discrepancy " << r.mean_discrepancy_general << '\n';
    std::cout << std::defaultfloat;
  }
  return kExitOk;
}

int exit_code_for(const Error& e) {
  if (e.is_numerical()) return kExitNumerical;
  switch (e.code()) {
    case ErrorCode::Io:
    case ErrorCode::ParseError:
    case ErrorCode::AngleOutOfRange:
      return kExitIo;
    case ErrorCode::TooFewPoints:
    case ErrorCode::PoolExhausted:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

constexpr const char* kConfigHelp = "File of key = value lines mirroring the long flags; command-line flags win";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

// Expands `--config FILE` into `--key=value` arguments placed right after the
// subcommand, so anything given explicitly on the command line overrides it.
std::vector<std::string> with_config(const std::vector<std::string>& args) {
  std::string path;
  std::vector<std::string> rest;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  if (path.empty() || rest.empty()) return rest;

  std::vector<std::string> given;
  for (const auto& a : rest) {
    if (a.rfind("--", 0) == 0) given.push_back(a.substr(2, a.find('=') == std::string::npos ? std::string::npos : a.find('=') - 2));
    if (a == "-o") given.emplace_back("output");
  }

  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config " + path);
  std::vector<std::string> injected;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == ';') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::ParseError, path + ": line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
    if (std::find(given.begin(), given.end(), key) != given.end()) continue;
    injected.push_back("--" + key + "=" + value);
  }
  std::vector<std::string> out{rest.front()};
  out.insert(out.end(), injected.begin(), injected.end());
  out.insert(out.end(), rest.begin() + 1, rest.end());
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Optimal experimental design on manifolds"};
  app.require_subcommand(1, 1);
  std::string config_path;
  std::vector<std::string> args;
  try {
    args = with_config(std::vector<std::string>(argv + 1, argv + argc));
  } catch (const Error& e) {
    std::cerr << "mdoe: " << e.what() << '\n';
    return exit_code_for(e);
  }

  GenerateFlags gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic manifold or rotating-image dataset");
  g->add_option("--config", config_path, kConfigHelp);
  g->add_option("--kind", gen.kind, "torus, mobius, klein8 or klein-bottle")->capture_default_str();
  g->add_option("--n", gen.n, "Number of points")->capture_default_str();
  g->add_option("--noise-var", gen.noise_var, "Noise variance per coordinate")->capture_default_str();
  g->add_option("--seed", gen.seed, "Random seed")->capture_default_str();
  g->add_option("--layout", gen.layout, "grid (n must be a square) or random")->capture_default_str();
  g->add_flag("--images", gen.images, "Write the rotating-pattern image set instead");
  g->add_option("--count", gen.count, "Images to render with --images")->capture_default_str();
  g->add_option("--step", gen.step, "Degrees between poses with --images")->capture_default_str();
  g->add_option("-o,--output", gen.output, "Output file (default stdout)");

  DesignFlags des;
  auto* d = app.add_subcommand("design", "Compute a D/G-optimal continuous design or a greedy discrete one");
  d->add_option("--config", config_path, kConfigHelp);
  add_pool_flags(d, des.pool);
  d->add_option("--mode", des.mode, "continuous or discrete")->capture_default_str();
  d->add_option("--budget", des.budget, "Points to pick in discrete mode")->capture_default_str();
  d->add_option("--lambda-i", des.lambda_i, "Manifold weight")->capture_default_str();
  d->add_option("--step-rule", des.step_rule, "paper-bound or line-search")->capture_default_str();
  d->add_option("--init", des.init, "uniform, empty or indices")->capture_default_str();
  d->add_option("--init-indices", des.init_indices, "Support of the initial design for --init indices")
      ->delimiter(',');
  d->add_flag("--no-away-steps", des.no_away_steps, "Only move mass toward the new point");
  d->add_option("--tol", des.tol, "Stop when the equivalence gap is below this")->capture_default_str();
  d->add_option("--max-iter", des.max_iter, "Iteration limit")->capture_default_str();
  d->add_option("-o,--output", des.output, "Output file (default stdout)");

  BenchmarkFlags bench;
  auto* b = app.add_subcommand("benchmark", "Run the sequential labeling protocol for several strategies");
  b->add_option("--config", config_path, kConfigHelp);
  add_pool_flags(b, bench.pool);
  std::string strategy_help = "Comma-separated list of:";
  for (const auto& n : strategy_names()) strategy_help += " " + n;
  b->add_option("--strategies", bench.strategies, strategy_help)->delimiter(',')->capture_default_str();
  b->add_option("--seeds", bench.seeds, "N, A..B or A,B,C")->capture_default_str();
  b->add_option("--jobs", bench.jobs, "Worker threads")->capture_default_str();
  b->add_option("--budget", bench.budget, "Points to label")->capture_default_str();
  b->add_option("--lambda-i-schedule", bench.schedule, "neglog (-ln(k/n)) or a constant")->capture_default_str();
  b->add_flag("--no-design-metrics", bench.no_design_metrics, "Skip the logdet and gap columns");
  b->add_option("--out-dir", bench.out_dir, "Directory for curve and table CSVs")->capture_default_str();

  ReportFlags rep;
  auto* r = app.add_subcommand("report", "Summarise curve/table CSVs or check the mixing determinant formula");
  r->add_option("files", rep.files, "Learning-curve or comparison-table CSVs");
  r->add_flag("--identity-check", rep.identity_check, "Report the mixing determinant formula discrepancy");
  r->add_option("--trials", rep.trials, "Random steps for --identity-check")->capture_default_str();
  r->add_option("--seed", rep.seed, "Seed for --identity-check")->capture_default_str();

  try {
    std::reverse(args.begin(), args.end());
    app.parse(args);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (g->parsed()) return cmd_generate(gen, g);
    if (d->parsed()) return cmd_design(des, d);
    if (b->parsed()) return cmd_benchmark(bench, b);
    if (r->parsed()) return cmd_report(rep);
  } catch (const Error& e) {
    std::cerr << "mdoe: " << e.what() << '\n';
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "mdoe: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitUsage;
}
