#include "mdoe/design.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <random>
#include <string>

#include "mdoe/error.hpp"

namespace mdoe {

// ---------------------------------------------------------------------------
// FeatureMap

FeatureMap FeatureMap::explicit_coordinates(const Matrix& points) {
  return FeatureMap(FeatureKind::ExplicitCoordinates, points);
}

FeatureMap FeatureMap::empirical_kernel_map(const Matrix& gram) {
  if (gram.rows() != gram.cols()) throw Error(ErrorCode::DimensionMismatch, "Gram matrix must be square");
  // Row i of K is g(x_i)^T; K is symmetric so this is also column i.
  return FeatureMap(FeatureKind::EmpiricalKernelMap, gram);
}

FeatureMap FeatureMap::from_matrix(Matrix rows) { return FeatureMap(FeatureKind::Custom, std::move(rows)); }

// ---------------------------------------------------------------------------
// ContinuousDesign

ContinuousDesign ContinuousDesign::uniform(Index n) {
  std::vector<Index> idx(n);
  std::iota(idx.begin(), idx.end(), Index{0});
  return uniform_over(std::move(idx));
}

ContinuousDesign ContinuousDesign::uniform_over(std::vector<Index> indices) {
  ContinuousDesign d;
  const double w = indices.empty() ? 0.0 : 1.0 / static_cast<double>(indices.size());
  d.weights.assign(indices.size(), w);
  d.support = std::move(indices);
  return d;
}

ContinuousDesign ContinuousDesign::point_mass(Index i) { return ContinuousDesign{{i}, {1.0}}; }

ContinuousDesign ContinuousDesign::from_dense(const Vector& weights) {
  ContinuousDesign d;
  for (Eigen::Index i = 0; i < weights.size(); ++i) {
    if (weights[i] > 0.0) {
      d.support.push_back(static_cast<Index>(i));
      d.weights.push_back(weights[i]);
    }
  }
  return d;
}

Vector ContinuousDesign::dense(Index n) const {
  Vector out = Vector::Zero(static_cast<Eigen::Index>(n));
  for (std::size_t s = 0; s < support.size(); ++s) {
    if (support[s] >= n) throw Error(ErrorCode::OutOfRange, "support index outside pool");
    out[static_cast<Eigen::Index>(support[s])] += weights[s];
  }
  return out;
}

void ContinuousDesign::validate(Index n) const {
  if (support.size() != weights.size()) {
    throw Error(ErrorCode::DimensionMismatch, "design support and weights differ in length");
  }
  validate_indices(support, n);
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidArgument, "design weights must be nonnegative");
    total += w;
  }
  if (!support.empty() && std::abs(total - 1.0) > 1e-12) {
    throw Error(ErrorCode::InvalidArgument, "design weights sum to " + std::to_string(total) + ", not 1");
  }
}

ContinuousDesign mix(const ContinuousDesign& first, const ContinuousDesign& second, double a) {
  std::map<Index, double> merged;
  for (std::size_t s = 0; s < first.support.size(); ++s) merged[first.support[s]] += (1.0 - a) * first.weights[s];
  for (std::size_t s = 0; s < second.support.size(); ++s) merged[second.support[s]] += a * second.weights[s];
  ContinuousDesign out;
  for (const auto& [idx, w] : merged) {
    out.support.push_back(idx);
    out.weights.push_back(w);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Regularizer and information matrix

Regularizer::Regularizer(Matrix c, double lambda_a) : c_(std::move(c)), lambda_a_(lambda_a) {}

Matrix manifold_penalty(const FeatureMap& features, const LaplacianMatrix& laplacian) {
  if (static_cast<Index>(laplacian.size()) != features.n()) {
    throw Error(ErrorCode::DimensionMismatch, "Laplacian has size " + std::to_string(laplacian.size()) +
                                                  " but the feature map covers " + std::to_string(features.n()) +
                                                  " points");
  }
  const Matrix& x = features.matrix();
  return symmetrize(x.transpose() * (laplacian.values * x));
}

Regularizer regularizer_from_penalty(const Matrix& penalty, double lambda_a, double lambda_i) {
  if (!(lambda_a > 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_a must be positive");
  if (!(lambda_i >= 0.0)) throw Error(ErrorCode::InvalidArgument, "lambda_i must be nonnegative");
  Matrix c = lambda_a * Matrix::Identity(penalty.rows(), penalty.cols());
  if (lambda_i > 0.0) c += lambda_i * penalty;
  return Regularizer(std::move(c), lambda_a);
}

Regularizer regularizer(const FeatureMap& features, const LaplacianMatrix& laplacian, double lambda_a,
                        double lambda_i) {
  if (lambda_i == 0.0) {
    if (static_cast<Index>(laplacian.size()) != features.n()) {
      throw Error(ErrorCode::DimensionMismatch, "Laplacian size does not match the feature map");
    }
    return regularizer_from_penalty(Matrix::Zero(features.p(), features.p()), lambda_a, lambda_i);
  }
  return regularizer_from_penalty(manifold_penalty(features, laplacian), lambda_a, lambda_i);
}

Matrix information_values(const ContinuousDesign& design, const FeatureMap& features, const Matrix& c) {
  if (c.rows() != features.p()) throw Error(ErrorCode::DimensionMismatch, "regularizer dimension != p");
  Matrix m = c;
  for (std::size_t s = 0; s < design.support.size(); ++s) {
    if (design.weights[s] == 0.0) continue;
    const auto row = features.matrix().row(static_cast<Eigen::Index>(design.support[s]));
    m.selfadjointView<Eigen::Lower>().rankUpdate(row.transpose(), design.weights[s]);
  }
  return Matrix(m.selfadjointView<Eigen::Lower>());
}

SpdMatrix information_matrix(const ContinuousDesign& design, const FeatureMap& features, const Regularizer& c) {
  design.validate(features.n());
  return SpdMatrix(information_values(design, features, c.values()));
}

double pred_variance(Index z, const SpdMatrix& information, const FeatureMap& features) {
  if (z >= features.n()) throw Error(ErrorCode::OutOfRange, "candidate index outside pool");
  return information.inverse_quadratic(features.feature(z));
}

Vector pred_variances(const SpdMatrix& information, const FeatureMap& features) {
  if (information.dim() != features.p()) throw Error(ErrorCode::DimensionMismatch, "information dim != p");
  // Solve L W = X^T; d_i = |W_i|^2.
  const Matrix w = information.factor().triangularView<Eigen::Lower>().solve(features.matrix().transpose());
  return w.colwise().squaredNorm().transpose();
}

double trace_inverse_product(const SpdMatrix& information, const Regularizer& c) {
  return information.solve(c.values()).trace();
}

namespace {

Index argmax_lowest(const Vector& v, const std::vector<char>* skip = nullptr) {
  Index best = v.size();
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (skip && (*skip)[static_cast<std::size_t>(i)]) continue;
    if (best == static_cast<Index>(v.size()) || v[i] > v[static_cast<Eigen::Index>(best)]) best = static_cast<Index>(i);
  }
  return best;
}

}  // namespace

GapReport equivalence_gap(const SpdMatrix& information, const FeatureMap& features, const Regularizer& c) {
  if (features.n() == 0) throw Error(ErrorCode::EmptyInput, "candidate pool is empty");
  const Vector d = pred_variances(information, features);
  GapReport r;
  r.argmax = argmax_lowest(d);
  r.max_variance = d[static_cast<Eigen::Index>(r.argmax)];
  r.lower_bound = static_cast<double>(features.p()) - trace_inverse_product(information, c);
  r.gap = r.max_variance - r.lower_bound;
  return r;
}

GapReport equivalence_gap(const ContinuousDesign& design, const FeatureMap& features, const Regularizer& c) {
  return equivalence_gap(information_matrix(design, features, c), features, c);
}

double step_size_bound(double d_max, Eigen::Index p, double trace_mc) {
  const double pd = static_cast<double>(p);
  const double tau = d_max - (pd - trace_mc);
  if (!(tau > 0.0)) {
    throw Error(ErrorCode::AlreadyOptimal, "no positive step exists (tau = " + std::to_string(tau) + ")");
  }
  const double bound = tau / (pd * (pd + tau - 1.0));
  return std::min(bound, 1.0 - 1e-9);
}

StepRule parse_step_rule(std::string_view name) {
  if (name == "paper-bound") return StepRule::PaperBound;
  if (name == "line-search") return StepRule::LineSearch;
  throw Error(ErrorCode::InvalidArgument, "unknown step rule '" + std::string(name) + "' (paper-bound|line-search)");
}

InitialDesign parse_initial_design(std::string_view name) {
  if (name == "uniform") return InitialDesign::Uniform;
  if (name == "empty") return InitialDesign::Empty;
  if (name == "indices") return InitialDesign::Indices;
  throw Error(ErrorCode::InvalidArgument, "unknown initial design '" + std::string(name) + "' (uniform|empty|indices)");
}

std::string_view to_string(StepRule rule) noexcept {
  return rule == StepRule::PaperBound ? "paper-bound" : "line-search";
}

std::string_view to_string(InitialDesign init) noexcept {
  switch (init) {
    case InitialDesign::Uniform: return "uniform";
    case InitialDesign::Empty: return "empty";
    case InitialDesign::Indices: return "indices";
  }
  return "uniform";
}

// ---------------------------------------------------------------------------
// Continuous algorithm

namespace {

/// Maximizes a concave f on [lo, hi] by golden-section search.
template <typename F>
double golden_section_max(F&& f, double lo, double hi, double tol) {
  const double ratio = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - ratio * (hi - lo);
  double x2 = lo + ratio * (hi - lo);
  double f1 = f(x1);
  double f2 = f(x2);
  while (hi - lo > tol) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + ratio * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - ratio * (hi - lo);
      f1 = f(x1);
    }
  }
  return 0.5 * (lo + hi);
}

/// log|A| or -inf when A is not numerically positive definite.
double safe_logdet(const Matrix& a) {
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) return -std::numeric_limits<double>::infinity();
  const auto diag = llt.matrixLLT().diagonal();
  double acc = 0.0;
  for (Eigen::Index i = 0; i < diag.size(); ++i) {
    if (!(diag[i] > 0.0)) return -std::numeric_limits<double>::infinity();
    acc += 2.0 * std::log(diag[i]);
  }
  return acc;
}

Matrix point_information(const FeatureMap& features, Index z, const Matrix& c) {
  const Vector g = features.feature(z);
  return g * g.transpose() + c;
}

void prune_and_normalize(Vector& q, double threshold) {
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    if (q[i] < threshold) q[i] = 0.0;
  }
  const double total = q.sum();
  if (total > 0.0) q /= total;
}

}  // namespace

DesignState odoem_continuous(const FeatureMap& features, const Regularizer& c, const ContinuousOptions& options) {
  const Index n = features.n();
  const Eigen::Index p = features.p();
  if (n == 0) throw Error(ErrorCode::EmptyInput, "candidate pool is empty");
  if (!(options.tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tol must be positive");
  if (options.max_iter < 0) throw Error(ErrorCode::InvalidArgument, "max_iter must be nonnegative");
  if (c.p() != p) throw Error(ErrorCode::DimensionMismatch, "regularizer dimension != feature dimension");

  const Matrix& cm = c.values();
  Vector q = Vector::Zero(static_cast<Eigen::Index>(n));
  bool empty_start = false;
  switch (options.init) {
    case InitialDesign::Uniform:
      q.setConstant(1.0 / static_cast<double>(n));
      break;
    case InitialDesign::Empty:
      empty_start = true;
      break;
    case InitialDesign::Indices: {
      if (options.init_indices.empty()) throw Error(ErrorCode::EmptyInput, "initial index list is empty");
      validate_indices(options.init_indices, n);
      for (Index i : options.init_indices) q[static_cast<Eigen::Index>(i)] = 1.0 / static_cast<double>(options.init_indices.size());
      break;
    }
  }

  DesignState state;
  for (int iter = 0;; ++iter) {
    const Matrix mvals = information_values(ContinuousDesign::from_dense(q), features, cm);
    const SpdMatrix m(mvals);
    const Vector d = pred_variances(m, features);
    const double lower = static_cast<double>(p) - trace_inverse_product(m, c);

    std::vector<char> saturated(n, 0);
    for (Index i = 0; i < n; ++i) saturated[i] = q[static_cast<Eigen::Index>(i)] >= 1.0 - 1e-9;
    const Index z_all = argmax_lowest(d);
    const Index z = argmax_lowest(d, &saturated);

    state.logdet = m.logdet();
    state.information = mvals;
    // The empty design is not a probability measure; its "gap" is reported
    // against the same bound so the trace stays comparable.
    state.gap = d[static_cast<Eigen::Index>(z_all)] - lower;
    state.iterations = iter;
    state.logdet_trace.push_back(state.logdet);
    state.gap_trace.push_back(state.gap);

    if (!empty_start && state.gap <= options.tol) {
      state.converged = true;
      break;
    }
    if (iter >= options.max_iter) break;

    if (empty_start) {
      // From M = C the best single step puts all mass on the argmax.
      q[static_cast<Eigen::Index>(z_all)] = 1.0;
      empty_start = false;
      ++state.forward_steps;
      continue;
    }

    const double tau = z < n ? d[static_cast<Eigen::Index>(z)] - lower : 0.0;

    if (options.away_steps) {
      Index w = n;
      for (Index i = 0; i < n; ++i) {
        if (q[static_cast<Eigen::Index>(i)] <= 0.0) continue;
        if (w == n || d[static_cast<Eigen::Index>(i)] < d[static_cast<Eigen::Index>(w)]) w = i;
      }
      const double qw = w < n ? q[static_cast<Eigen::Index>(w)] : 0.0;
      const double away_gain = w < n ? lower - d[static_cast<Eigen::Index>(w)] : 0.0;
      if (w < n && qw < 1.0 && away_gain > tau) {
        // e_{k+1} = (1 + a) e_k - a delta(w), a in (0, q_w / (1 - q_w)].
        const Matrix dir = mvals - point_information(features, w, cm);
        auto f = [&](double a) { return safe_logdet(mvals + a * dir); };
        const double a_max = qw / (1.0 - qw);
        double a = golden_section_max(f, 0.0, a_max, options.line_search_tol * std::max(1.0, a_max));
        double fa = f(a);
        bool drop = false;
        if (const double f_end = f(a_max); f_end >= fa) {
          a = a_max;
          fa = f_end;
          drop = true;
        }
        if (fa > state.logdet) {
          q *= (1.0 + a);
          q[static_cast<Eigen::Index>(w)] -= a;
          if (drop || q[static_cast<Eigen::Index>(w)] < 0.0) q[static_cast<Eigen::Index>(w)] = 0.0;
          prune_and_normalize(q, options.prune_threshold);
          ++state.away_steps;
          continue;
        }
      }
    }

    if (z >= n || !(tau > 0.0)) break;  // no ascent direction left at this precision

    double a = 0.0;
    if (options.step_rule == StepRule::PaperBound) {
      a = step_size_bound(d[static_cast<Eigen::Index>(z)], p, static_cast<double>(p) - lower);
    } else {
      const Matrix target = point_information(features, z, cm);
      auto f = [&](double t) { return safe_logdet((1.0 - t) * mvals + t * target); };
      a = golden_section_max(f, 0.0, 1.0, options.line_search_tol);
      a = std::clamp(a, 1e-16, 1.0 - 1e-12);
    }
    q *= (1.0 - a);
    q[static_cast<Eigen::Index>(z)] += a;
    prune_and_normalize(q, options.prune_threshold);
    ++state.forward_steps;
  }

  state.design = ContinuousDesign::from_dense(q);
  return state;
}

// ---------------------------------------------------------------------------
// Discrete greedy variant

DiscreteResult odoem_discrete(const FeatureMap& features, const Regularizer& c, Index budget,
                              const std::vector<Index>& already) {
  const Index n = features.n();
  validate_indices(already, n);
  if (budget + already.size() > n) {
    throw Error(ErrorCode::BudgetExceedsPool, "budget " + std::to_string(budget) + " exceeds the " +
                                                  std::to_string(n - already.size()) + " unlabeled candidates");
  }
  if (c.p() != features.p()) throw Error(ErrorCode::DimensionMismatch, "regularizer dimension != p");

  const Matrix& x = features.matrix();
  Matrix m0 = c.values();
  for (Index i : already) {
    const auto row = x.row(static_cast<Eigen::Index>(i));
    m0.noalias() += row.transpose() * row;
  }
  const SpdMatrix m(m0);

  // v = M^{-1} X^T (p x n); d_i = x_i . v_i. Each pick is a Sherman-Morrison
  // rank-one downdate of v.
  Matrix v = m.solve(Matrix(x.transpose()));
  Vector d(static_cast<Eigen::Index>(n));
  for (Index i = 0; i < n; ++i) d[static_cast<Eigen::Index>(i)] = x.row(static_cast<Eigen::Index>(i)).dot(v.col(static_cast<Eigen::Index>(i)));

  std::vector<char> taken(n, 0);
  for (Index i : already) taken[i] = 1;

  DiscreteResult result;
  result.logdet_trace.push_back(m.logdet());
  for (Index step = 0; step < budget; ++step) {
    const Index z = argmax_lowest(d, &taken);
    const auto zi = static_cast<Eigen::Index>(z);
    const double ratio = 1.0 + d[zi];
    result.order.push_back(z);
    result.det_ratios.push_back(ratio);
    result.logdet_trace.push_back(result.logdet_trace.back() + std::log(ratio));
    taken[z] = 1;

    const Vector u = v.col(zi);                 // M^{-1} g_z
    const Vector w = x * u;                     // g_i^T M^{-1} g_z
    v.noalias() -= (u / ratio) * w.transpose();
    d.array() -= w.array().square() / ratio;
  }
  return result;
}

Index discrete_next(const FeatureMap& features, const Regularizer& c, const std::vector<Index>& labeled) {
  const Index n = features.n();
  validate_indices(labeled, n);
  if (labeled.size() >= n) throw Error(ErrorCode::PoolExhausted, "every candidate is already labeled");
  Matrix m = c.values();
  const Matrix& x = features.matrix();
  for (Index i : labeled) {
    const auto row = x.row(static_cast<Eigen::Index>(i));
    m.noalias() += row.transpose() * row;
  }
  const Vector d = pred_variances(SpdMatrix(symmetrize(m)), features);
  std::vector<char> taken(n, 0);
  for (Index i : labeled) taken[i] = 1;
  return argmax_lowest(d, &taken);
}

double discrete_logdet(const FeatureMap& features, const Regularizer& c, const std::vector<Index>& labeled) {
  Matrix m = c.values();
  const Matrix& x = features.matrix();
  for (Index i : labeled) {
    const auto row = x.row(static_cast<Eigen::Index>(i));
    m.noalias() += row.transpose() * row;
  }
  return SpdMatrix(symmetrize(m)).logdet();
}

// ---------------------------------------------------------------------------
// Mixing-step determinant formula

MixingIdentityCheck mixing_identity_check(const SpdMatrix& information, const Vector& g, const Matrix& c, double a) {
  if (!(a > 0.0 && a < 1.0)) throw Error(ErrorCode::InvalidArgument, "mixing weight must lie in (0, 1)");
  const Eigen::Index p = information.dim();
  if (g.size() != p || c.rows() != p || c.cols() != p) {
    throw Error(ErrorCode::DimensionMismatch, "mixing check operands have inconsistent dimensions");
  }
  const Matrix next = (1.0 - a) * information.values() + a * (g * g.transpose() + c);
  MixingIdentityCheck out;
  out.exact_logdet = SpdMatrix(symmetrize(next)).logdet();
  const double d = information.inverse_quadratic(g);
  const double tr = information.solve(c).trace();
  const double t = a / (1.0 - a);
  out.formula_logdet = static_cast<double>(p) * std::log1p(-a) + information.logdet() + std::log1p(t * (d + tr));
  out.relative_discrepancy = std::abs(std::expm1(out.formula_logdet - out.exact_logdet));
  return out;
}

MixingIdentityReport mixing_identity_report(int trials, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> dim_dist(2, 8);

  MixingIdentityReport report;
  report.trials = trials;
  double sum_general = 0.0;
  for (int t = 0; t < trials; ++t) {
    const int p = dim_dist(rng);
    const int support = p + 2;
    Matrix design_part = Matrix::Zero(p, p);
    for (int s = 0; s < support; ++s) {
      Vector g(p);
      for (int j = 0; j < p; ++j) g[j] = normal(rng);
      design_part += (1.0 / support) * g * g.transpose();
    }
    Matrix b(p, p);
    for (int i = 0; i < p; ++i)
      for (int j = 0; j < p; ++j) b(i, j) = normal(rng);
    const Matrix c = 0.05 * Matrix::Identity(p, p) + 0.1 * b.transpose() * b;
    Vector g(p);
    for (int j = 0; j < p; ++j) g[j] = normal(rng);
    const double a = 0.05 + 0.85 * unit(rng);

    const SpdMatrix with_c(symmetrize(design_part + c));
    const auto general = mixing_identity_check(with_c, g, c, a);
    report.max_discrepancy_general = std::max(report.max_discrepancy_general, general.relative_discrepancy);
    sum_general += general.relative_discrepancy;

    const SpdMatrix without_c(symmetrize(design_part));
    const auto rank_one = mixing_identity_check(without_c, g, Matrix::Zero(p, p), a);
    report.max_discrepancy_rank_one = std::max(report.max_discrepancy_rank_one, rank_one.relative_discrepancy);
  }
  report.mean_discrepancy_general = trials > 0 ? sum_general / trials : 0.0;
  return report;
}

}  // namespace mdoe
