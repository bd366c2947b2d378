#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include <gtest/gtest.h>

#include "mdoe/design.hpp"
#include "mdoe/design_io.hpp"
#include "mdoe/error.hpp"
#include "oracles.hpp"

namespace mdoe {
namespace {

using testing::inverse_gauss;
using testing::logabsdet_gauss;
using testing::random_matrix;
using testing::random_spd;
using testing::random_vector;

Matrix rows(std::initializer_list<std::initializer_list<double>> r) {
  Matrix m(static_cast<Eigen::Index>(r.size()), static_cast<Eigen::Index>(r.begin()->size()));
  Eigen::Index i = 0;
  for (const auto& row : r) {
    Eigen::Index j = 0;
    for (double v : row) m(i, j++) = v;
    ++i;
  }
  return m;
}

ContinuousDesign random_design(Index n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Vector w(static_cast<Eigen::Index>(n));
  for (auto& x : w) x = u(rng);
  return ContinuousDesign::from_dense(w / w.sum());
}

// Oracle information matrix: explicit loop over the dense weights.
Matrix oracle_information(const Vector& q, const Matrix& x, const Matrix& c) {
  Matrix m = c;
  for (Eigen::Index i = 0; i < x.rows(); ++i) m += q[i] * x.row(i).transpose() * x.row(i);
  return m;
}

LaplacianMatrix path_laplacian(Eigen::Index n) {
  Matrix l = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    l(i, i) += 1;
    l(i + 1, i + 1) += 1;
    l(i, i + 1) = l(i + 1, i) = -1;
  }
  return {l};
}

TEST(Regularizer, NoManifoldWeightIsRidge) {
  std::mt19937_64 rng(1);
  const auto f = FeatureMap::from_matrix(random_matrix(5, 3, rng));
  const auto c = regularizer(f, path_laplacian(5), 0.01, 0.0);
  EXPECT_LE((c.values() - 0.01 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Regularizer, EdgelessGraphIsRidge) {
  std::mt19937_64 rng(2);
  const auto f = FeatureMap::from_matrix(random_matrix(5, 3, rng));
  const auto c = regularizer(f, {Matrix::Zero(5, 5)}, 0.2, 10.0);
  EXPECT_LE((c.values() - 0.2 * Matrix::Identity(3, 3)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Regularizer, PathGraphMatchesPairwiseOuterProducts) {
  std::mt19937_64 rng(3);
  for (const int p : {1, 3}) {
    const Matrix x = random_matrix(6, p, rng);
    Matrix want = Matrix::Zero(p, p);
    for (int i = 0; i + 1 < 6; ++i) {
      const Vector diff = (x.row(i) - x.row(i + 1)).transpose();
      want += diff * diff.transpose();
    }
    const Matrix got = manifold_penalty(FeatureMap::from_matrix(x), path_laplacian(6));
    EXPECT_LE((got - want).cwiseAbs().maxCoeff(), 1e-12);
    const auto c = regularizer(FeatureMap::from_matrix(x), path_laplacian(6), 0.1, 2.0);
    EXPECT_LE((c.values() - (0.1 * Matrix::Identity(p, p) + 2.0 * want)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(Regularizer, DimensionMismatch) {
  const auto f = FeatureMap::from_matrix(Matrix::Ones(4, 2));
  EXPECT_THROW((void)regularizer(f, path_laplacian(3), 0.1, 1.0), Error);
  EXPECT_THROW((void)regularizer(f, path_laplacian(4), 0.0, 1.0), Error);
}

TEST(InformationMatrix, EmptyDesignIsRegularizer) {
  const auto f = FeatureMap::from_matrix(Matrix::Ones(3, 2));
  const auto c = regularizer_from_penalty(Matrix::Zero(2, 2), 0.01, 0.0);
  const auto m = information_matrix(ContinuousDesign{}, f, c);
  EXPECT_LE((m.values() - 0.01 * Matrix::Identity(2, 2)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_NEAR(m.logdet(), std::log(1e-4), 1e-12);
}

TEST(InformationMatrix, SinglePoint) {
  const auto f = FeatureMap::from_matrix(rows({{1, 0}}));
  const Regularizer c(Matrix::Identity(2, 2), 1.0);
  const auto m = information_matrix(ContinuousDesign::point_mass(0), f, c);
  EXPECT_LE((m.values() - rows({{2, 0}, {0, 1}})).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(InformationMatrix, MatchesLoopOracleAndIsAffineInDesign) {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 30; ++trial) {
    const Matrix x = random_matrix(7, 3, rng);
    const auto f = FeatureMap::from_matrix(x);
    const Regularizer c(random_spd(3, rng, 0.1));
    const auto e1 = random_design(7, rng);
    const auto e2 = random_design(7, rng);
    const double a = std::uniform_real_distribution<double>(0.0, 1.0)(rng);

    const Matrix m1 = information_values(e1, f, c.values());
    const Matrix m2 = information_values(e2, f, c.values());
    EXPECT_LE((m1 - oracle_information(e1.dense(7), x, c.values())).cwiseAbs().maxCoeff(), 1e-12);
    const Matrix mixed = information_values(mix(e1, e2, a), f, c.values());
    EXPECT_LE((mixed - ((1 - a) * m1 + a * m2)).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(PredVariance, Examples) {
  const auto f = FeatureMap::from_matrix(rows({{1, 0}, {0, 0}}));
  const SpdMatrix eye(Matrix::Identity(2, 2));
  EXPECT_DOUBLE_EQ(pred_variance(0, eye, f), 1.0);
  EXPECT_DOUBLE_EQ(pred_variance(1, eye, f), 0.0);
  const SpdMatrix m(rows({{2, 0}, {0, 1}}));
  EXPECT_NEAR(pred_variance(0, m, f), 0.5, 1e-15);
}

TEST(PredVariance, AllCandidatesMatchExplicitInverse) {
  std::mt19937_64 rng(5);
  const Matrix x = random_matrix(9, 4, rng);
  const auto f = FeatureMap::from_matrix(x);
  const Matrix mv = random_spd(4, rng);
  const SpdMatrix m(mv);
  const Matrix inv = inverse_gauss(mv);
  const Vector d = pred_variances(m, f);
  for (Index i = 0; i < 9; ++i) {
    const Vector g = x.row(static_cast<Eigen::Index>(i)).transpose();
    const double want = g.dot(inv * g);
    EXPECT_NEAR(d[static_cast<Eigen::Index>(i)], want, 1e-11 * want);
    EXPECT_NEAR(pred_variance(i, m, f), want, 1e-11 * want);
  }
}

TEST(EquivalenceGap, SingleCandidatePointMassIsOptimal) {
  const auto f = FeatureMap::from_matrix(rows({{0.7, -1.2}}));
  const Regularizer c(0.05 * Matrix::Identity(2, 2), 0.05);
  const auto r = equivalence_gap(ContinuousDesign::point_mass(0), f, c);
  EXPECT_NEAR(r.gap, 0.0, 1e-12);
}

// Weighted mean of d over the support equals p - Tr(M^{-1} C); hence the max
// can never be below it. Trace computed from an explicit inverse.
TEST(EquivalenceGap, WeightedVarianceIdentityAndLowerBound) {
  std::mt19937_64 rng(6);
  std::uniform_int_distribution<int> nd(2, 12);
  std::uniform_int_distribution<int> pd(1, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = nd(rng);
    const int p = pd(rng);
    const Matrix x = random_matrix(n, p, rng);
    const auto f = FeatureMap::from_matrix(x);
    const Matrix cv = random_spd(p, rng, 0.05);
    const Regularizer c(cv);
    const auto e = random_design(static_cast<Index>(n), rng);
    const Matrix mv = oracle_information(e.dense(static_cast<Index>(n)), x, cv);
    const Matrix inv = inverse_gauss(mv);
    const double bound = p - (inv * cv).trace();

    double weighted = 0.0;
    for (std::size_t s = 0; s < e.support.size(); ++s) {
      const Vector g = x.row(static_cast<Eigen::Index>(e.support[s])).transpose();
      weighted += e.weights[s] * g.dot(inv * g);
    }
    EXPECT_NEAR(weighted, bound, 1e-8 * std::max(1.0, std::abs(bound))) << "trial " << trial;

    const auto r = equivalence_gap(e, f, c);
    EXPECT_NEAR(r.lower_bound, bound, 1e-9 * std::max(1.0, std::abs(bound)));
    EXPECT_GE(r.gap, -1e-8);
  }
}

TEST(LogDet, DirectionalDerivativeMatchesTraceFormula) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix x = random_matrix(8, 3, rng);
    const auto f = FeatureMap::from_matrix(x);
    const Matrix cv = random_spd(3, rng, 0.1);
    const Matrix m1 = information_values(random_design(8, rng), f, cv);
    const Matrix m2 = information_values(random_design(8, rng), f, cv);
    const double a = 0.3;
    const double h = 1e-6;
    auto ld = [&](double t) { return logabsdet_gauss((1 - t) * m1 + t * m2); };
    const double fd = (ld(a + h) - ld(a - h)) / (2 * h);
    const double analytic = (inverse_gauss((1 - a) * m1 + a * m2) * (m2 - m1)).trace();
    EXPECT_NEAR(fd, analytic, 1e-5 * std::max(1.0, std::abs(analytic)));
  }
}

TEST(LogDet, StrictlyConcaveAlongSegments) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const Matrix x = random_matrix(6, 3, rng);
    const auto f = FeatureMap::from_matrix(x);
    const Matrix cv = 0.01 * Matrix::Identity(3, 3);
    const Matrix m1 = information_values(random_design(6, rng), f, cv);
    const Matrix m2 = information_values(random_design(6, rng), f, cv);
    const double mid = SpdMatrix(0.5 * (m1 + m2)).logdet();
    EXPECT_GT(mid, 0.5 * (SpdMatrix(m1).logdet() + SpdMatrix(m2).logdet()));
  }
}

TEST(StepSizeBound, Examples) {
  EXPECT_NEAR(step_size_bound(3.0, 2, 0.5), 0.3, 1e-15);
  const double tiny = step_size_bound(1.5 + 1e-9, 2, 0.5);
  EXPECT_GT(tiny, 0.0);
  EXPECT_LT(tiny, 1e-9);
  EXPECT_NEAR(step_size_bound(0.8, 1, 0.5), 1.0 - 1e-9, 1e-15);
  EXPECT_THROW((void)step_size_bound(1.5, 2, 0.5), Error);
  try {
    (void)step_size_bound(1.0, 2, 0.5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::AlreadyOptimal);
  }
}

TEST(StepSizeBound, InsideUnitIntervalForHigherDimensions) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> tau(1e-6, 50.0);
  for (int p = 2; p < 20; ++p) {
    const double t = tau(rng);
    const double b = step_size_bound(p - 0.2 + t, p, 0.2);
    EXPECT_GT(b, 0.0);
    EXPECT_LT(b, 1.0);
  }
}

TEST(OdoemContinuous, SingleCandidate) {
  const auto f = FeatureMap::from_matrix(rows({{1.0, 2.0}}));
  const Regularizer c(0.01 * Matrix::Identity(2, 2), 0.01);
  const auto s = odoem_continuous(f, c);
  EXPECT_TRUE(s.converged);
  EXPECT_LE(s.iterations, 1);
  ASSERT_EQ(s.design.support.size(), 1u);
  EXPECT_NEAR(s.design.weights[0], 1.0, 1e-12);
  EXPECT_LE(s.gap, 1e-10);
}

TEST(OdoemContinuous, SymmetricPoolSplitsEvenly) {
  const auto f = FeatureMap::from_matrix(rows({{1, 0}, {0, 1}}));
  const Regularizer c(0.01 * Matrix::Identity(2, 2), 0.01);
  for (const auto init : {InitialDesign::Uniform, InitialDesign::Empty}) {
    ContinuousOptions opt;
    opt.init = init;
    const auto s = odoem_continuous(f, c, opt);
    EXPECT_TRUE(s.converged);
    const Vector w = s.design.dense(2);
    EXPECT_NEAR(w[0], 0.5, 1e-4);
    EXPECT_NEAR(w[1], 0.5, 1e-4);
  }
}

// Fixed-point oracle for the simplex problem max_q log|sum q_i g_i g_i^T + C|:
// q_i <- q_i d_i / sum_j q_j d_j, run until the weights stop moving.
Vector multiplicative_oracle(const Matrix& x, const Matrix& c) {
  const Eigen::Index n = x.rows();
  Vector q = Vector::Constant(n, 1.0 / static_cast<double>(n));
  for (int it = 0; it < 2000000; ++it) {
    const Matrix inv = inverse_gauss(oracle_information(q, x, c));
    Vector next(n);
    for (Eigen::Index i = 0; i < n; ++i) next[i] = q[i] * x.row(i).dot(inv * x.row(i).transpose());
    next /= next.sum();
    const double change = (next - q).cwiseAbs().maxCoeff();
    q = next;
    if (change < 1e-8 && it > 100) break;
  }
  return q;
}

TEST(OdoemContinuous, MatchesSimplexOracle) {
  std::mt19937_64 rng(10);
  for (int trial = 0; trial < 5; ++trial) {
    const Matrix x = random_matrix(8, 3, rng);
    const Matrix cv = 0.01 * Matrix::Identity(3, 3);
    const auto f = FeatureMap::from_matrix(x);
    const Regularizer c(cv, 0.01);
    const Vector q = multiplicative_oracle(x, cv);
    const double best = logabsdet_gauss(oracle_information(q, x, cv));
    for (const auto rule : {StepRule::PaperBound, StepRule::LineSearch}) {
      ContinuousOptions opt;
      opt.step_rule = rule;
      const auto s = odoem_continuous(f, c, opt);
      EXPECT_TRUE(s.converged);
      EXPECT_NEAR(s.logdet, best, 1e-3) << "trial " << trial;
      EXPECT_LE(s.gap, 1e-6);
    }
  }
}

TEST(OdoemContinuous, TracesAreMonotoneAndCertified) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix x = random_matrix(25, 4, rng);
    const auto f = FeatureMap::from_matrix(x);
    const Regularizer c(random_spd(4, rng, 0.05));
    ContinuousOptions opt;
    opt.step_rule = trial % 2 == 0 ? StepRule::PaperBound : StepRule::LineSearch;
    const auto s = odoem_continuous(f, c, opt);
    ASSERT_TRUE(s.converged);
    for (std::size_t i = 1; i < s.logdet_trace.size(); ++i)
      EXPECT_GE(s.logdet_trace[i], s.logdet_trace[i - 1] - 1e-12) << "iteration " << i;
    EXPECT_LE(*std::min_element(s.gap_trace.begin(), s.gap_trace.end()), opt.tol);
    s.design.validate(25);
    // Independent certificate on the returned design.
    const Matrix inv = inverse_gauss(oracle_information(s.design.dense(25), x, c.values()));
    double dmax = 0.0;
    for (Eigen::Index i = 0; i < 25; ++i) dmax = std::max(dmax, x.row(i).dot(inv * x.row(i).transpose()));
    EXPECT_LE(dmax - (4 - (inv * c.values()).trace()), 1e-6);
  }
}

TEST(OdoemContinuous, AddOnlyModeStillIncreasesLogdet) {
  std::mt19937_64 rng(12);
  const auto f = FeatureMap::from_matrix(random_matrix(15, 3, rng));
  const Regularizer c(0.01 * Matrix::Identity(3, 3), 0.01);
  ContinuousOptions opt;
  opt.away_steps = false;
  opt.max_iter = 300;
  const auto s = odoem_continuous(f, c, opt);
  EXPECT_EQ(s.away_steps, 0);
  for (std::size_t i = 1; i < s.logdet_trace.size(); ++i) EXPECT_GE(s.logdet_trace[i], s.logdet_trace[i - 1] - 1e-12);
  EXPECT_LT(s.gap_trace.back(), s.gap_trace.front());
}

TEST(OdoemContinuous, IndicesInitialDesign) {
  const auto f = FeatureMap::from_matrix(rows({{1, 0}, {0, 1}, {1, 1}}));
  const Regularizer c(0.1 * Matrix::Identity(2, 2), 0.1);
  ContinuousOptions opt;
  opt.init = InitialDesign::Indices;
  opt.init_indices = {2};
  EXPECT_NO_THROW((void)odoem_continuous(f, c, opt));
  opt.init_indices = {7};
  EXPECT_THROW((void)odoem_continuous(f, c, opt), Error);
  opt.init_indices = {};
  EXPECT_THROW((void)odoem_continuous(f, c, opt), Error);
}

TEST(OdoemDiscrete, FullBudgetIsPermutation) {
  std::mt19937_64 rng(13);
  const auto f = FeatureMap::from_matrix(random_matrix(10, 3, rng));
  const Regularizer c(0.01 * Matrix::Identity(3, 3), 0.01);
  const auto r = odoem_discrete(f, c, 10);
  std::vector<Index> sorted = r.order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<Index> want(10);
  std::iota(want.begin(), want.end(), Index{0});
  EXPECT_EQ(sorted, want);
}

TEST(OdoemDiscrete, FirstPickIsLargestDirection) {
  const auto f = FeatureMap::from_matrix(rows({{2, 0}, {1, 0}, {0, 1}}));
  const Regularizer c(0.01 * Matrix::Identity(2, 2), 0.01);
  EXPECT_EQ(odoem_discrete(f, c, 1).order.front(), 0u);
  EXPECT_EQ(discrete_next(f, c, {}), 0u);
}

TEST(OdoemDiscrete, LogdetMatchesFromScratch) {
  std::mt19937_64 rng(14);
  const Matrix x = random_matrix(6, 4, rng);
  const auto f = FeatureMap::from_matrix(x);
  const Matrix cv = random_spd(4, rng, 0.1);
  const Regularizer c(cv);
  const auto r = odoem_discrete(f, c, 3);
  ASSERT_EQ(r.logdet_trace.size(), 4u);
  Matrix m = cv;
  EXPECT_NEAR(r.logdet_trace[0], logabsdet_gauss(m), 1e-9);
  std::vector<Index> labeled;
  for (std::size_t k = 0; k < 3; ++k) {
    // The pick must be the from-scratch argmax.
    const Matrix inv = inverse_gauss(m);
    Index best = 0;
    double bestd = -1.0;
    for (Index i = 0; i < 6; ++i) {
      if (std::find(labeled.begin(), labeled.end(), i) != labeled.end()) continue;
      const double d = x.row(static_cast<Eigen::Index>(i)).dot(inv * x.row(static_cast<Eigen::Index>(i)).transpose());
      if (d > bestd) bestd = d, best = i;
    }
    EXPECT_EQ(r.order[k], best);
    const Vector g = x.row(static_cast<Eigen::Index>(best)).transpose();
    m += g * g.transpose();
    labeled.push_back(best);
    EXPECT_NEAR(r.logdet_trace[k + 1], logabsdet_gauss(m), 1e-9);
    EXPECT_NEAR(r.det_ratios[k], 1.0 + bestd, 1e-9 * (1.0 + bestd));
    EXPECT_GT(r.det_ratios[k], 1.0);
    EXPECT_NEAR(discrete_logdet(f, c, labeled), logabsdet_gauss(m), 1e-9);
  }
}

TEST(OdoemDiscrete, AlreadyLabeledAreSkipped) {
  std::mt19937_64 rng(15);
  const auto f = FeatureMap::from_matrix(random_matrix(8, 3, rng));
  const Regularizer c(0.01 * Matrix::Identity(3, 3), 0.01);
  const auto full = odoem_discrete(f, c, 5);
  const auto resumed = odoem_discrete(f, c, 3, {full.order[0], full.order[1]});
  ASSERT_EQ(resumed.order.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(resumed.order[k], full.order[k + 2]);
}

TEST(OdoemDiscrete, Errors) {
  const auto f = FeatureMap::from_matrix(rows({{1, 0}, {0, 1}}));
  const Regularizer c(Matrix::Identity(2, 2));
  try {
    (void)odoem_discrete(f, c, 3);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::BudgetExceedsPool);
  }
  try {
    (void)discrete_next(f, c, {0, 1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::PoolExhausted);
  }
}

TEST(MixingIdentity, ExactForPureRankOne) {
  std::mt19937_64 rng(16);
  const SpdMatrix m(random_spd(4, rng));
  const Vector g = random_vector(4, rng);
  const auto check = mixing_identity_check(m, g, Matrix::Zero(4, 4), 0.3);
  EXPECT_LE(check.relative_discrepancy, 1e-10);
  EXPECT_NEAR(check.exact_logdet,
              logabsdet_gauss(0.7 * m.values() + 0.3 * g * g.transpose()), 1e-10);
}

TEST(MixingIdentity, ReportShowsGeneralCaseIsApproximate) {
  const auto r = mixing_identity_report(50, 3);
  EXPECT_EQ(r.trials, 50);
  EXPECT_LE(r.max_discrepancy_rank_one, 1e-10);
  EXPECT_GT(r.max_discrepancy_general, 1e-6);
}

TEST(DesignIo, RoundTrip) {
  DesignRecord rec;
  rec.p = 3;
  rec.logdet = -1.234567890123;
  rec.gap = 3.5e-7;
  rec.iterations = 42;
  rec.design.support = {4, 0, 9};
  rec.design.weights = {0.2, 0.3, 0.5};
  std::stringstream ss;
  write_design(ss, rec, {"seed = 1"});
  const auto back = read_design(ss);
  EXPECT_EQ(back.p, 3);
  EXPECT_DOUBLE_EQ(back.logdet, rec.logdet);
  EXPECT_DOUBLE_EQ(back.gap, rec.gap);
  EXPECT_EQ(back.iterations, 42);
  EXPECT_EQ(back.design.support, rec.design.support);
  EXPECT_EQ(back.design.weights, rec.design.weights);
}

TEST(DesignIo, ParseErrorNamesLine) {
  std::stringstream ss("p 2\nlogdet 0\ngap 0\niterations 1\n0 abc\n");
  try {
    (void)read_design(ss);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::ParseError);
    EXPECT_NE(std::string(e.what()).find('5'), std::string::npos);
  }
}

}  // namespace
}  // namespace mdoe
