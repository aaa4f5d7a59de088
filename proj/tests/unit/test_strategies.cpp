#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "batchbo/errors.hpp"
#include "batchbo/loop.hpp"
#include "batchbo/strategies.hpp"

using namespace batchbo;

namespace {

double neg_xsinx(const Vector& x) { return -x[0] * std::sin(x[0]); }

// The 1D toy: minimize -x sin(x) on [0, 11] from five uniform initial points.
struct Toy {
  Domain domain = Domain::box({{0.0, 11.0}});
  Dataset data{Direction::minimize};
  std::optional<GpPosterior> gp;

  explicit Toy(std::uint64_t seed) {
    Rng rng = make_rng(seed, 1);
    const Matrix init = domain.sample_uniform(5, rng);
    for (Eigen::Index i = 0; i < init.rows(); ++i) data.append(init.row(i).transpose(), neg_xsinx(init.row(i).transpose()));
    gp.emplace(fit_gp(data, domain, {}, seed));
  }
};

double spread(const Batch& b) {
  double d = 0.0;
  for (Eigen::Index i = 0; i < b.points.rows(); ++i) {
    for (Eigen::Index j = 0; j < i; ++j) d = std::max(d, (b.points.row(i) - b.points.row(j)).norm());
  }
  return d;
}

GpHyperparams hp1(double l_unit, double noise = kJitterFloor) {
  GpHyperparams hp;
  hp.signal_variance = 1.0;
  hp.lengthscales = Vector::Constant(1, l_unit);
  hp.noise_variance = noise;
  return hp;
}

// Reference greedy snap: for each point, sort rows by distance and take the first free one.
std::vector<std::size_t> greedy_oracle(const Matrix& pts, const Matrix& rows, std::vector<bool> taken) {
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    std::vector<std::pair<double, std::size_t>> order;
    for (Eigen::Index r = 0; r < rows.rows(); ++r) {
      order.emplace_back((rows.row(r) - pts.row(i)).squaredNorm(), static_cast<std::size_t>(r));
    }
    std::sort(order.begin(), order.end());
    for (const auto& [d, r] : order) {
      if (!taken[r]) {
        taken[r] = true;
        out.push_back(r);
        break;
      }
    }
  }
  return out;
}

}  // namespace

TEST(Kmbbo, ToyBatchCoversEveryEiPeak) {
  const Toy toy(3);
  const Batch b = kmbbo_batch(*toy.gp, toy.data, toy.domain, 8, 200, 11);
  const auto ctx = AcquisitionContext::from_posterior(*toy.gp);
  std::vector<double> grid, ei;
  for (int i = 0; i <= 11000; ++i) {
    grid.push_back(11.0 * i / 11000.0);
    ei.push_back(expected_improvement(ctx, Vector::Constant(1, grid.back())));
  }
  const double top = *std::max_element(ei.begin(), ei.end());
  int peaks = 0;
  for (std::size_t i = 1; i + 1 < ei.size(); ++i) {
    if (ei[i] > ei[i - 1] && ei[i] >= ei[i + 1] && ei[i] > 0.1 * top) {
      ++peaks;
      double nearest = 1e300;
      for (Eigen::Index j = 0; j < b.points.rows(); ++j) nearest = std::min(nearest, std::abs(b.points(j, 0) - grid[i]));
      EXPECT_LT(nearest, 0.5) << "EI peak at " << grid[i];
    }
  }
  EXPECT_GE(peaks, 2);
}

TEST(Kmbbo, SingleCentroidIsSampleMean) {
  const Toy toy(4);
  KmbboTrace trace;
  const Matrix c = kmbbo_centroids(*toy.gp, toy.data, toy.domain, 1, 200, 5, {}, &trace);
  EXPECT_NEAR(c(0, 0), trace.slices.samples.col(0).mean(), 1e-12);
}

TEST(Kmbbo, TwoEqualPeaksGetOneCentroidEach) {
  // Equal observations at 0, 5 and 10 give EI maxima at 2.5 and 7.5 by symmetry.
  const Domain domain = Domain::box({{0.0, 10.0}});
  Dataset data(Direction::maximize);
  for (double x : {0.0, 5.0, 10.0}) data.append(Vector::Constant(1, x), 0.0);
  const GpPosterior gp = GpPosterior::condition(data, domain, hp1(0.1));
  const auto ctx = AcquisitionContext::from_posterior(gp);
  double left = 0.0, right = 0.0, vl = -1.0, vr = -1.0;
  for (int i = 0; i <= 10000; ++i) {
    const double x = 10.0 * i / 10000.0;
    const double v = expected_improvement(ctx, Vector::Constant(1, x));
    if (x < 5.0 && v > vl) vl = v, left = x;
    if (x > 5.0 && v > vr) vr = v, right = x;
  }
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Matrix c = kmbbo_centroids(gp, data, domain, 2, 10000, seed);
    const double a = std::min(c(0, 0), c(1, 0)), b = std::max(c(0, 0), c(1, 0));
    if (std::abs(a - left) < 1.0 && std::abs(b - right) < 1.0) ++ok;
  }
  EXPECT_GE(ok, 18);
}

TEST(Kmbbo, PoolBatchIsDistinctUnevaluatedRows) {
  Rng rng = make_rng(1, 0);
  const Matrix rows = Matrix::Random(60, 3);
  const Domain pool = Domain::pool(rows);
  Dataset data(Direction::maximize);
  for (int i = 0; i < 6; ++i) data.append(rows.row(i).transpose(), rows.row(i).sum());
  const GpPosterior gp = fit_gp(data, pool, {}, 1);
  const Batch b = kmbbo_batch(gp, data, pool, 8, 200, 2);
  std::vector<std::size_t> r = b.pool_rows;
  std::sort(r.begin(), r.end());
  EXPECT_EQ(std::unique(r.begin(), r.end()), r.end());
  for (auto row : r) EXPECT_GE(row, 6u);
}

TEST(Snap, ExactRowIsChosen) {
  Matrix rows(3, 2);
  rows << 0, 0, 1, 1, 2, 2;
  const Domain pool = Domain::pool(rows);
  Matrix pts(1, 2);
  pts << 1, 1;
  EXPECT_EQ(snap_to_candidates(pts, pool, {false, false, false}), std::vector<std::size_t>{1});
}

TEST(Snap, SecondPointTakesNextNearest) {
  Matrix rows(3, 1);
  rows << 0.0, 1.0, 3.0;
  const Domain pool = Domain::pool(rows);
  Matrix pts(2, 1);
  pts << 0.9, 1.1;
  EXPECT_EQ(snap_to_candidates(pts, pool, {false, false, false}), (std::vector<std::size_t>{1, 0}));
}

TEST(Snap, MatchesGreedyOracle) {
  Rng rng = make_rng(7, 0);
  const Matrix rows = Matrix::Random(100, 4);
  const Domain pool = Domain::pool(rows);
  std::vector<bool> excluded(100, false);
  for (int i = 0; i < 100; i += 7) excluded[i] = true;
  const Matrix pts = Matrix::Random(8, 4);
  EXPECT_EQ(snap_to_candidates(pts, pool, excluded), greedy_oracle(pts, rows, excluded));
}

TEST(Snap, ExhaustionThrows) {
  Matrix rows(2, 1);
  rows << 0.0, 1.0;
  EXPECT_THROW(snap_to_candidates(Matrix::Zero(2, 1), Domain::pool(rows), {true, false}), ExhaustionError);
}

TEST(Thompson, CollapsedPosteriorPicksTopMeans) {
  Matrix rows(6, 1);
  rows << 0, 1, 2, 3, 4, 5;
  const Domain pool = Domain::pool(rows);
  Dataset data(Direction::maximize);
  // Observe three rows; the posterior at the other three is pinned by a long lengthscale.
  data.append(Vector::Constant(1, 0.0), 0.0);
  data.append(Vector::Constant(1, 2.0), 2.0);
  data.append(Vector::Constant(1, 5.0), 5.0);
  GpOptions raw;
  raw.standardize = false;
  raw.scale_inputs = false;
  GpHyperparams hp = hp1(50.0, 1e-10);
  hp.signal_variance = 100.0;
  const GpPosterior gp = GpPosterior::condition(data, pool, hp, raw);
  const Batch b = thompson_batch(gp, data, pool, 2, 2000, 4);
  // Posterior means grow with x, so the two best unevaluated rows are 4 and 3.
  EXPECT_EQ(b.pool_rows, (std::vector<std::size_t>{4, 3}));
}

TEST(Thompson, SingleDrawArgmax) {
  const Toy toy(2);
  const Batch b = thompson_batch(*toy.gp, toy.data, toy.domain, 1, 500, 9);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_TRUE(toy.domain.contains(b.points.row(0).transpose()));
}

TEST(Thompson, ThreeCandidateFrequency) {
  Matrix rows(3, 1);
  rows << 0.0, 1.0, 2.0;
  const Domain pool = Domain::pool(rows);
  // Posterior pinned at means (0, 0, 1) with tiny variance.
  Dataset pinned(Direction::maximize);
  pinned.append(Vector::Constant(1, 0.0), 0.0);
  pinned.append(Vector::Constant(1, 1.0), 0.0);
  pinned.append(Vector::Constant(1, 2.0), 1.0);
  GpOptions raw;
  raw.standardize = false;
  raw.scale_inputs = false;
  const GpPosterior gp = GpPosterior::condition(pinned, pool, hp1(0.3, 1e-8), raw);
  // Nothing counts as evaluated, so all three rows are candidates.
  const Dataset none(Direction::maximize);
  int third = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    if (thompson_batch(gp, none, pool, 1, 2000, seed).pool_rows[0] == 2) ++third;
  }
  EXPECT_GE(third, 99);
}

TEST(ConstantLiar, SingleStepIsEiArgmax) {
  const Toy toy(5);
  const Batch b = constant_liar_batch(*toy.gp, toy.data, toy.domain, 1, 21);
  const Vector x = ei_argmax(AcquisitionContext::from_posterior(*toy.gp), toy.domain, {}, derive_seed(21, 0));
  EXPECT_EQ(b.points.row(0).transpose(), x);
}

TEST(ConstantLiar, LieLowersEiAtChosenPoint) {
  const Toy toy(6);
  const auto ctx = AcquisitionContext::from_posterior(*toy.gp);
  const Vector x = ei_argmax(ctx, toy.domain, {}, 1);
  Dataset augmented = toy.data;
  double lie = 0.0;
  for (double v : toy.data.values()) lie += v / static_cast<double>(toy.data.size());
  augmented.append(x, lie);
  const GpPosterior refit = fit_gp(augmented, toy.domain, {}, 2);
  EXPECT_LT(expected_improvement({refit, augmented.best_score()}, x), expected_improvement(ctx, x));
}

TEST(ConstantLiar, SpreadsWiderThanNaiveQei) {
  const Toy toy(7);
  const Batch cl = constant_liar_batch(*toy.gp, toy.data, toy.domain, 8, 1);
  const Batch qei = naive_qei_batch(*toy.gp, toy.data, toy.domain, 8, 2000, 1);
  EXPECT_GT(spread(cl), spread(qei));
}

TEST(NaiveQei, SingleIsGridArgmax) {
  const Toy toy(8);
  const Batch b = naive_qei_batch(*toy.gp, toy.data, toy.domain, 1, 2000, 3);
  Rng rng = make_rng(3, 0);
  const Matrix grid = toy.domain.sample_uniform(2000, rng);
  const auto ei = ei_surface(AcquisitionContext::from_posterior(*toy.gp), grid);
  const auto arg = std::max_element(ei.begin(), ei.end()) - ei.begin();
  EXPECT_EQ(b.points.row(0), grid.row(arg));
}

TEST(NaiveQei, ConstantEiTakesFirstCandidates) {
  Matrix rows(5, 1);
  rows << 0, 1, 2, 3, 4;
  const Domain pool = Domain::pool(rows);
  Dataset data(Direction::maximize);
  data.append(Vector::Constant(1, 100.0), 0.0);  // far away: EI is identical on every row
  Matrix wide_rows(6, 1);
  wide_rows << 0, 1, 2, 3, 4, 100;
  GpHyperparams hp = hp1(0.001);
  const GpPosterior gp = GpPosterior::condition(data, Domain::pool(wide_rows), hp);
  const Batch b = naive_qei_batch(gp, Dataset(Direction::maximize), pool, 3, 2000, 1);
  EXPECT_EQ(b.pool_rows, (std::vector<std::size_t>{0, 1, 2}));
}

TEST(NaiveQei, ToyBatchIsLocal) {
  const Toy toy(9);
  const Batch b = naive_qei_batch(*toy.gp, toy.data, toy.domain, 8, 2000, 1);
  const double l = toy.gp->lengthscales_in_domain_units()[0];
  const auto ctx = AcquisitionContext::from_posterior(*toy.gp);
  double peak = 0.0, best = -1.0;
  for (int i = 0; i <= 11000; ++i) {
    const double v = expected_improvement(ctx, Vector::Constant(1, 11.0 * i / 11000.0));
    if (v > best) best = v, peak = 11.0 * i / 11000.0;
  }
  for (Eigen::Index i = 0; i < b.points.rows(); ++i) EXPECT_LT(std::abs(b.points(i, 0) - peak), l);
}

TEST(LocalPenalization, SingleIsEiArgmax) {
  const Toy toy(10);
  const Batch b = lp_batch(*toy.gp, toy.data, toy.domain, 1, 13);
  const Vector x = ei_argmax(AcquisitionContext::from_posterior(*toy.gp), toy.domain, {}, derive_seed(13, 0));
  EXPECT_EQ(b.points.row(0).transpose(), x);
}

TEST(LocalPenalization, PenalizerBelowOneAtZeroDistance) {
  EXPECT_LT(local_penalizer(0.0, 2.0, 1.0, 0.5, 0.1), 1.0);
  EXPECT_LT(local_penalizer(0.0, 2.0, 1.0, 1.0, 0.1), 1.0);
  EXPECT_GT(local_penalizer(10.0, 2.0, 1.0, 0.5, 0.1), local_penalizer(0.1, 2.0, 1.0, 0.5, 0.1));
}

TEST(LocalPenalization, SecondPointIsRepelled) {
  const Toy toy(11);
  const Batch b = lp_batch(*toy.gp, toy.data, toy.domain, 2, 3);
  EXPECT_GT((b.points.row(0) - b.points.row(1)).norm(), 1e-6);
}

TEST(LocalPenalization, SpreadsWiderThanNaiveQei) {
  int wider = 0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Toy toy(100 + seed);
    const Batch lp = lp_batch(*toy.gp, toy.data, toy.domain, 8, seed);
    const Batch qei = naive_qei_batch(*toy.gp, toy.data, toy.domain, 8, 2000, seed);
    if (spread(lp) > spread(qei)) ++wider;
  }
  EXPECT_GE(wider, 18);
}

TEST(StrategyProperty, EveryStrategyReturnsKInDomainPointsDeterministically) {
  const Toy toy(12);
  const Objective obj("toy", toy.domain, Direction::minimize, std::nullopt, neg_xsinx);
  for (const auto& name : strategy_names()) {
    if (name == "cs-kmbbo") continue;
    auto make = [&]() -> std::unique_ptr<Strategy> {
      const auto kind = parse_strategy(name);
      if (kind == StrategyKind::random) return std::make_unique<RandomStrategy>();
      return std::make_unique<GpBatchStrategy>(kind, StrategyOptions{});
    };
    const Proposal a = make()->propose(obj, toy.data, 8, 77);
    const Proposal b = make()->propose(obj, toy.data, 8, 77);
    ASSERT_EQ(a.batch.size(), 8u) << name;
    for (Eigen::Index i = 0; i < 8; ++i) EXPECT_TRUE(toy.domain.contains(a.batch.points.row(i).transpose())) << name;
    EXPECT_EQ(a.batch.points, b.batch.points) << name;
  }
}

TEST(Loop, NinetyEvaluationsAndMonotoneBest) {
  const Domain domain = Domain::box({{0.0, 11.0}});
  const Objective obj("toy", domain, Direction::minimize, -7.9167274, neg_xsinx);
  GpBatchStrategy s(StrategyKind::kmbbo, {});
  const RunRecord run = run_bo(obj, s, {8, 10, 10}, 5);
  ASSERT_FALSE(run.failed) << run.failure;
  EXPECT_EQ(run.data.size(), 90u);
  double prev = run.initial_best;
  for (const auto& e : run.epochs) {
    EXPECT_LE(e.best_so_far, prev);
    EXPECT_GT(e.wall_seconds, 0.0);
    EXPECT_GE(*e.regret, 0.0);
    prev = e.best_so_far;
  }
}
