#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "batchbo/acquisition.hpp"

using namespace batchbo;

namespace {

struct McEstimate {
  double mean;
  double stderr_;
};

McEstimate mc_ei(double mu, double sigma, double best, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n01;
  double s = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double imp = std::max(mu + sigma * n01(rng) - best, 0.0);
    s += imp;
    s2 += imp * imp;
  }
  const double m = s / n;
  return {m, std::sqrt((s2 / n - m * m) / n)};
}

GpPosterior toy_gp(const Domain& domain) {
  Dataset data(Direction::maximize);
  Rng rng = make_rng(12, 0);
  for (int i = 0; i < 8; ++i) {
    const Vector x = domain.sample_uniform(rng);
    data.append(x, std::sin(3 * x[0]) + std::cos(2 * x[1]));
  }
  GpHyperparams hp;
  hp.signal_variance = 1.0;
  hp.lengthscales = Vector::Constant(2, 0.3);
  hp.noise_variance = kJitterFloor;
  return GpPosterior::condition(data, domain, hp);
}

}  // namespace

TEST(ExpectedImprovement, AtIncumbentEqualsPhiZero) {
  EXPECT_NEAR(expected_improvement(0.7, 1.0, 0.7), 0.398942280401, 1e-12);
  const auto mc = mc_ei(0.7, 1.0, 0.7, 1000000, 1);
  EXPECT_NEAR(expected_improvement(0.7, 1.0, 0.7), mc.mean, 1e-3);
}

TEST(ExpectedImprovement, DegenerateSigma) {
  EXPECT_EQ(expected_improvement(0.0, 0.0, 0.5), 0.0);
  EXPECT_EQ(expected_improvement(1.5, 0.0, 0.5), 1.0);
  EXPECT_EQ(expected_improvement(1.5, 1e-13, 0.5), 1.0);
}

TEST(ExpectedImprovement, MonotoneInMean) {
  double prev = -1.0;
  for (double mu = -5.0; mu <= 5.0; mu += 0.05) {
    const double ei = expected_improvement(mu, 0.8, 0.0);
    EXPECT_GE(ei, prev);
    EXPECT_GE(ei, 0.0);
    prev = ei;
  }
}

TEST(ExpectedImprovement, NonIncreasingAsSigmaShrinksAtIncumbent) {
  double prev = 1e300;
  for (double sigma = 3.0; sigma > 1e-6; sigma *= 0.9) {
    const double ei = expected_improvement(1.0, sigma, 1.0);
    EXPECT_LE(ei, prev);
    prev = ei;
  }
}

TEST(ExpectedImprovement, ClosedFormMatchesMonteCarlo) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> u(-2.0, 2.0), s(0.1, 2.0);
  for (int i = 0; i < 20; ++i) {
    const double mu = u(rng), sigma = s(rng), best = u(rng);
    const auto mc = mc_ei(mu, sigma, best, 1000000, 100 + i);
    EXPECT_LE(std::abs(expected_improvement(mu, sigma, best) - mc.mean), 3.0 * mc.stderr_ + 1e-12) << i;
  }
}

TEST(EiSurface, MatchesScalarLoopExactly) {
  const Domain domain = Domain::box({{0.0, 2.0}, {0.0, 2.0}});
  const GpPosterior gp = toy_gp(domain);
  const auto ctx = AcquisitionContext::from_posterior(gp);
  Rng rng = make_rng(3, 0);
  const Matrix pts = domain.sample_uniform(1000, rng);
  const auto surface = ei_surface(ctx, pts);
  ASSERT_EQ(surface.size(), 1000u);
  double max_diff = 0.0;
  for (Eigen::Index i = 0; i < pts.rows(); ++i) {
    max_diff = std::max(max_diff, std::abs(surface[static_cast<std::size_t>(i)] -
                                           expected_improvement(ctx, pts.row(i).transpose())));
  }
  EXPECT_EQ(max_diff, 0.0);
  const auto one = ei_surface(ctx, pts.topRows(1));
  EXPECT_EQ(one[0], expected_improvement(ctx, pts.row(0).transpose()));
}

TEST(EiSurface, NearZeroAtObservedPoints) {
  const Domain domain = Domain::box({{0.0, 2.0}, {0.0, 2.0}});
  const GpPosterior gp = toy_gp(domain);
  const auto ctx = AcquisitionContext::from_posterior(gp);
  for (const auto& ei : ei_surface(ctx, gp.data().point_matrix())) {
    EXPECT_LT(ei, 1e-4 * std::sqrt(gp.prior_variance()));
  }
}

TEST(AcquisitionContext, IncumbentIsBestScore) {
  const Domain domain = Domain::box({{0.0, 1.0}});
  Dataset data(Direction::minimize);
  data.append(Vector::Constant(1, 0.1), 3.0);
  data.append(Vector::Constant(1, 0.9), -2.0);
  GpHyperparams hp;
  hp.lengthscales = Vector::Constant(1, 0.5);
  const GpPosterior gp = GpPosterior::condition(data, domain, hp);
  EXPECT_EQ(AcquisitionContext::from_posterior(gp).incumbent, 2.0);
}
