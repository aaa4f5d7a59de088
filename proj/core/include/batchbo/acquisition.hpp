#pragma once

#include <vector>

#include "batchbo/gp.hpp"

namespace batchbo {

/// Posterior scale below which EI degenerates to max(mu - f*, 0).
inline constexpr double kDegenerateSigma = 1e-12;

double normal_pdf(double z);
double normal_cdf(double z);

/// Closed-form expected improvement over the incumbent (maximization):
///   EI = (mu - f*) Phi(g) + sigma phi(g),  g = (mu - f*) / sigma.
/// This is the Mockus/Jones form; note the scale in g is sigma, not sigma^2.
double expected_improvement(double mean, double sigma, double incumbent);

/// The posterior plus the best observed score f*.
struct AcquisitionContext {
  const GpPosterior& gp;
  double incumbent;

  /// Context whose incumbent is the GP training data's best score.
  static AcquisitionContext from_posterior(const GpPosterior& gp) { return {gp, gp.data().best_score()}; }
};

double expected_improvement(const AcquisitionContext& ctx, const Vector& x);

/// EI at each row of points; bitwise equal to calling expected_improvement per row.
std::vector<double> ei_surface(const AcquisitionContext& ctx, const Matrix& points);

}  // namespace batchbo
