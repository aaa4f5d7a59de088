#include "batchbo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace batchbo {

double normal_pdf(double z) { return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi); }

double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::numbers::sqrt2); }

double expected_improvement(double mean, double sigma, double incumbent) {
  const double improvement = mean - incumbent;
  if (sigma < kDegenerateSigma) return std::max(improvement, 0.0);
  const double g = improvement / sigma;
  return std::max(0.0, improvement * normal_cdf(g) + sigma * normal_pdf(g));
}

double expected_improvement(const AcquisitionContext& ctx, const Vector& x) {
  const Prediction p = ctx.gp.predict(x);
  return expected_improvement(p.mean, std::sqrt(p.variance), ctx.incumbent);
}

std::vector<double> ei_surface(const AcquisitionContext& ctx, const Matrix& points) {
  std::vector<double> out(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    out[static_cast<std::size_t>(i)] = expected_improvement(ctx, points.row(i).transpose());
  }
  return out;
}

}  // namespace batchbo
