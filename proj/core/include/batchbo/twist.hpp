#pragma once

#include <vector>

#include "batchbo/domain.hpp"

namespace batchbo {

struct TwistOptions {
  int max_iters = 1000;
  /// Stop when the relative objective change falls below this.
  double tolerance = 1e-12;
  /// Lower bound on the normalized spectrum of M^T M used for the two-step
  /// weights. Non-positive means: estimate from M (1e-4 if M^T M is singular).
  double lambda_min = 0.0;
  /// Fall back to a plain IST step whenever a two-step update increases the objective.
  bool monotone = true;
  /// Least-squares refit of the coefficients on the recovered support.
  bool debias = false;
};

struct TwistResult {
  Vector x;
  /// 1/2 |y - M x|^2 + lambda |x|_1 after every iteration (before debiasing).
  std::vector<double> objective;
  int iterations = 0;
  bool step_halved = false;
};

/// Two-step iterative shrinkage/thresholding for
///   min_x 1/2 |y - M x|^2 + lambda |x|_1.
/// Iterates x+ = (1 - a) x- + (a - b) x + b Psi(x + M^T (y - M x) / s), where Psi is
/// soft thresholding at lambda / s and s = |M|_2^2. Throws SolverError on divergence.
TwistResult twist_solve(const Vector& y, const Matrix& M, double lambda, const TwistOptions& options = {});

double soft_threshold(double v, double t);
double lasso_objective(const Vector& y, const Matrix& M, const Vector& x, double lambda);

}  // namespace batchbo
