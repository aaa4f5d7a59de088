#include "batchbo/twist.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "batchbo/errors.hpp"

namespace batchbo {

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

double lasso_objective(const Vector& y, const Matrix& M, const Vector& x, double lambda) {
  return 0.5 * (y - M * x).squaredNorm() + lambda * x.lpNorm<1>();
}

TwistResult twist_solve(const Vector& y, const Matrix& M, double lambda, const TwistOptions& options) {
  if (!(lambda > 0.0)) throw ParameterError("twist_solve needs lambda > 0");
  if (M.rows() != y.size()) throw ShapeError("twist_solve: measurement map and data disagree");
  const Eigen::Index n = M.cols();

  const Matrix gram = M.transpose() * M;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double top = eig.eigenvalues().maxCoeff();
  TwistResult out;
  if (!(top > 0.0)) {
    out.x = Vector::Zero(n);
    out.objective.push_back(lasso_objective(y, M, out.x, lambda));
    return out;
  }
  double xi1 = options.lambda_min;
  if (!(xi1 > 0.0)) {
    const double bottom = eig.eigenvalues().minCoeff() / top;
    xi1 = bottom > 1e-4 ? bottom : 1e-4;
  }
  xi1 = std::min(xi1, 1.0);
  const double rho = (1.0 - std::sqrt(xi1)) / (1.0 + std::sqrt(xi1));
  const double a = 1.0 + rho * rho;
  const double b = 2.0 * a / (1.0 + xi1);

  const Vector Mty = M.transpose() * y;
  double s = top;
  auto F = [&](const Vector& x) { return lasso_objective(y, M, x, lambda); };

  for (int attempt = 0; attempt < 2; ++attempt) {
    auto shrink = [&](const Vector& x) {
      Vector v = x + (Mty - gram * x) / s;
      for (Eigen::Index i = 0; i < n; ++i) v[i] = soft_threshold(v[i], lambda / s);
      return v;
    };
    out.objective.clear();
    Vector prev = Vector::Zero(n);
    const double f0 = F(prev);
    Vector x = shrink(prev);
    double fx = F(x);
    out.objective.push_back(fx);
    bool diverged = false;
    int it = 1;
    for (; it < options.max_iters; ++it) {
      const Vector ist = shrink(x);
      Vector next = (1.0 - a) * prev + (a - b) * x + b * ist;
      double fn = F(next);
      if (options.monotone && fn > fx) {
        next = ist;
        fn = F(next);
      }
      if (!std::isfinite(fn) || fn > 10.0 * std::max(f0, 1e-300)) {
        diverged = true;
        break;
      }
      prev = std::move(x);
      x = std::move(next);
      const double change = std::abs(fx - fn);
      fx = fn;
      out.objective.push_back(fx);
      if (change <= options.tolerance * std::max(fx, 1e-300)) break;
    }
    if (diverged) {
      if (attempt == 0) {
        s *= 2.0;
        out.step_halved = true;
        continue;
      }
      throw SolverError("TwIST diverged after step-size halving");
    }
    out.iterations = it;
    out.x = std::move(x);
    break;
  }

  if (options.debias) {
    std::vector<Eigen::Index> support;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (out.x[i] != 0.0) support.push_back(i);
    }
    if (!support.empty() && static_cast<Eigen::Index>(support.size()) <= M.rows()) {
      Matrix Ms(M.rows(), static_cast<Eigen::Index>(support.size()));
      for (std::size_t j = 0; j < support.size(); ++j) Ms.col(static_cast<Eigen::Index>(j)) = M.col(support[j]);
      const Vector coef = Ms.colPivHouseholderQr().solve(y);
      out.x.setZero();
      for (std::size_t j = 0; j < support.size(); ++j) out.x[support[j]] = coef[static_cast<Eigen::Index>(j)];
    }
  }
  return out;
}

}  // namespace batchbo
