#pragma once

#include <cstdint>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "batchbo/domain.hpp"

namespace batchbo {

/// Smallest noise variance a posterior may carry, and the first rung of the
/// jitter ladder.
inline constexpr double kJitterFloor = 1e-10;
/// Largest diagonal jitter tried before a factorization is declared failed.
inline constexpr double kJitterCeiling = 1e-4;

/// SE-ARD hyperparameters. signal_variance is k(x, x); lengthscales are in the
/// posterior's working coordinates (unit box when inputs are scaled).
struct GpHyperparams {
  double signal_variance = 1.0;
  Vector lengthscales;
  double noise_variance = kJitterFloor;
};

/// k(x, x') = signal_variance * exp(-1/2 * sum_d (x_d - x'_d)^2 / l_d^2).
double kernel_eval(const GpHyperparams& hp, const Vector& x, const Vector& x2);

struct GpOptions {
  int restarts = 5;
  int max_iters = 100;
  /// Standardize targets to zero mean and unit variance before fitting.
  bool standardize = true;
  /// Map inputs to the unit box spanned by the domain extent.
  bool scale_inputs = true;
};

struct LmlResult {
  double value = 0.0;
  /// d/d(log signal_variance, log l_1..l_d, log noise_variance).
  Vector gradient;
};

/// Log marginal likelihood of targets y at inputs X (rows) under hp, in the
/// coordinates given. Throws FitError when the Gram matrix cannot be factorized.
LmlResult log_marginal_likelihood(const Matrix& X, const Vector& y, const GpHyperparams& hp,
                                  bool with_gradient = true);

struct Prediction {
  double mean = 0.0;
  double variance = 0.0;
};

/// A conditioned Gaussian process. Immutable; predict is thread-safe.
class GpPosterior {
 public:
  /// Conditions on data with fixed hyperparameters (given in working coordinates).
  static GpPosterior condition(const Dataset& data, const Domain& domain, GpHyperparams hp,
                               const GpOptions& options = {});

  /// Predictive mean and variance of the (maximization-convention) score.
  /// Far from the data the variance tends to prior_variance().
  Prediction predict(const Vector& x) const;
  double predict_mean(const Vector& x) const;

  /// Joint predictive covariance at the given points (rows).
  Matrix covariance(const Matrix& points) const;
  Vector mean(const Matrix& points) const;

  const GpHyperparams& hyperparams() const { return hp_; }
  double log_marginal_likelihood() const { return lml_; }
  /// (signal_variance + noise_variance) in output units.
  double prior_variance() const { return (hp_.signal_variance + hp_.noise_variance) * y_scale_ * y_scale_; }
  /// Diagonal jitter that the factorization needed on top of the noise.
  double jitter() const { return jitter_; }
  /// Lengthscales expressed in domain units.
  Vector lengthscales_in_domain_units() const;

  const Dataset& data() const { return data_; }
  std::size_t dim() const { return static_cast<std::size_t>(offset_.size()); }

  Vector to_working(const Vector& x) const;

 private:
  friend GpPosterior fit_gp(const Dataset&, const Domain&, const GpOptions&, std::uint64_t);

  GpPosterior() = default;

  Vector cross_kernel(const Vector& u) const;

  Dataset data_;
  GpHyperparams hp_;
  Vector offset_;
  Vector scale_;
  double y_mean_ = 0.0;
  double y_scale_ = 1.0;
  Matrix X_;  // working coordinates
  Eigen::LLT<Matrix> llt_;
  Vector alpha_;
  double lml_ = 0.0;
  double jitter_ = 0.0;
};

/// Fits SE-ARD hyperparameters by gradient ascent on the log marginal
/// likelihood (log space, backtracking line search), keeping the best of
/// options.restarts initializations. The first initialization is deterministic:
/// lengthscale = domain width / 4, signal variance = var(y), noise = 1e-6 var(y).
GpPosterior fit_gp(const Dataset& data, const Domain& domain, const GpOptions& options, std::uint64_t seed);

/// Factorized joint posterior at a fixed point set; draws are joint samples.
class PosteriorSampler {
 public:
  PosteriorSampler(const GpPosterior& gp, const Matrix& points);

  Vector draw(Rng& rng) const;
  const Vector& mean() const { return mean_; }
  std::size_t size() const { return static_cast<std::size_t>(mean_.size()); }

 private:
  Vector mean_;
  Matrix chol_;
};

/// n_draws x |points| matrix of joint posterior draws, deterministic in seed.
Matrix sample_posterior(const GpPosterior& gp, const Matrix& points, std::size_t n_draws, std::uint64_t seed);

}  // namespace batchbo
