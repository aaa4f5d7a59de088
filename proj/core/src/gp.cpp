#include "batchbo/gp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <optional>

#include "batchbo/errors.hpp"

namespace batchbo {
namespace {

// Log-space box for the hyperparameter search (working coordinates).
constexpr double kMinSignal = 1e-3;
constexpr double kMaxSignal = 1e3;
constexpr double kMinLengthscale = 1e-3;
constexpr double kMaxLengthscale = 1e3;
constexpr double kMinFitNoise = 1e-8;
constexpr double kMaxFitNoise = 1.0;

Matrix signal_gram(const Matrix& X, const GpHyperparams& hp) {
  const Eigen::Index n = X.rows();
  Matrix K(n, n);
  const Eigen::ArrayXd inv_l = hp.lengthscales.array().inverse();
  for (Eigen::Index i = 0; i < n; ++i) {
    K(i, i) = hp.signal_variance;
    for (Eigen::Index j = 0; j < i; ++j) {
      const double r2 = ((X.row(i) - X.row(j)).transpose().array() * inv_l).square().sum();
      K(i, j) = K(j, i) = hp.signal_variance * std::exp(-0.5 * r2);
    }
  }
  return K;
}

/// Cholesky of K + (noise + jitter) I, climbing the jitter ladder on failure.
std::optional<std::pair<Eigen::LLT<Matrix>, double>> factorize(const Matrix& K_signal, double noise, double scale) {
  double jitter = 0.0;
  while (true) {
    Matrix K = K_signal;
    K.diagonal().array() += noise + jitter;
    Eigen::LLT<Matrix> llt(K);
    if (llt.info() == Eigen::Success && (llt.matrixLLT().diagonal().array() > 0.0).all()) {
      return std::make_pair(std::move(llt), jitter);
    }
    if (jitter == 0.0) {
      jitter = kJitterFloor * scale;
    } else {
      jitter *= 10.0;
    }
    if (jitter > kJitterCeiling * scale * (1.0 + 1e-9)) return std::nullopt;
  }
}

Vector pack(const GpHyperparams& hp) {
  const Eigen::Index d = hp.lengthscales.size();
  Vector theta(d + 2);
  theta[0] = std::log(hp.signal_variance);
  theta.segment(1, d) = hp.lengthscales.array().log();
  theta[d + 1] = std::log(hp.noise_variance);
  return theta;
}

GpHyperparams unpack(const Vector& theta) {
  const Eigen::Index d = theta.size() - 2;
  GpHyperparams hp;
  hp.signal_variance = std::exp(theta[0]);
  hp.lengthscales = theta.segment(1, d).array().exp();
  hp.noise_variance = std::exp(theta[d + 1]);
  return hp;
}

std::pair<Vector, Vector> log_bounds(Eigen::Index d) {
  Vector lo(d + 2), hi(d + 2);
  lo[0] = std::log(kMinSignal);
  hi[0] = std::log(kMaxSignal);
  lo.segment(1, d).setConstant(std::log(kMinLengthscale));
  hi.segment(1, d).setConstant(std::log(kMaxLengthscale));
  lo[d + 1] = std::log(kMinFitNoise);
  hi[d + 1] = std::log(kMaxFitNoise);
  return {lo, hi};
}

Vector clamp(const Vector& v, const Vector& lo, const Vector& hi) { return v.cwiseMax(lo).cwiseMin(hi); }

struct Ascent {
  Vector theta;
  double value;
};

/// Projected gradient ascent with a backtracking (Armijo) line search.
std::optional<Ascent> ascend(const Matrix& X, const Vector& y, Vector theta, int max_iters) {
  const auto [lo, hi] = log_bounds(X.cols());
  theta = clamp(theta, lo, hi);

  auto evaluate = [&](const Vector& t) -> std::optional<LmlResult> {
    try {
      return log_marginal_likelihood(X, y, unpack(t), true);
    } catch (const FitError&) {
      return std::nullopt;
    }
  };

  auto current = evaluate(theta);
  if (!current || !std::isfinite(current->value)) return std::nullopt;

  double step = 0.1;
  for (int it = 0; it < max_iters; ++it) {
    Vector g = current->gradient;
    // Zero components that push against an active bound.
    for (Eigen::Index i = 0; i < g.size(); ++i) {
      if ((theta[i] <= lo[i] && g[i] < 0.0) || (theta[i] >= hi[i] && g[i] > 0.0)) g[i] = 0.0;
    }
    const double gnorm = g.norm();
    if (gnorm < 1e-6) break;
    Vector dir = g / std::max(1.0, gnorm);

    bool accepted = false;
    while (step > 1e-10) {
      const Vector candidate = clamp(theta + step * dir, lo, hi);
      auto trial = evaluate(candidate);
      if (trial && std::isfinite(trial->value) &&
          trial->value >= current->value + 1e-4 * current->gradient.dot(candidate - theta)) {
        const double gain = trial->value - current->value;
        theta = candidate;
        current = std::move(trial);
        step = std::min(step * 2.0, 10.0);
        accepted = true;
        if (gain < 1e-10 * (1.0 + std::abs(current->value))) it = max_iters;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  return Ascent{theta, current->value};
}

}  // namespace

double kernel_eval(const GpHyperparams& hp, const Vector& x, const Vector& x2) {
  if (x.size() != x2.size() || x.size() != hp.lengthscales.size()) {
    throw ShapeError("kernel_eval: dimension mismatch");
  }
  const double r2 = ((x - x2).array() / hp.lengthscales.array()).square().sum();
  return hp.signal_variance * std::exp(-0.5 * r2);
}

LmlResult log_marginal_likelihood(const Matrix& X, const Vector& y, const GpHyperparams& hp, bool with_gradient) {
  if (X.rows() != y.size()) throw ShapeError("log_marginal_likelihood: X and y disagree");
  if (X.cols() != hp.lengthscales.size()) throw ShapeError("log_marginal_likelihood: lengthscale count");
  const Eigen::Index n = X.rows();
  const Eigen::Index d = X.cols();
  const Matrix K_signal = signal_gram(X, hp);
  auto fac = factorize(K_signal, hp.noise_variance, hp.signal_variance);
  if (!fac) throw FitError("Gram matrix is not positive definite after jitter escalation");
  const auto& llt = fac->first;

  const Vector alpha = llt.solve(y);
  const double log_det_half = llt.matrixLLT().diagonal().array().log().sum();
  LmlResult out;
  out.value = -0.5 * y.dot(alpha) - log_det_half - 0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  if (!with_gradient) return out;

  // W = alpha alpha^T - K^-1; dL/dtheta_j = 1/2 tr(W dK_j).
  Matrix W = alpha * alpha.transpose() - llt.solve(Matrix::Identity(n, n));
  out.gradient.resize(d + 2);
  out.gradient[0] = 0.5 * (W.array() * K_signal.array()).sum();
  for (Eigen::Index k = 0; k < d; ++k) {
    const double inv_l2 = 1.0 / (hp.lengthscales[k] * hp.lengthscales[k]);
    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      for (Eigen::Index j = 0; j < i; ++j) {
        const double diff = X(i, k) - X(j, k);
        acc += W(i, j) * K_signal(i, j) * diff * diff * inv_l2;
      }
    }
    out.gradient[k + 1] = acc;  // symmetric off-diagonal pairs: 2 * 1/2
  }
  out.gradient[d + 1] = 0.5 * hp.noise_variance * W.trace();
  return out;
}

GpPosterior GpPosterior::condition(const Dataset& data, const Domain& domain, GpHyperparams hp,
                                   const GpOptions& options) {
  if (data.empty()) throw ShapeError("cannot condition a GP on an empty dataset");
  if (data.dim() != domain.dim()) throw ShapeError("dataset and domain dimensions differ");
  if (static_cast<std::size_t>(hp.lengthscales.size()) != domain.dim()) {
    throw ShapeError("lengthscale count must equal the domain dimension");
  }
  if (!(hp.signal_variance > 0.0) || !(hp.lengthscales.array() > 0.0).all()) {
    throw ParameterError("signal variance and lengthscales must be positive");
  }
  hp.noise_variance = std::max(hp.noise_variance, kJitterFloor);

  GpPosterior gp;
  gp.data_ = data;
  const Eigen::Index d = static_cast<Eigen::Index>(domain.dim());
  gp.offset_ = Vector::Zero(d);
  gp.scale_ = Vector::Ones(d);
  if (options.scale_inputs) {
    for (Eigen::Index j = 0; j < d; ++j) {
      const Bound& b = domain.extent()[static_cast<std::size_t>(j)];
      gp.offset_[j] = b.lo;
      gp.scale_[j] = b.width() > 0.0 ? b.width() : 1.0;
    }
  }
  const Vector scores = data.scores();
  if (options.standardize) {
    gp.y_mean_ = scores.mean();
    const double var = (scores.array() - gp.y_mean_).square().mean();
    gp.y_scale_ = var > 1e-24 ? std::sqrt(var) : 1.0;
  }
  const Vector y = (scores.array() - gp.y_mean_) / gp.y_scale_;

  gp.X_.resize(static_cast<Eigen::Index>(data.size()), d);
  for (std::size_t i = 0; i < data.size(); ++i) {
    gp.X_.row(static_cast<Eigen::Index>(i)) = gp.to_working(data.points()[i]).transpose();
  }

  const Matrix K_signal = signal_gram(gp.X_, hp);
  auto fac = factorize(K_signal, hp.noise_variance, hp.signal_variance);
  if (!fac) throw FitError("Gram matrix is not positive definite after jitter escalation");
  gp.llt_ = std::move(fac->first);
  gp.jitter_ = fac->second;
  gp.hp_ = std::move(hp);
  gp.alpha_ = gp.llt_.solve(y);
  gp.lml_ = -0.5 * y.dot(gp.alpha_) - gp.llt_.matrixLLT().diagonal().array().log().sum() -
            0.5 * static_cast<double>(y.size()) * std::log(2.0 * std::numbers::pi);
  return gp;
}

Vector GpPosterior::to_working(const Vector& x) const {
  if (x.size() != offset_.size()) throw ShapeError("GP input has the wrong dimension");
  return (x - offset_).cwiseQuotient(scale_);
}

Vector GpPosterior::cross_kernel(const Vector& u) const {
  const Eigen::Index n = X_.rows();
  Vector k(n);
  const Eigen::ArrayXd inv_l = hp_.lengthscales.array().inverse();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double r2 = ((X_.row(i).transpose() - u).array() * inv_l).square().sum();
    k[i] = hp_.signal_variance * std::exp(-0.5 * r2);
  }
  return k;
}

Prediction GpPosterior::predict(const Vector& x) const {
  const Vector u = to_working(x);
  const Vector k = cross_kernel(u);
  const double mean_w = k.dot(alpha_);
  const Vector v = llt_.matrixL().solve(k);
  const double var_w = std::max(0.0, hp_.signal_variance + hp_.noise_variance - v.squaredNorm());
  return {y_mean_ + y_scale_ * mean_w, y_scale_ * y_scale_ * var_w};
}

double GpPosterior::predict_mean(const Vector& x) const {
  return y_mean_ + y_scale_ * cross_kernel(to_working(x)).dot(alpha_);
}

Vector GpPosterior::mean(const Matrix& points) const {
  Vector m(points.rows());
  for (Eigen::Index i = 0; i < points.rows(); ++i) m[i] = predict_mean(points.row(i).transpose());
  return m;
}

Matrix GpPosterior::covariance(const Matrix& points) const {
  const Eigen::Index m = points.rows();
  Matrix U(m, points.cols());
  for (Eigen::Index i = 0; i < m; ++i) U.row(i) = to_working(points.row(i).transpose()).transpose();
  Matrix Kx(X_.rows(), m);
  for (Eigen::Index i = 0; i < m; ++i) Kx.col(i) = cross_kernel(U.row(i).transpose());
  const Matrix V = llt_.matrixL().solve(Kx);
  Matrix C = signal_gram(U, hp_);
  C.noalias() -= V.transpose() * V;
  C.diagonal().array() += hp_.noise_variance;
  // Exact symmetry.
  C = 0.5 * (C + C.transpose()).eval();
  return C * (y_scale_ * y_scale_);
}

Vector GpPosterior::lengthscales_in_domain_units() const { return hp_.lengthscales.cwiseProduct(scale_); }

GpPosterior fit_gp(const Dataset& data, const Domain& domain, const GpOptions& options, std::uint64_t seed) {
  if (data.size() < 2) throw ParameterError("fit_gp needs at least two observations");
  const Eigen::Index d = static_cast<Eigen::Index>(domain.dim());

  // Condition once with placeholder hyperparameters to obtain working coordinates.
  GpHyperparams probe;
  probe.lengthscales = Vector::Ones(d);
  probe.noise_variance = 1e-2;
  const GpPosterior base = GpPosterior::condition(data, domain, probe, options);
  const Matrix& X = base.X_;
  const Vector y = (data.scores().array() - base.y_mean_) / base.y_scale_;

  double var_y = (y.array() - y.mean()).square().mean();
  if (!(var_y > 1e-12)) var_y = 1.0;

  GpHyperparams init;
  init.signal_variance = var_y;
  init.lengthscales.resize(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    const double width = options.scale_inputs ? 1.0 : domain.extent()[static_cast<std::size_t>(j)].width();
    init.lengthscales[j] = (width > 0.0 ? width : 1.0) / 4.0;
  }
  init.noise_variance = std::max(1e-6 * var_y, kMinFitNoise);

  Rng rng = make_rng(seed, 0x6770);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::optional<Ascent> best;
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    Vector theta = pack(init);
    if (r > 0) {
      theta[0] += std::log(0.25) + unit(rng) * std::log(16.0);
      // Lengthscales log-uniform in [0.05, 2] domain widths.
      for (Eigen::Index j = 0; j < d; ++j) {
        theta[j + 1] = std::log(4.0 * init.lengthscales[j]) + std::log(0.05) + unit(rng) * std::log(40.0);
      }
      theta[d + 1] = std::log(init.noise_variance) + unit(rng) * std::log(1e4);
    }
    auto result = ascend(X, y, theta, options.max_iters);
    if (result && (!best || result->value > best->value)) best = std::move(result);
  }
  if (!best) throw FitError("GP fit failed: no initialization produced a factorizable Gram matrix");
  return GpPosterior::condition(data, domain, unpack(best->theta), options);
}

PosteriorSampler::PosteriorSampler(const GpPosterior& gp, const Matrix& points) {
  if (points.rows() == 0) throw ShapeError("sample_posterior needs at least one point");
  mean_ = gp.mean(points);
  const Matrix C = gp.covariance(points);
  const double scale = std::max(C.diagonal().mean(), 1e-300);
  double jitter = 0.0;
  while (true) {
    Matrix A = C;
    A.diagonal().array() += jitter;
    Eigen::LLT<Matrix> llt(A);
    if (llt.info() == Eigen::Success) {
      chol_ = llt.matrixL();
      return;
    }
    jitter = jitter == 0.0 ? kJitterFloor * scale : jitter * 10.0;
    if (jitter > kJitterCeiling * scale * (1.0 + 1e-9)) {
      throw SamplingError("joint posterior covariance is not positive definite after jitter escalation");
    }
  }
}

Vector PosteriorSampler::draw(Rng& rng) const {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vector z(mean_.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = gauss(rng);
  return mean_ + chol_.triangularView<Eigen::Lower>() * z;
}

Matrix sample_posterior(const GpPosterior& gp, const Matrix& points, std::size_t n_draws, std::uint64_t seed) {
  const PosteriorSampler sampler(gp, points);
  Rng rng = make_rng(seed, 0x5a4d);
  Matrix out(static_cast<Eigen::Index>(n_draws), points.rows());
  for (std::size_t i = 0; i < n_draws; ++i) out.row(static_cast<Eigen::Index>(i)) = sampler.draw(rng).transpose();
  return out;
}

}  // namespace batchbo
