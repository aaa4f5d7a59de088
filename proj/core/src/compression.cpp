#include "batchbo/compression.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/SVD>

#include "batchbo/errors.hpp"

namespace batchbo {
namespace {

CompressionModel identity_model(std::size_t n) {
  CompressionModel m;
  m.original_dim = m.compressed_dim = n;
  m.basis = Matrix::Identity(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  m.incoherence_estimate = std::sqrt(static_cast<double>(n));
  return m;
}

}  // namespace

CompressionModel fit_compression(const Matrix& samples, double epsilon, std::uint64_t seed,
                                 const CompressionOptions& options) {
  (void)seed;  // the fit is deterministic in the samples
  if (samples.rows() < 2) throw ParameterError("fit_compression needs at least two samples");
  if (!(epsilon > 0.0 && epsilon < 1.0)) throw ParameterError("fit_compression needs epsilon in (0, 1)");
  const Eigen::Index n = samples.rows();
  const Eigen::Index N = samples.cols();

  const Eigen::BDCSVD<Matrix> svd(samples, Eigen::ComputeFullV);
  const Matrix& P = svd.matrixV();  // N x N, columns orthonormal

  // Sparse codes of every sample in P.
  Vector energy = Vector::Zero(N);
  std::vector<std::size_t> nonzeros(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector x = samples.row(i).transpose();
    const double scale = (P.transpose() * x).lpNorm<Eigen::Infinity>();
    Vector code = Vector::Zero(N);
    if (scale > 0.0) {
      TwistOptions twist = options.twist;
      twist.lambda_min = 1.0;  // P is orthonormal
      code = twist_solve(x, P, options.lambda_scale * scale, twist).x;
    }
    energy += code.cwiseAbs2();
    nonzeros[static_cast<std::size_t>(i)] = static_cast<std::size_t>((code.array() != 0.0).count());
  }

  std::vector<Eigen::Index> order(static_cast<std::size_t>(N));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return energy[a] > energy[b]; });

  // Residual of each sample after removing the ranked directions one at a time.
  const Matrix Z = samples * P;
  const Vector norms = samples.rowwise().norm();
  Matrix residual = samples;
  std::size_t m = 0;
  bool found = false;
  for (Eigen::Index j = 0; j < N && !found; ++j) {
    const Eigen::Index c = order[static_cast<std::size_t>(j)];
    residual.noalias() -= Z.col(c) * P.col(c).transpose();
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (norms[i] > 0.0) total += residual.row(i).norm() / norms[i];
    }
    if (total / static_cast<double>(n) <= epsilon) {
      m = static_cast<std::size_t>(j + 1);
      found = true;
    }
  }

  CompressionModel model;
  if (!found) {
    model = identity_model(static_cast<std::size_t>(N));
    model.identity_fallback = true;
  } else {
    model.original_dim = static_cast<std::size_t>(N);
    model.compressed_dim = m;
    model.basis.resize(static_cast<Eigen::Index>(m), N);
    for (std::size_t r = 0; r < m; ++r) model.basis.row(static_cast<Eigen::Index>(r)) = P.col(order[r]).transpose();
    model.incoherence_estimate = std::sqrt(static_cast<double>(N)) * model.basis.cwiseAbs().maxCoeff();
  }
  model.epsilon = epsilon;
  model.n_comp_samples = static_cast<std::size_t>(n);
  std::vector<std::size_t> sorted = nonzeros;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(sorted.size() / 2), sorted.end());
  model.sparsity_estimate = sorted[sorted.size() / 2];
  const double total_energy = energy.sum();
  for (Eigen::Index j = 0; j < N; ++j) {
    model.energy_spectrum.push_back(total_energy > 0.0 ? energy[order[static_cast<std::size_t>(j)]] / total_energy : 0.0);
  }
  model.calibration_error = reconstruction_error(model, samples);
  return model;
}

Vector compress_point(const CompressionModel& model, const Vector& x) {
  if (static_cast<std::size_t>(x.size()) != model.original_dim) throw ShapeError("compress_point: dimension");
  return model.basis * x;
}

Vector decompress_point(const CompressionModel& model, const Vector& z) {
  if (static_cast<std::size_t>(z.size()) != model.compressed_dim) throw ShapeError("decompress_point: dimension");
  return model.basis.transpose() * z;
}

double reconstruction_error(const CompressionModel& model, const Matrix& samples) {
  double total = 0.0;
  for (Eigen::Index i = 0; i < samples.rows(); ++i) {
    const Vector x = samples.row(i).transpose();
    const double norm = x.norm();
    if (norm > 0.0) total += (x - decompress_point(model, compress_point(model, x))).norm() / norm;
  }
  return total / static_cast<double>(samples.rows());
}

double measurement_scale(const CompressionModel& model) {
  const double log_n = std::log(static_cast<double>(model.original_dim));
  return model.incoherence_estimate * model.incoherence_estimate * static_cast<double>(model.sparsity_estimate) *
         log_n * log_n;
}

CsKmbboStrategy::CsKmbboStrategy(StrategyOptions options, CsOptions cs)
    : options_(std::move(options)), cs_(std::move(cs)) {}

void CsKmbboStrategy::prepare(const Objective& objective, std::uint64_t seed) {
  const Domain& domain = objective.domain();
  Rng rng = make_rng(seed, 0xc5);
  const Matrix samples = domain.sample_uniform(cs_.n_comp, rng);
  model_ = fit_compression(samples, cs_.epsilon, derive_seed(seed, 1), cs_.compression);

  const auto m = static_cast<Eigen::Index>(model_->compressed_dim);
  if (domain.is_discrete()) {
    // Row by row so that compressed dataset points match pool rows exactly.
    Matrix rows(static_cast<Eigen::Index>(domain.size()), m);
    std::unordered_multimap<std::size_t, Eigen::Index> seen;
    Eigen::Index count = 0;
    for (Eigen::Index r = 0; r < domain.candidates().rows(); ++r) {
      const Vector z = compress_point(*model_, domain.candidates().row(r).transpose());
      const auto [first, last] = seen.equal_range(hash_point(z));
      bool dup = false;
      for (auto it = first; it != last && !dup; ++it) dup = (rows.row(it->second).transpose().array() == z.array()).all();
      if (dup) continue;
      seen.emplace(hash_point(z), count);
      rows.row(count++) = z.transpose();
    }
    rows.conservativeResize(count, Eigen::NoChange);
    compressed_domain_ = Domain::pool(std::move(rows));
  } else {
    std::vector<Bound> box;
    for (Eigen::Index i = 0; i < m; ++i) {
      double lo = 0.0, hi = 0.0;
      for (std::size_t j = 0; j < domain.dim(); ++j) {
        const double w = model_->basis(i, static_cast<Eigen::Index>(j));
        lo += std::min(w * domain.bounds()[j].lo, w * domain.bounds()[j].hi);
        hi += std::max(w * domain.bounds()[j].lo, w * domain.bounds()[j].hi);
      }
      box.push_back({lo, hi});
    }
    compressed_domain_ = Domain::box(std::move(box));
  }
}

Proposal CsKmbboStrategy::propose(const Objective& objective, const Dataset& data, std::size_t k, std::uint64_t seed) {
  if (!model_) throw StrategyError("cs-kmbbo used before prepare()");
  const Domain& domain = objective.domain();
  Dataset compressed(data.direction());
  for (std::size_t i = 0; i < data.size(); ++i) compressed.append(compress_point(*model_, data.points()[i]), data.values()[i]);

  const GpPosterior gp = fit_gp(compressed, *compressed_domain_, options_.gp, derive_seed(seed, 0));
  StrategyOptions opts = options_;
  if (!domain.is_discrete()) {
    // Only compressed points whose pre-image lies in the box carry acquisition mass.
    const CompressionModel* model = &*model_;
    const Domain* original = &domain;
    opts.feasible = [model, original](const Vector& z) {
      const Vector x = decompress_point(*model, z);
      for (std::size_t j = 0; j < original->dim(); ++j) {
        const Bound& b = original->bounds()[j];
        const double tol = 1e-9 * b.width();
        const double v = x[static_cast<Eigen::Index>(j)];
        if (v < b.lo - tol || v > b.hi + tol) return false;
      }
      return true;
    };
  }

  Proposal out;
  out.gp = GpSnapshot::of(gp);
  Batch& batch = out.batch;
  batch.strategy = "cs-kmbbo";
  if (model_->identity_fallback) batch.flags.push_back("compression_identity_fallback");
  const Matrix centroids =
      kmbbo_centroids(gp, compressed, *compressed_domain_, k, options_.n_slice, derive_seed(seed, 1), opts, nullptr,
                      &batch.flags);
  batch.points.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(domain.dim()));
  for (std::size_t i = 0; i < k; ++i) {
    Vector x = decompress_point(*model_, centroids.row(static_cast<Eigen::Index>(i)).transpose());
    if (!domain.is_discrete()) x = domain.clip(x);
    batch.points.row(static_cast<Eigen::Index>(i)) = x.transpose();
  }
  batch.provenance.assign(k, Provenance::centroid);
  batch.snapped.assign(k, false);
  if (domain.is_discrete()) {
    batch.pool_rows = snap_to_candidates(batch.points, domain, evaluated_rows(data, domain));
    for (std::size_t i = 0; i < k; ++i) {
      batch.points.row(static_cast<Eigen::Index>(i)) = domain.candidates().row(static_cast<Eigen::Index>(batch.pool_rows[i]));
      batch.snapped[i] = true;
    }
  }
  return out;
}

std::optional<CompressionSummary> CsKmbboStrategy::compression() const {
  if (!model_) return std::nullopt;
  CompressionSummary s;
  s.original_dim = model_->original_dim;
  s.compressed_dim = model_->compressed_dim;
  s.sparsity_estimate = model_->sparsity_estimate;
  s.incoherence_estimate = model_->incoherence_estimate;
  s.epsilon = model_->epsilon;
  s.calibration_error = model_->calibration_error;
  s.energy_spectrum = model_->energy_spectrum;
  s.identity_fallback = model_->identity_fallback;
  return s;
}

RunRecord cs_kmbbo_run(const Objective& objective, std::size_t k, std::size_t n_epochs, std::size_t n_s,
                       double epsilon, std::uint64_t seed, std::size_t n_init, const StrategyOptions& options) {
  StrategyOptions opts = options;
  opts.n_slice = n_s;
  CsOptions cs;
  cs.epsilon = epsilon;
  CsKmbboStrategy strategy(opts, cs);
  return run_bo(objective, strategy, LoopConfig{k, n_epochs, n_init}, seed);
}

}  // namespace batchbo
