#include "batchbo/strategies.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "batchbo/errors.hpp"

namespace batchbo {
namespace {

struct CandidateSet {
  Matrix points;
  std::vector<std::size_t> rows;  // pool rows, empty for boxes
};

/// Uniform grid for boxes; unevaluated rows for pools, subsampled to cap when given.
CandidateSet candidate_set(const Domain& domain, const Dataset& data, std::size_t n_grid, Rng& rng,
                           std::size_t pool_cap = 0) {
  CandidateSet out;
  if (!domain.is_discrete()) {
    out.points = domain.sample_uniform(n_grid, rng);
    return out;
  }
  const auto evaluated = evaluated_rows(data, domain);
  for (std::size_t r = 0; r < domain.size(); ++r) {
    if (!evaluated[r]) out.rows.push_back(r);
  }
  if (pool_cap > 0 && out.rows.size() > pool_cap) {
    for (std::size_t i = 0; i < pool_cap; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, out.rows.size() - 1);
      std::swap(out.rows[i], out.rows[pick(rng)]);
    }
    out.rows.resize(pool_cap);
    std::sort(out.rows.begin(), out.rows.end());
  }
  out.points.resize(static_cast<Eigen::Index>(out.rows.size()), static_cast<Eigen::Index>(domain.dim()));
  for (std::size_t i = 0; i < out.rows.size(); ++i) {
    out.points.row(static_cast<Eigen::Index>(i)) = domain.candidates().row(static_cast<Eigen::Index>(out.rows[i]));
  }
  return out;
}

Batch make_batch(std::string strategy, std::size_t k, std::size_t dim) {
  Batch b;
  b.strategy = std::move(strategy);
  b.points.resize(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(dim));
  return b;
}

void require_unevaluated(const Domain& domain, const Dataset& data, std::size_t k) {
  if (!domain.is_discrete()) return;
  const auto evaluated = evaluated_rows(data, domain);
  const auto used = static_cast<std::size_t>(std::count(evaluated.begin(), evaluated.end(), true));
  if (domain.size() - used < k) throw ExhaustionError("pool has fewer unevaluated candidates than the batch size");
}

/// Index of the largest value among allowed entries (lowest index on ties).
std::optional<std::size_t> argmax_allowed(const std::vector<double>& values, const std::vector<bool>& blocked) {
  std::optional<std::size_t> best;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (blocked[i]) continue;
    if (!best || values[i] > values[*best]) best = i;
  }
  return best;
}

/// Greedy sequential builder shared by Constant Liar and Local Penalization on
/// pools: argmax of score over unevaluated, untaken rows.
std::size_t pool_argmax(const ScalarFn& score, const Domain& domain, const std::vector<bool>& blocked) {
  std::optional<std::size_t> best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::size_t r = 0; r < domain.size(); ++r) {
    if (blocked[r]) continue;
    const double v = score(domain.candidates().row(static_cast<Eigen::Index>(r)).transpose());
    if (!best || v > best_value) {
      best = r;
      best_value = v;
    }
  }
  if (!best) throw ExhaustionError("no unevaluated candidates remain");
  return *best;
}

}  // namespace

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::centroid: return "centroid";
    case Provenance::top_q: return "top-q";
    case Provenance::posterior_draw: return "posterior-draw";
    case Provenance::liar_step: return "liar-step";
    case Provenance::penalized_argmax: return "penalized-argmax";
    case Provenance::uniform_random: return "uniform-random";
  }
  return "unknown";
}

std::vector<bool> evaluated_rows(const Dataset& data, const Domain& domain) {
  std::vector<bool> mask(domain.size(), false);
  if (!domain.is_discrete()) return mask;
  for (const Vector& p : data.points()) {
    if (auto r = domain.find_row(p)) mask[*r] = true;
  }
  return mask;
}

std::vector<std::size_t> snap_to_candidates(const Matrix& points, const Domain& domain,
                                            const std::vector<bool>& excluded) {
  if (!domain.is_discrete()) throw ParameterError("snap_to_candidates needs a discrete domain");
  if (static_cast<std::size_t>(points.cols()) != domain.dim()) throw ShapeError("snap_to_candidates: dimension");
  std::vector<bool> taken = excluded;
  taken.resize(domain.size(), false);
  const auto available = static_cast<std::size_t>(std::count(taken.begin(), taken.end(), false));
  if (available < static_cast<std::size_t>(points.rows())) {
    throw ExhaustionError("fewer unevaluated candidates than points to snap");
  }
  const Matrix& rows = domain.candidates();
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < domain.size(); ++r) {
      if (taken[r]) continue;
      const double d = (rows.row(static_cast<Eigen::Index>(r)) - points.row(i)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = r;
      }
    }
    taken[best] = true;
    out.push_back(best);
  }
  return out;
}

Matrix kmbbo_centroids(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k,
                       std::size_t n_s, std::uint64_t seed, const StrategyOptions& options, KmbboTrace* trace,
                       std::vector<std::string>* flags) {
  if (k < 1) throw ParameterError("batch size must be >= 1");
  if (n_s < k) throw ParameterError("kmbbo needs at least k slice samples");
  const auto ctx = AcquisitionContext::from_posterior(gp);
  AcquisitionSurface acq = [&ctx](const Vector& x) { return expected_improvement(ctx, x); };
  std::vector<bool> evaluated;
  if (domain.is_discrete()) {
    evaluated = evaluated_rows(data, domain);
    acq = [&ctx, &domain, &evaluated](const Vector& x) {
      const auto r = domain.find_row(x);
      return r && evaluated[*r] ? 0.0 : expected_improvement(ctx, x);
    };
  }
  if (options.feasible) {
    acq = [inner = std::move(acq), &options](const Vector& x) { return options.feasible(x) ? inner(x) : 0.0; };
  }
  // EI is non-negative, so its floor is 0 without a global search.
  SliceSampleSet slices = bgss_sample_or_uniform(acq, domain, n_s, 0.0, derive_seed(seed, 1), options.slice);
  if (slices.uniform_fallback && flags) flags->push_back("slice_uniform_fallback");
  KMeansResult clusters = kmeans_fit(slices.samples, k, derive_seed(seed, 2), options.kmeans);
  if (clusters.degenerate && flags) flags->push_back("kmeans_degenerate");
  Matrix centroids = clusters.centroids;
  if (static_cast<std::size_t>(centroids.rows()) < k) {
    // Fewer distinct samples than k: pad with uniform draws so |batch| = k.
    Rng rng = make_rng(seed, 3);
    const Eigen::Index have = centroids.rows();
    centroids.conservativeResize(static_cast<Eigen::Index>(k), Eigen::NoChange);
    for (Eigen::Index i = have; i < static_cast<Eigen::Index>(k); ++i) {
      centroids.row(i) = domain.sample_uniform(rng).transpose();
    }
  }
  if (trace) {
    trace->slices = std::move(slices);
    trace->clusters = std::move(clusters);
  }
  return centroids;
}

Batch kmbbo_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k, std::size_t n_s,
                  std::uint64_t seed, const StrategyOptions& options, KmbboTrace* trace) {
  require_unevaluated(domain, data, k);
  Batch batch = make_batch("kmbbo", k, domain.dim());
  batch.points = kmbbo_centroids(gp, data, domain, k, n_s, seed, options, trace, &batch.flags);
  batch.provenance.assign(k, Provenance::centroid);
  batch.snapped.assign(k, false);
  if (domain.is_discrete()) {
    batch.pool_rows = snap_to_candidates(batch.points, domain, evaluated_rows(data, domain));
    for (std::size_t i = 0; i < k; ++i) {
      const auto row = domain.candidates().row(static_cast<Eigen::Index>(batch.pool_rows[i]));
      batch.snapped[i] = !(row == batch.points.row(static_cast<Eigen::Index>(i)));
      batch.points.row(static_cast<Eigen::Index>(i)) = row;
    }
  }
  return batch;
}

Vector ei_argmax(const AcquisitionContext& ctx, const Domain& domain, const std::vector<bool>& excluded,
                 std::uint64_t seed, const MultiStartOptions& options) {
  const ScalarFn ei = [&ctx](const Vector& x) { return expected_improvement(ctx, x); };
  if (domain.is_discrete()) {
    std::vector<bool> blocked = excluded;
    blocked.resize(domain.size(), false);
    return domain.candidates().row(static_cast<Eigen::Index>(pool_argmax(ei, domain, blocked))).transpose();
  }
  Rng rng = make_rng(seed, 0);
  return multistart_maximize(ei, domain, rng, options).x;
}

Batch naive_qei_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k,
                      std::size_t n_grid, std::uint64_t seed) {
  require_unevaluated(domain, data, k);
  Rng rng = make_rng(seed, 0);
  const CandidateSet cand = candidate_set(domain, data, n_grid, rng);
  if (static_cast<std::size_t>(cand.points.rows()) < k) throw ParameterError("candidate grid smaller than batch size");
  const auto ei = ei_surface(AcquisitionContext::from_posterior(gp), cand.points);
  std::vector<std::size_t> order(ei.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return ei[a] > ei[b]; });

  Batch batch = make_batch("qei", k, domain.dim());
  for (std::size_t i = 0; i < k; ++i) {
    batch.points.row(static_cast<Eigen::Index>(i)) = cand.points.row(static_cast<Eigen::Index>(order[i]));
    if (domain.is_discrete()) batch.pool_rows.push_back(cand.rows[order[i]]);
  }
  batch.provenance.assign(k, Provenance::top_q);
  batch.snapped.assign(k, false);
  return batch;
}

Batch thompson_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k,
                     std::size_t n_grid, std::uint64_t seed) {
  require_unevaluated(domain, data, k);
  Rng rng = make_rng(seed, 0);
  const CandidateSet cand = candidate_set(domain, data, n_grid, rng, n_grid);
  const auto n = static_cast<std::size_t>(cand.points.rows());
  if (n < k) throw ParameterError("candidate set smaller than batch size");
  const PosteriorSampler sampler(gp, cand.points);

  Batch batch = make_batch("thompson", k, domain.dim());
  std::vector<bool> chosen(n, false);
  Rng draw_rng = make_rng(seed, 1);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t pick = 0;
    bool found = false;
    Vector draw;
    for (int attempt = 0; attempt <= 10 && !found; ++attempt) {
      draw = sampler.draw(draw_rng);
      Eigen::Index arg;
      draw.maxCoeff(&arg);
      if (!chosen[static_cast<std::size_t>(arg)]) {
        pick = static_cast<std::size_t>(arg);
        found = true;
      }
    }
    if (!found) {
      std::vector<double> values(draw.data(), draw.data() + draw.size());
      pick = *argmax_allowed(values, chosen);
      batch.flags.push_back("thompson_next_best");
    }
    chosen[pick] = true;
    batch.points.row(static_cast<Eigen::Index>(i)) = cand.points.row(static_cast<Eigen::Index>(pick));
    if (domain.is_discrete()) batch.pool_rows.push_back(cand.rows[pick]);
  }
  batch.provenance.assign(k, Provenance::posterior_draw);
  batch.snapped.assign(k, false);
  return batch;
}

Batch constant_liar_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k,
                          std::uint64_t seed, const StrategyOptions& options) {
  require_unevaluated(domain, data, k);
  const double lie = std::accumulate(data.values().begin(), data.values().end(), 0.0) /
                     static_cast<double>(data.size());
  Dataset augmented = data;
  std::optional<GpPosterior> current;
  const GpPosterior* model = &gp;
  std::vector<bool> blocked = evaluated_rows(data, domain);

  Batch batch = make_batch("cl", k, domain.dim());
  for (std::size_t i = 0; i < k; ++i) {
    const AcquisitionContext ctx{*model, augmented.best_score()};
    const Vector x = ei_argmax(ctx, domain, blocked, derive_seed(seed, i), options.ascent);
    batch.points.row(static_cast<Eigen::Index>(i)) = x.transpose();
    if (domain.is_discrete()) {
      const std::size_t r = *domain.find_row(x);
      blocked[r] = true;
      batch.pool_rows.push_back(r);
    }
    if (i + 1 == k) break;
    augmented.append(x, lie);
    try {
      current.emplace(fit_gp(augmented, domain, options.gp, derive_seed(seed, 1000 + i)));
    } catch (const FitError& e) {
      throw StrategyError(std::string("constant liar refit failed: ") + e.what());
    }
    model = &*current;
  }
  batch.provenance.assign(k, Provenance::liar_step);
  batch.snapped.assign(k, false);
  return batch;
}

double estimate_lipschitz(const GpPosterior& gp, const Domain& domain, std::size_t n, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0x11b);
  const auto d = static_cast<Eigen::Index>(domain.dim());
  double best = 0.0;
  for (std::size_t s = 0; s < n; ++s) {
    const Vector x = domain.sample_uniform(rng);
    Vector grad(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      const double width = domain.extent()[static_cast<std::size_t>(j)].width();
      const double h = 1e-5 * (width > 0.0 ? width : 1.0);
      Vector up = x, down = x;
      up[j] += h;
      down[j] -= h;
      grad[j] = (gp.predict_mean(up) - gp.predict_mean(down)) / (2.0 * h);
    }
    best = std::max(best, grad.norm());
  }
  return best;
}

double local_penalizer(double distance, double lipschitz, double best, double mean_j, double variance_j) {
  const double denom = std::sqrt(2.0 * std::max(variance_j, kDegenerateSigma * kDegenerateSigma));
  return normal_cdf((lipschitz * distance - (best - mean_j)) / denom);
}

Batch lp_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k, std::uint64_t seed,
               const StrategyOptions& options) {
  require_unevaluated(domain, data, k);
  const double lipschitz = estimate_lipschitz(gp, domain, options.lipschitz_samples, derive_seed(seed, 0x1));
  if (!(lipschitz >= 1e-12)) {
    Batch fallback = naive_qei_batch(gp, data, domain, k, options.n_grid, seed);
    fallback.strategy = "lp";
    fallback.flags.push_back("lp_penalization_disabled");
    return fallback;
  }
  const auto ctx = AcquisitionContext::from_posterior(gp);
  const double best = data.best_score();

  struct Penalty {
    Vector x;
    double mean;
    double variance;
  };
  std::vector<Penalty> penalties;
  const ScalarFn penalized = [&](const Vector& x) {
    double v = expected_improvement(ctx, x);
    for (const Penalty& p : penalties) {
      v *= local_penalizer((x - p.x).norm(), lipschitz, best, p.mean, p.variance);
    }
    return v;
  };

  std::vector<bool> blocked = evaluated_rows(data, domain);
  Batch batch = make_batch("lp", k, domain.dim());
  for (std::size_t i = 0; i < k; ++i) {
    Vector x;
    if (domain.is_discrete()) {
      const std::size_t r = pool_argmax(penalized, domain, blocked);
      blocked[r] = true;
      batch.pool_rows.push_back(r);
      x = domain.candidates().row(static_cast<Eigen::Index>(r)).transpose();
    } else {
      Rng rng = make_rng(derive_seed(seed, i), 0);
      x = multistart_maximize(penalized, domain, rng, options.ascent).x;
    }
    batch.points.row(static_cast<Eigen::Index>(i)) = x.transpose();
    const Prediction p = gp.predict(x);
    penalties.push_back({x, p.mean, p.variance});
  }
  batch.provenance.assign(k, Provenance::penalized_argmax);
  batch.snapped.assign(k, false);
  return batch;
}

Batch random_batch(const Dataset& data, const Domain& domain, std::size_t k, std::uint64_t seed) {
  require_unevaluated(domain, data, k);
  Rng rng = make_rng(seed, 0);
  Batch batch = make_batch("random", k, domain.dim());
  if (domain.is_discrete()) {
    CandidateSet cand = candidate_set(domain, data, 0, rng, k);
    batch.points = cand.points;
    batch.pool_rows = cand.rows;
  } else {
    batch.points = domain.sample_uniform(k, rng);
  }
  batch.provenance.assign(k, Provenance::uniform_random);
  batch.snapped.assign(k, false);
  return batch;
}

}  // namespace batchbo
