#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "batchbo/acquisition.hpp"
#include "batchbo/gp.hpp"
#include "batchbo/kmeans.hpp"
#include "batchbo/local_search.hpp"
#include "batchbo/slice_sampler.hpp"

namespace batchbo {

enum class Provenance { centroid, top_q, posterior_draw, liar_step, penalized_argmax, uniform_random };

std::string to_string(Provenance p);

/// Exactly k points to evaluate together in one epoch.
struct Batch {
  Matrix points;  // one point per row
  std::string strategy;
  std::vector<Provenance> provenance;
  /// True where a continuous proposal was moved onto a pool row.
  std::vector<bool> snapped;
  /// Pool row of each point (discrete domains only).
  std::vector<std::size_t> pool_rows;
  /// Fallbacks taken while building the batch.
  std::vector<std::string> flags;

  std::size_t size() const { return static_cast<std::size_t>(points.rows()); }
};

struct StrategyOptions {
  std::size_t n_slice = 200;
  /// Candidate-set size for grid-based strategies (and the joint-draw cap on pools).
  std::size_t n_grid = 2000;
  std::size_t lipschitz_samples = 1000;
  MultiStartOptions ascent;
  GpOptions gp;
  SliceOptions slice;
  KMeansOptions kmeans;
  /// Optional mask for KMBBO: points where it returns false carry no EI mass.
  std::function<bool(const Vector&)> feasible;
};

/// Mask of pool rows that already appear in data.
std::vector<bool> evaluated_rows(const Dataset& data, const Domain& domain);

/// Greedy nearest-row assignment in Euclidean distance. Points are processed in
/// order; each takes the closest row that is neither excluded nor taken
/// (ties: lowest row index). Throws ExhaustionError if rows run out.
std::vector<std::size_t> snap_to_candidates(const Matrix& points, const Domain& domain,
                                            const std::vector<bool>& excluded);

struct KmbboTrace {
  SliceSampleSet slices;
  KMeansResult clusters;
};

/// Centroids of a k-means fit to BGSS samples of the EI surface, before any
/// snapping. On pools, evaluated rows carry no acquisition mass.
Matrix kmbbo_centroids(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k,
                       std::size_t n_s, std::uint64_t seed, const StrategyOptions& options = {},
                       KmbboTrace* trace = nullptr, std::vector<std::string>* flags = nullptr);

/// KMBBO: slice-sample EI, cluster into k groups, evaluate the centroids
/// (snapped to unevaluated rows on pools).
Batch kmbbo_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k, std::size_t n_s,
                  std::uint64_t seed, const StrategyOptions& options = {}, KmbboTrace* trace = nullptr);

/// Point maximizing EI: multi-start ascent on boxes, exhaustive over the
/// unexcluded rows of a pool.
Vector ei_argmax(const AcquisitionContext& ctx, const Domain& domain, const std::vector<bool>& excluded,
                 std::uint64_t seed, const MultiStartOptions& options = {});

/// The k distinct candidates with the highest EI (ties: lowest index).
Batch naive_qei_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k,
                      std::size_t n_grid, std::uint64_t seed);

/// Argmax of k joint posterior draws over a candidate set. Duplicates are
/// redrawn up to 10 times, then replaced by the draw's next-best point.
Batch thompson_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k,
                     std::size_t n_grid, std::uint64_t seed);

/// Constant Liar with lie = mean observed value. Throws StrategyError when a
/// refit on the augmented data fails.
Batch constant_liar_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k,
                          std::uint64_t seed, const StrategyOptions& options = {});

/// Largest predictive-mean gradient norm over n random domain points
/// (central differences with h = 1e-5 of each domain width).
double estimate_lipschitz(const GpPosterior& gp, const Domain& domain, std::size_t n, std::uint64_t seed);

/// Soft local penalizer Phi((L |x - xj| - (M - mu_j)) / sqrt(2 sigma_j^2)).
double local_penalizer(double distance, double lipschitz, double best, double mean_j, double variance_j);

/// Local Penalization: k rounds of argmax EI(x) * prod_j psi(x; x_j).
Batch lp_batch(const GpPosterior& gp, const Dataset& data, const Domain& domain, std::size_t k, std::uint64_t seed,
               const StrategyOptions& options = {});

/// k uniform points (distinct unevaluated rows on pools).
Batch random_batch(const Dataset& data, const Domain& domain, std::size_t k, std::uint64_t seed);

}  // namespace batchbo
