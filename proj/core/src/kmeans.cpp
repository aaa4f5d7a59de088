#include "batchbo/kmeans.hpp"

#include <cmath>
#include <limits>
#include <unordered_set>

#include "batchbo/errors.hpp"

namespace batchbo {
namespace {

std::size_t nearest(const Matrix& centroids, const Eigen::Ref<const Eigen::RowVectorXd>& x, double* dist2) {
  std::size_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (Eigen::Index c = 0; c < centroids.rows(); ++c) {
    const double d = (centroids.row(c) - x).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = static_cast<std::size_t>(c);
    }
  }
  if (dist2) *dist2 = best_d;
  return best;
}

/// Greedy k-means++: each new centre is the best of 2 + floor(ln k) D^2-weighted draws.
Matrix plus_plus_seed(const Matrix& points, std::size_t k, Rng& rng) {
  const Eigen::Index n = points.rows();
  const int trials = 2 + static_cast<int>(std::log(static_cast<double>(k)));
  Matrix centroids(static_cast<Eigen::Index>(k), points.cols());
  std::uniform_int_distribution<Eigen::Index> first(0, n - 1);
  centroids.row(0) = points.row(first(rng));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) d2[static_cast<std::size_t>(i)] = (points.row(i) - centroids.row(0)).squaredNorm();
  for (std::size_t c = 1; c < k; ++c) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index chosen = 0;
    if (total > 0.0) {
      std::discrete_distribution<Eigen::Index> pick(d2.begin(), d2.end());
      double best_potential = std::numeric_limits<double>::infinity();
      for (int t = 0; t < trials; ++t) {
        const Eigen::Index cand = pick(rng);
        double potential = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
          potential += std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - points.row(cand)).squaredNorm());
        }
        if (potential < best_potential) {
          best_potential = potential;
          chosen = cand;
        }
      }
    } else {
      chosen = first(rng);
    }
    centroids.row(static_cast<Eigen::Index>(c)) = points.row(chosen);
    for (Eigen::Index i = 0; i < n; ++i) {
      d2[static_cast<std::size_t>(i)] =
          std::min(d2[static_cast<std::size_t>(i)], (points.row(i) - points.row(chosen)).squaredNorm());
    }
  }
  return centroids;
}

KMeansResult lloyd(const Matrix& points, Matrix centroids, int max_iters) {
  const Eigen::Index n = points.rows();
  const auto k = static_cast<std::size_t>(centroids.rows());
  KMeansResult r;
  r.assignments.assign(static_cast<std::size_t>(n), 0);
  std::vector<std::size_t> previous;
  for (int it = 0; it < max_iters; ++it) {
    for (Eigen::Index i = 0; i < n; ++i) r.assignments[static_cast<std::size_t>(i)] = nearest(centroids, points.row(i), nullptr);
    if (it > 0 && r.assignments == previous) break;
    previous = r.assignments;
    r.iterations = it + 1;

    Matrix sums = Matrix::Zero(static_cast<Eigen::Index>(k), points.cols());
    std::vector<std::size_t> counts(k, 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      const std::size_t c = r.assignments[static_cast<std::size_t>(i)];
      sums.row(static_cast<Eigen::Index>(c)) += points.row(i);
      ++counts[c];
    }
    for (std::size_t c = 0; c < k; ++c) {
      // Empty clusters keep their centroid.
      if (counts[c] > 0) centroids.row(static_cast<Eigen::Index>(c)) = sums.row(static_cast<Eigen::Index>(c)) / static_cast<double>(counts[c]);
    }
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      inertia += (points.row(i) - centroids.row(static_cast<Eigen::Index>(r.assignments[static_cast<std::size_t>(i)]))).squaredNorm();
    }
    r.inertia_history.push_back(inertia);
  }
  r.centroids = std::move(centroids);
  r.inertia = r.inertia_history.empty() ? 0.0 : r.inertia_history.back();
  return r;
}

std::size_t count_distinct(const Matrix& points) {
  std::unordered_multimap<std::size_t, Eigen::Index> seen;
  std::size_t distinct = 0;
  for (Eigen::Index i = 0; i < points.rows(); ++i) {
    const Vector row = points.row(i).transpose();
    const auto [first, last] = seen.equal_range(hash_point(row));
    bool dup = false;
    for (auto it = first; it != last && !dup; ++it) dup = (points.row(it->second) == points.row(i));
    if (!dup) {
      seen.emplace(hash_point(row), i);
      ++distinct;
    }
  }
  return distinct;
}

}  // namespace

KMeansResult kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options) {
  if (k < 1) throw ParameterError("kmeans_fit needs k >= 1");
  if (points.rows() == 0) throw ParameterError("kmeans_fit needs at least one point");

  bool degenerate = false;
  if (static_cast<std::size_t>(points.rows()) < k) {
    k = count_distinct(points);
    degenerate = true;
  }

  KMeansResult best;
  bool have = false;
  for (int init = 0; init < std::max(1, options.n_init); ++init) {
    Rng rng = make_rng(seed, static_cast<std::uint64_t>(init));
    KMeansResult r = lloyd(points, plus_plus_seed(points, k, rng), options.max_iters);
    if (!have || r.inertia < best.inertia) {
      best = std::move(r);
      have = true;
    }
  }
  best.degenerate = degenerate;
  return best;
}

}  // namespace batchbo
