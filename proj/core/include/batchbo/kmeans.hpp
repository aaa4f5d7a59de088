#pragma once

#include <cstdint>
#include <vector>

#include "batchbo/domain.hpp"

namespace batchbo {

struct KMeansOptions {
  int n_init = 10;
  int max_iters = 300;
};

struct KMeansResult {
  Matrix centroids;  // one centroid per row
  std::vector<std::size_t> assignments;
  /// Within-cluster sum of squared distances.
  double inertia = 0.0;
  /// Inertia after every Lloyd update of the winning initialization.
  std::vector<double> inertia_history;
  int iterations = 0;
  /// Fewer distinct points than clusters; centroids were reduced.
  bool degenerate = false;
};

/// Lloyd's algorithm from greedy k-means++ seeding, best of options.n_init runs by
/// inertia. Deterministic in seed; distance ties go to the lowest centroid index.
KMeansResult kmeans_fit(const Matrix& points, std::size_t k, std::uint64_t seed, const KMeansOptions& options = {});

}  // namespace batchbo
