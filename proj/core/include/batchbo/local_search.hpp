#pragma once

#include <functional>
#include <vector>

#include "batchbo/domain.hpp"

namespace batchbo {

using ScalarFn = std::function<double(const Vector&)>;

struct LocalOptimum {
  Vector x;
  double value = 0.0;
};

struct AscentOptions {
  int max_iters = 200;
  /// Central-difference step, as a fraction of each box width.
  double fd_step = 1e-6;
};

/// Projected gradient ascent inside a box with finite-difference gradients and
/// a backtracking line search (unit-box coordinates).
LocalOptimum local_ascent(const ScalarFn& f, const std::vector<Bound>& box, Vector start,
                          const AscentOptions& options = {});

struct MultiStartOptions {
  int n_starts = 20;
  /// Uniform pilot draws; the best n_starts of them seed the local ascents.
  int n_pilot = 1000;
  AscentOptions ascent;
};

/// Best local maximum of f over a continuous domain. Ties resolve to the
/// earliest start.
LocalOptimum multistart_maximize(const ScalarFn& f, const Domain& domain, Rng& rng,
                                 const MultiStartOptions& options = {});

/// Global minimum estimate from a Latin-hypercube set of starts refined by
/// local descent.
LocalOptimum lhs_minimize(const ScalarFn& f, const Domain& domain, Rng& rng, int n_starts = 20,
                          const AscentOptions& options = {});

}  // namespace batchbo
