#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "batchbo/domain.hpp"

namespace batchbo {

using AcquisitionSurface = std::function<double(const Vector&)>;

/// Batch generalized slice samples: points distributed with density
/// proportional to alpha(x) - alpha_min over the domain.
struct SliceSampleSet {
  Matrix samples;  // one sample per row
  double alpha_min = 0.0;
  std::vector<double> alpha_values;
  std::size_t n_requested = 0;
  /// Every proposal drawn, pilot and discarded envelopes included.
  std::size_t n_proposals_used = 0;
  /// Proposals drawn under the final envelope (the ones that produced samples).
  std::size_t n_proposals_final = 0;
  /// Upper end of the auxiliary u range for the final envelope.
  double envelope = 0.0;
  /// Pool row of each sample (discrete domains only).
  std::vector<std::size_t> rows;
  /// Set when the surface was flat and the samples are uniform domain draws.
  bool uniform_fallback = false;
};

struct SliceOptions {
  /// Proposal budget per requested sample.
  std::size_t proposals_per_sample = 10000;
  std::size_t pilot = 256;
  double headroom = 1.5;
  /// Surfaces whose range above alpha_min is within this are treated as flat.
  double flat_tolerance = 1e-12;
};

/// Floor of the acquisition surface: a multi-start (20 Latin-hypercube starts,
/// local descent) minimum for boxes, the exact minimum for pools.
double estimate_alpha_min(const AcquisitionSurface& acq, const Domain& domain, std::uint64_t seed);

/// Draws n_s samples from the region alpha_min < u < alpha(x).
///
/// Boxes use rejection sampling: x uniform on the box and u uniform on
/// (alpha_min, envelope], where the envelope tracks the largest alpha seen with
/// headroom and restarts the collection whenever it is breached. Pools sample
/// rows with replacement by the exact weights alpha - alpha_min.
/// Throws FlatSurfaceError if the surface is flat or the budget runs out.
SliceSampleSet bgss_sample(const AcquisitionSurface& acq, const Domain& domain, std::size_t n_s, double alpha_min,
                           std::uint64_t seed, const SliceOptions& options = {});

/// bgss_sample, falling back to uniform domain draws (flagged) on a flat surface.
SliceSampleSet bgss_sample_or_uniform(const AcquisitionSurface& acq, const Domain& domain, std::size_t n_s,
                                      double alpha_min, std::uint64_t seed, const SliceOptions& options = {});

}  // namespace batchbo
