#include "batchbo/slice_sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "batchbo/errors.hpp"
#include "batchbo/local_search.hpp"

namespace batchbo {
namespace {

SliceSampleSet sample_pool(const AcquisitionSurface& acq, const Domain& domain, std::size_t n_s, double alpha_min,
                           Rng& rng, const SliceOptions& options) {
  const Matrix& rows = domain.candidates();
  std::vector<double> alpha(domain.size());
  std::vector<double> weights(domain.size());
  double total = 0.0;
  for (std::size_t i = 0; i < domain.size(); ++i) {
    alpha[i] = acq(rows.row(static_cast<Eigen::Index>(i)).transpose());
    weights[i] = alpha[i] > alpha_min ? alpha[i] - alpha_min : 0.0;
    total += weights[i];
  }
  if (!(total > options.flat_tolerance)) throw FlatSurfaceError("acquisition is flat over the pool");

  std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
  SliceSampleSet out;
  out.samples.resize(static_cast<Eigen::Index>(n_s), rows.cols());
  out.alpha_min = alpha_min;
  out.n_requested = n_s;
  out.envelope = *std::max_element(alpha.begin(), alpha.end());
  for (std::size_t i = 0; i < n_s; ++i) {
    const std::size_t r = pick(rng);
    out.samples.row(static_cast<Eigen::Index>(i)) = rows.row(static_cast<Eigen::Index>(r));
    out.alpha_values.push_back(alpha[r]);
    out.rows.push_back(r);
  }
  out.n_proposals_used = n_s;
  out.n_proposals_final = n_s;
  return out;
}

SliceSampleSet sample_box(const AcquisitionSurface& acq, const Domain& domain, std::size_t n_s, double alpha_min,
                          Rng& rng, const SliceOptions& options) {
  const std::size_t budget = options.proposals_per_sample * n_s;
  std::size_t proposals = 0;
  double max_seen = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < options.pilot; ++i) {
    max_seen = std::max(max_seen, acq(domain.sample_uniform(rng)));
    ++proposals;
  }
  if (!(max_seen - alpha_min > options.flat_tolerance)) {
    throw FlatSurfaceError("acquisition is flat over the box");
  }

  SliceSampleSet out;
  out.alpha_min = alpha_min;
  out.n_requested = n_s;
  out.envelope = alpha_min + options.headroom * (max_seen - alpha_min);
  std::vector<Vector> accepted;
  accepted.reserve(n_s);
  std::size_t final_proposals = 0;

  while (accepted.size() < n_s) {
    if (proposals >= budget) {
      throw FlatSurfaceError("slice sampler exhausted its proposal budget");
    }
    Vector x = domain.sample_uniform(rng);
    const double a = acq(x);
    ++proposals;
    ++final_proposals;
    if (a > out.envelope) {
      // Envelope breached: earlier acceptances used a truncated target.
      out.envelope = alpha_min + options.headroom * (a - alpha_min);
      accepted.clear();
      out.alpha_values.clear();
      final_proposals = 0;
      continue;
    }
    std::uniform_real_distribution<double> u_dist(alpha_min, out.envelope);
    const double u = u_dist(rng);
    if (u < a && a > alpha_min) {
      accepted.push_back(std::move(x));
      out.alpha_values.push_back(a);
    }
  }

  out.samples.resize(static_cast<Eigen::Index>(n_s), static_cast<Eigen::Index>(domain.dim()));
  for (std::size_t i = 0; i < n_s; ++i) out.samples.row(static_cast<Eigen::Index>(i)) = accepted[i].transpose();
  out.n_proposals_used = proposals;
  out.n_proposals_final = final_proposals;
  return out;
}

}  // namespace

double estimate_alpha_min(const AcquisitionSurface& acq, const Domain& domain, std::uint64_t seed) {
  if (domain.is_discrete()) {
    double lo = std::numeric_limits<double>::infinity();
    for (Eigen::Index r = 0; r < domain.candidates().rows(); ++r) {
      lo = std::min(lo, acq(domain.candidates().row(r).transpose()));
    }
    return lo;
  }
  Rng rng = make_rng(seed, 0xa1f);
  return lhs_minimize(acq, domain, rng, 20).value;
}

SliceSampleSet bgss_sample(const AcquisitionSurface& acq, const Domain& domain, std::size_t n_s, double alpha_min,
                           std::uint64_t seed, const SliceOptions& options) {
  if (n_s < 1) throw ParameterError("bgss_sample needs n_s >= 1");
  Rng rng = make_rng(seed, 0x51ce);
  return domain.is_discrete() ? sample_pool(acq, domain, n_s, alpha_min, rng, options)
                              : sample_box(acq, domain, n_s, alpha_min, rng, options);
}

SliceSampleSet bgss_sample_or_uniform(const AcquisitionSurface& acq, const Domain& domain, std::size_t n_s,
                                      double alpha_min, std::uint64_t seed, const SliceOptions& options) {
  try {
    return bgss_sample(acq, domain, n_s, alpha_min, seed, options);
  } catch (const FlatSurfaceError&) {
    Rng rng = make_rng(seed, 0xf1a7);
    SliceSampleSet out;
    out.alpha_min = alpha_min;
    out.n_requested = n_s;
    out.uniform_fallback = true;
    out.samples.resize(static_cast<Eigen::Index>(n_s), static_cast<Eigen::Index>(domain.dim()));
    std::uniform_int_distribution<std::size_t> pick(0, domain.is_discrete() ? domain.size() - 1 : 0);
    for (std::size_t i = 0; i < n_s; ++i) {
      Vector x;
      if (domain.is_discrete()) {
        const std::size_t r = pick(rng);
        out.rows.push_back(r);
        x = domain.candidates().row(static_cast<Eigen::Index>(r)).transpose();
      } else {
        x = domain.sample_uniform(rng);
      }
      out.alpha_values.push_back(acq(x));
      out.samples.row(static_cast<Eigen::Index>(i)) = x.transpose();
    }
    out.n_proposals_used = n_s;
    out.n_proposals_final = n_s;
    return out;
  }
}

}  // namespace batchbo
