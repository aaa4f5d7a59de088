#include "batchbo/local_search.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "batchbo/errors.hpp"

namespace batchbo {

LocalOptimum local_ascent(const ScalarFn& f, const std::vector<Bound>& box, Vector start,
                          const AscentOptions& options) {
  const auto d = static_cast<Eigen::Index>(box.size());
  if (start.size() != d) throw ShapeError("local_ascent: start has the wrong dimension");
  Vector lo(d), width(d);
  for (Eigen::Index j = 0; j < d; ++j) {
    lo[j] = box[static_cast<std::size_t>(j)].lo;
    width[j] = box[static_cast<std::size_t>(j)].width();
  }
  auto to_x = [&](const Vector& u) { return Vector(lo + u.cwiseProduct(width)); };

  Vector u = ((start - lo).cwiseQuotient(width)).cwiseMax(0.0).cwiseMin(1.0);
  double value = f(to_x(u));
  double step = 0.05;

  for (int it = 0; it < options.max_iters; ++it) {
    Vector g(d);
    for (Eigen::Index j = 0; j < d; ++j) {
      Vector up = u, down = u;
      up[j] = std::min(1.0, u[j] + options.fd_step);
      down[j] = std::max(0.0, u[j] - options.fd_step);
      const double span = up[j] - down[j];
      g[j] = span > 0.0 ? (f(to_x(up)) - f(to_x(down))) / span : 0.0;
      if ((u[j] <= 0.0 && g[j] < 0.0) || (u[j] >= 1.0 && g[j] > 0.0)) g[j] = 0.0;
    }
    const double gnorm = g.norm();
    if (!(gnorm > 0.0) || !std::isfinite(gnorm)) break;
    const Vector dir = g / gnorm;

    bool moved = false;
    double gain = 0.0;
    while (step > 1e-10) {
      const Vector candidate = (u + step * dir).cwiseMax(0.0).cwiseMin(1.0);
      const double cv = f(to_x(candidate));
      if (cv > value) {
        gain = cv - value;
        u = candidate;
        value = cv;
        step = std::min(step * 2.0, 0.5);
        moved = true;
        break;
      }
      step *= 0.5;
    }
    if (!moved || gain <= 1e-12 * (1.0 + std::abs(value))) break;
  }
  return {to_x(u), value};
}

LocalOptimum multistart_maximize(const ScalarFn& f, const Domain& domain, Rng& rng,
                                 const MultiStartOptions& options) {
  if (domain.is_discrete()) throw ParameterError("multistart_maximize needs a continuous domain");
  const std::size_t n_pilot = static_cast<std::size_t>(std::max(options.n_pilot, options.n_starts));
  const Matrix pilot = domain.sample_uniform(n_pilot, rng);
  std::vector<double> values(n_pilot);
  for (std::size_t i = 0; i < n_pilot; ++i) values[i] = f(pilot.row(static_cast<Eigen::Index>(i)).transpose());
  std::vector<std::size_t> order(n_pilot);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });

  LocalOptimum best{pilot.row(static_cast<Eigen::Index>(order[0])).transpose(), values[order[0]]};
  const std::size_t n_starts = std::min<std::size_t>(static_cast<std::size_t>(options.n_starts), n_pilot);
  for (std::size_t s = 0; s < n_starts; ++s) {
    const Vector start = pilot.row(static_cast<Eigen::Index>(order[s])).transpose();
    LocalOptimum local = local_ascent(f, domain.bounds(), start, options.ascent);
    if (local.value > best.value) best = std::move(local);
  }
  return best;
}

LocalOptimum lhs_minimize(const ScalarFn& f, const Domain& domain, Rng& rng, int n_starts,
                          const AscentOptions& options) {
  if (domain.is_discrete()) throw ParameterError("lhs_minimize needs a continuous domain");
  const Matrix starts = domain.latin_hypercube(static_cast<std::size_t>(std::max(1, n_starts)), rng);
  const ScalarFn neg = [&f](const Vector& x) { return -f(x); };
  LocalOptimum best;
  bool have = false;
  for (Eigen::Index s = 0; s < starts.rows(); ++s) {
    const Vector start = starts.row(s).transpose();
    const double start_value = f(start);
    LocalOptimum local = local_ascent(neg, domain.bounds(), start, options);
    local.value = -local.value;
    if (start_value < local.value) local = {start, start_value};
    if (!have || local.value < best.value) {
      best = std::move(local);
      have = true;
    }
  }
  return best;
}

}  // namespace batchbo
