#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <unordered_set>

#include "batchbo/benchmarks.hpp"
#include "batchbo/errors.hpp"

namespace batchbo {
namespace {

constexpr std::size_t kMaxFragments = 24;
constexpr double kFragmentRate = 0.25;

struct PoolModel {
  std::vector<std::pair<std::size_t, std::size_t>> feature_pairs;  // T
  std::vector<std::pair<std::size_t, double>> weights;             // non-zeros of w

  double operator()(const Vector& x) const {
    double f = 0.0;
    for (const auto& [j, w] : weights) {
      const auto [a, b] = feature_pairs[j];
      if (x[static_cast<Eigen::Index>(a)] != 0.0 && x[static_cast<Eigen::Index>(b)] != 0.0) f += w;
    }
    return f;
  }
};

}  // namespace

Objective make_sparse_pool(const SparsePoolParams& p) {
  if (p.n_candidates < 1) throw ParameterError("sparse pool needs at least one candidate");
  if (p.dim < 1) throw ParameterError("sparse pool needs dim >= 1");
  if (p.sparsity < 1 || p.sparsity > p.dim) throw ParameterError("sparse pool requires 1 <= sparsity <= dim");

  const std::size_t n_frag = std::min(p.dim, kMaxFragments);
  if (n_frag < 63 && p.n_candidates > (std::size_t{1} << n_frag)) {
    throw ParameterError("sparse pool: more candidates requested than distinct fingerprints exist");
  }

  Rng rng = make_rng(p.seed, 0);

  // Disjoint fragments covering every bit.
  std::vector<std::size_t> perm(p.dim);
  std::iota(perm.begin(), perm.end(), 0);
  std::shuffle(perm.begin(), perm.end(), rng);
  std::vector<std::vector<std::size_t>> fragments(n_frag);
  for (std::size_t i = 0; i < p.dim; ++i) fragments[i % n_frag].push_back(perm[i]);

  Matrix rows = Matrix::Zero(static_cast<Eigen::Index>(p.n_candidates), static_cast<Eigen::Index>(p.dim));
  std::unordered_set<std::uint64_t> seen;
  std::bernoulli_distribution include(kFragmentRate);
  const std::size_t max_attempts = 1000 * p.n_candidates + 1000;
  std::size_t filled = 0;
  for (std::size_t attempt = 0; filled < p.n_candidates; ++attempt) {
    if (attempt >= max_attempts) throw ParameterError("sparse pool: could not draw enough distinct fingerprints");
    std::uint64_t mask = 0;
    for (std::size_t f = 0; f < n_frag; ++f) {
      if (include(rng)) mask |= std::uint64_t{1} << f;
    }
    if (!seen.insert(mask).second) continue;
    auto row = rows.row(static_cast<Eigen::Index>(filled));
    for (std::size_t f = 0; f < n_frag; ++f) {
      if (mask & (std::uint64_t{1} << f)) {
        for (std::size_t bit : fragments[f]) row[static_cast<Eigen::Index>(bit)] = 1.0;
      }
    }
    ++filled;
  }

  auto model = std::make_shared<PoolModel>();
  std::uniform_int_distribution<std::size_t> pick_bit(0, p.dim - 1);
  model->feature_pairs.resize(p.dim);
  for (auto& pair : model->feature_pairs) pair = {pick_bit(rng), pick_bit(rng)};
  std::vector<std::size_t> support(p.dim);
  std::iota(support.begin(), support.end(), 0);
  std::shuffle(support.begin(), support.end(), rng);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t i = 0; i < p.sparsity; ++i) {
    double w = gauss(rng);
    if (w == 0.0) w = 1.0;
    model->weights.emplace_back(support[i], w);
  }
  std::sort(model->weights.begin(), model->weights.end());

  double best = -std::numeric_limits<double>::infinity();
  for (Eigen::Index r = 0; r < rows.rows(); ++r) best = std::max(best, (*model)(rows.row(r).transpose()));

  return {"sparse-pool", Domain::pool(std::move(rows)), Direction::maximize, best,
          [model](const Vector& x) { return (*model)(x); }};
}

}  // namespace batchbo
