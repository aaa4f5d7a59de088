#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "batchbo/domain.hpp"

namespace batchbo {

/// Known optima of the synthetic suite (native sign, minimization).
inline constexpr double kBraninOptimum = 0.39788735772973816;
inline constexpr double kCamel6Optimum = -1.0316284534898774;
inline constexpr double kHartmann6Optimum = -3.3223680114155120;

/// Branin-Hoo on [-5,10]x[0,15]. Throws DomainError outside the box.
double eval_branin(const Vector& x);
/// Six-hump camel on [-3,3]x[-2,2].
double eval_camelback6(const Vector& x);
/// Hartmann-6 on [0,1]^6.
double eval_hartmann6(const Vector& x);

Objective make_branin();
Objective make_camel6();
Objective make_hartmann6();

struct SparsePoolParams {
  std::size_t n_candidates = 19000;
  std::size_t dim = 167;
  std::size_t sparsity = 10;
  std::uint64_t seed = 7;
};

/// Synthetic discrete pool of binary fingerprints.
///
/// Rows are unions of a fixed set of disjoint bit "fragments" (at most 24),
/// so the pool has low intrinsic rank, as real substructure keys do. Values are
/// f(x) = w . T(x) where T(x)_j = x[a_j] AND x[b_j] for random bit pairs and w
/// has exactly `sparsity` non-zero Gaussian entries. Direction is maximize and
/// known_optimum is the exhaustive pool maximum.
Objective make_sparse_pool(const SparsePoolParams& params);

struct ObjectiveSpec {
  std::string name = "branin";
  SparsePoolParams pool;
};

/// Resolves branin | camel6 | hartmann6 | sparse-pool.
Objective make_objective(const ObjectiveSpec& spec);
std::vector<std::string> objective_names();

}  // namespace batchbo
