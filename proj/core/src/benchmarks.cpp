#include "batchbo/benchmarks.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <span>

#include "batchbo/errors.hpp"

namespace batchbo {
namespace {

void require_box(const Vector& x, std::size_t dim, std::span<const Bound> box, const char* name) {
  if (static_cast<std::size_t>(x.size()) != dim) throw ShapeError(std::string(name) + ": wrong dimension");
  for (std::size_t i = 0; i < dim; ++i) {
    const double v = x[static_cast<Eigen::Index>(i)];
    if (!(v >= box[i].lo && v <= box[i].hi)) throw DomainError(std::string(name) + ": point outside the domain");
  }
}

// Constant tables follow the Virtual Library of Simulation Experiments.
constexpr std::array<Bound, 2> kBraninBox{{{-5.0, 10.0}, {0.0, 15.0}}};
constexpr std::array<Bound, 2> kCamelBox{{{-3.0, 3.0}, {-2.0, 2.0}}};
constexpr std::array<Bound, 6> kHartmannBox{{{0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}, {0, 1}}};

constexpr std::array<double, 4> kHartmannAlpha{1.0, 1.2, 3.0, 3.2};
constexpr double kHartmannA[4][6] = {
    {10, 3, 17, 3.5, 1.7, 8},
    {0.05, 10, 17, 0.1, 8, 14},
    {3, 3.5, 1.7, 10, 17, 8},
    {17, 8, 0.05, 10, 0.1, 14},
};
constexpr double kHartmannP[4][6] = {
    {1312, 1696, 5569, 124, 8283, 5886},
    {2329, 4135, 8307, 3736, 1004, 9991},
    {2348, 1451, 3522, 2883, 3047, 6650},
    {4047, 8828, 8732, 5743, 1091, 381},
};

}  // namespace

double eval_branin(const Vector& x) {
  require_box(x, 2, kBraninBox, "branin");
  constexpr double pi = std::numbers::pi;
  constexpr double a = 1.0;
  constexpr double b = 5.1 / (4.0 * pi * pi);
  constexpr double c = 5.0 / pi;
  constexpr double r = 6.0;
  constexpr double s = 10.0;
  constexpr double t = 1.0 / (8.0 * pi);
  const double x1 = x[0];
  const double x2 = x[1];
  const double q = x2 - b * x1 * x1 + c * x1 - r;
  return a * q * q + s * (1.0 - t) * std::cos(x1) + s;
}

double eval_camelback6(const Vector& x) {
  require_box(x, 2, kCamelBox, "camel6");
  const double x1 = x[0];
  const double x2 = x[1];
  const double x1sq = x1 * x1;
  const double x2sq = x2 * x2;
  return (4.0 - 2.1 * x1sq + x1sq * x1sq / 3.0) * x1sq + x1 * x2 + (-4.0 + 4.0 * x2sq) * x2sq;
}

double eval_hartmann6(const Vector& x) {
  require_box(x, 6, kHartmannBox, "hartmann6");
  double total = 0.0;
  for (int i = 0; i < 4; ++i) {
    double inner = 0.0;
    for (int j = 0; j < 6; ++j) {
      const double diff = x[j] - 1e-4 * kHartmannP[i][j];
      inner += kHartmannA[i][j] * diff * diff;
    }
    total += kHartmannAlpha[static_cast<std::size_t>(i)] * std::exp(-inner);
  }
  return -total;
}

Objective make_branin() {
  return {"branin", Domain::box({kBraninBox.begin(), kBraninBox.end()}), Direction::minimize, kBraninOptimum,
          eval_branin};
}

Objective make_camel6() {
  return {"camel6", Domain::box({kCamelBox.begin(), kCamelBox.end()}), Direction::minimize, kCamel6Optimum,
          eval_camelback6};
}

Objective make_hartmann6() {
  return {"hartmann6", Domain::box({kHartmannBox.begin(), kHartmannBox.end()}), Direction::minimize,
          kHartmann6Optimum, eval_hartmann6};
}

Objective make_objective(const ObjectiveSpec& spec) {
  if (spec.name == "branin") return make_branin();
  if (spec.name == "camel6") return make_camel6();
  if (spec.name == "hartmann6") return make_hartmann6();
  if (spec.name == "sparse-pool") return make_sparse_pool(spec.pool);
  throw ParameterError("unknown objective '" + spec.name + "'");
}

std::vector<std::string> objective_names() { return {"branin", "camel6", "hartmann6", "sparse-pool"}; }

}  // namespace batchbo
