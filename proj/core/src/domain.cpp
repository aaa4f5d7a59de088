#include "batchbo/domain.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

#include "batchbo/errors.hpp"

namespace batchbo {

std::size_t hash_point(const Vector& x) {
  std::size_t h = 1469598103934665603ULL;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    // +0.0 and -0.0 must collide.
    const double v = x[i] == 0.0 ? 0.0 : x[i];
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    h ^= bits + 0x9E3779B97F4A7C15ULL + (h << 6) + (h >> 2);
  }
  return h;
}

Domain Domain::box(std::vector<Bound> bounds) {
  if (bounds.empty()) throw ParameterError("box domain needs at least one dimension");
  for (std::size_t i = 0; i < bounds.size(); ++i) {
    if (!(bounds[i].lo < bounds[i].hi)) {
      throw ParameterError("box bound " + std::to_string(i) + " requires lo < hi");
    }
  }
  Domain d;
  d.kind_ = Kind::continuous;
  d.dim_ = bounds.size();
  d.extent_ = bounds;
  d.bounds_ = std::move(bounds);
  return d;
}

Domain Domain::pool(Matrix candidates) {
  if (candidates.rows() == 0 || candidates.cols() == 0) {
    throw ParameterError("candidate pool must be non-empty");
  }
  Domain d;
  d.kind_ = Kind::discrete;
  d.dim_ = static_cast<std::size_t>(candidates.cols());
  d.candidates_ = std::move(candidates);
  d.row_index_.reserve(d.size());
  for (Eigen::Index r = 0; r < d.candidates_.rows(); ++r) {
    const Vector row = d.candidates_.row(r).transpose();
    if (d.find_row(row)) throw ParameterError("candidate pool contains duplicate rows");
    d.row_index_.emplace(hash_point(row), static_cast<std::size_t>(r));
  }
  d.extent_.resize(d.dim_);
  for (std::size_t j = 0; j < d.dim_; ++j) {
    const auto col = d.candidates_.col(static_cast<Eigen::Index>(j));
    d.extent_[j] = {col.minCoeff(), col.maxCoeff()};
  }
  return d;
}

bool Domain::contains(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != dim_) return false;
  if (is_discrete()) return find_row(x).has_value();
  for (std::size_t i = 0; i < dim_; ++i) {
    const double v = x[static_cast<Eigen::Index>(i)];
    if (!(v >= bounds_[i].lo && v <= bounds_[i].hi)) return false;
  }
  return true;
}

std::optional<std::size_t> Domain::find_row(const Vector& x) const {
  if (!is_discrete() || static_cast<std::size_t>(x.size()) != dim_) return std::nullopt;
  const auto [first, last] = row_index_.equal_range(hash_point(x));
  for (auto it = first; it != last; ++it) {
    if ((candidates_.row(static_cast<Eigen::Index>(it->second)).transpose().array() == x.array()).all()) {
      return it->second;
    }
  }
  return std::nullopt;
}

Vector Domain::sample_uniform(Rng& rng) const {
  if (is_discrete()) {
    std::uniform_int_distribution<std::size_t> pick(0, size() - 1);
    return candidates_.row(static_cast<Eigen::Index>(pick(rng))).transpose();
  }
  Vector x(static_cast<Eigen::Index>(dim_));
  for (std::size_t i = 0; i < dim_; ++i) {
    std::uniform_real_distribution<double> u(bounds_[i].lo, bounds_[i].hi);
    x[static_cast<Eigen::Index>(i)] = u(rng);
  }
  return x;
}

Matrix Domain::sample_uniform(std::size_t n, Rng& rng) const {
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim_));
  if (is_discrete() && n <= size()) {
    // Partial Fisher-Yates over row indices.
    std::vector<std::size_t> idx(size());
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      std::uniform_int_distribution<std::size_t> pick(i, size() - 1);
      std::swap(idx[i], idx[pick(rng)]);
      out.row(static_cast<Eigen::Index>(i)) = candidates_.row(static_cast<Eigen::Index>(idx[i]));
    }
    return out;
  }
  for (std::size_t i = 0; i < n; ++i) out.row(static_cast<Eigen::Index>(i)) = sample_uniform(rng).transpose();
  return out;
}

Matrix Domain::latin_hypercube(std::size_t n, Rng& rng) const {
  Matrix out(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(dim_));
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<std::size_t> perm(n);
  for (std::size_t j = 0; j < dim_; ++j) {
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = (static_cast<double>(perm[i]) + u(rng)) / static_cast<double>(n);
      out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = extent_[j].lo + t * extent_[j].width();
    }
  }
  return out;
}

Vector Domain::clip(const Vector& x) const {
  Vector y = x;
  for (std::size_t i = 0; i < dim_; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    y[ii] = std::clamp(y[ii], extent_[i].lo, extent_[i].hi);
  }
  return y;
}

std::string to_string(Direction d) { return d == Direction::maximize ? "maximize" : "minimize"; }

Objective::Objective(std::string name, Domain domain, Direction direction, std::optional<double> known_optimum,
                     Fn fn)
    : name_(std::move(name)),
      domain_(std::move(domain)),
      direction_(direction),
      known_optimum_(known_optimum),
      fn_(std::move(fn)) {}

double Objective::eval(const Vector& x) const {
  if (static_cast<std::size_t>(x.size()) != domain_.dim()) {
    throw ShapeError(name_ + ": expected a " + std::to_string(domain_.dim()) + "-vector");
  }
  if (!domain_.contains(x)) throw DomainError(name_ + ": point outside the domain");
  return fn_(x);
}

std::optional<double> Objective::regret(double value) const {
  if (!known_optimum_) return std::nullopt;
  return std::abs(*known_optimum_ - value);
}

void Dataset::append(const Vector& x, double y) {
  if (!points_.empty() && x.size() != points_.front().size()) throw ShapeError("dataset point dimension mismatch");
  points_.push_back(x);
  values_.push_back(y);
  const double s = direction_sign(direction_);
  if (values_.size() == 1 || s * y > s * best_value_) {
    best_value_ = y;
    best_point_ = x;
  }
}

Vector Dataset::scores() const {
  Vector s(static_cast<Eigen::Index>(values_.size()));
  const double sign = direction_sign(direction_);
  for (std::size_t i = 0; i < values_.size(); ++i) s[static_cast<Eigen::Index>(i)] = sign * values_[i];
  return s;
}

Matrix Dataset::point_matrix() const {
  Matrix m(static_cast<Eigen::Index>(points_.size()), static_cast<Eigen::Index>(dim()));
  for (std::size_t i = 0; i < points_.size(); ++i) m.row(static_cast<Eigen::Index>(i)) = points_[i].transpose();
  return m;
}

}  // namespace batchbo
