#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "batchbo/rng.hpp"

namespace batchbo {

using Vector = Eigen::VectorXd;
/// Row-major point collection: one point per row.
using Matrix = Eigen::MatrixXd;

struct Bound {
  double lo;
  double hi;
  double width() const { return hi - lo; }
};

/// The search space: either a box or a finite pool of candidate rows.
class Domain {
 public:
  enum class Kind { continuous, discrete };

  static Domain box(std::vector<Bound> bounds);
  static Domain pool(Matrix candidates);

  Kind kind() const { return kind_; }
  bool is_discrete() const { return kind_ == Kind::discrete; }
  std::size_t dim() const { return dim_; }

  const std::vector<Bound>& bounds() const { return bounds_; }
  const Matrix& candidates() const { return candidates_; }
  std::size_t size() const { return static_cast<std::size_t>(candidates_.rows()); }

  /// Per-dimension extent. For pools this is the bounding box of the rows.
  const std::vector<Bound>& extent() const { return extent_; }

  bool contains(const Vector& x) const;
  std::optional<std::size_t> find_row(const Vector& x) const;

  /// Uniform draw from the box, or a uniformly chosen pool row.
  Vector sample_uniform(Rng& rng) const;
  /// n uniform draws (rows). Pools sample rows without replacement when n <= size.
  Matrix sample_uniform(std::size_t n, Rng& rng) const;
  /// Latin-hypercube design over the extent.
  Matrix latin_hypercube(std::size_t n, Rng& rng) const;

  Vector clip(const Vector& x) const;

 private:
  Domain() = default;

  Kind kind_ = Kind::continuous;
  std::size_t dim_ = 0;
  std::vector<Bound> bounds_;
  std::vector<Bound> extent_;
  Matrix candidates_;
  std::unordered_multimap<std::size_t, std::size_t> row_index_;
};

std::size_t hash_point(const Vector& x);

enum class Direction { maximize, minimize };

inline double direction_sign(Direction d) { return d == Direction::maximize ? 1.0 : -1.0; }
std::string to_string(Direction d);

/// A deterministic black-box function over a Domain.
class Objective {
 public:
  using Fn = std::function<double(const Vector&)>;

  Objective(std::string name, Domain domain, Direction direction, std::optional<double> known_optimum,
            Fn fn);

  const std::string& name() const { return name_; }
  const Domain& domain() const { return domain_; }
  Direction direction() const { return direction_; }
  const std::optional<double>& known_optimum() const { return known_optimum_; }
  std::size_t dim() const { return domain_.dim(); }

  /// Native-sign value. Throws DomainError outside the domain.
  double eval(const Vector& x) const;
  /// Value under the maximization convention used by the surrogate.
  double score(const Vector& x) const { return direction_sign(direction_) * eval(x); }

  /// |known_optimum - value| in native sign.
  std::optional<double> regret(double value) const;

 private:
  std::string name_;
  Domain domain_;
  Direction direction_;
  std::optional<double> known_optimum_;
  Fn fn_;
};

/// Observed (x, y) pairs with best-so-far tracking under a direction.
class Dataset {
 public:
  explicit Dataset(Direction direction = Direction::maximize) : direction_(direction) {}

  void append(const Vector& x, double y);

  Direction direction() const { return direction_; }
  std::size_t size() const { return values_.size(); }
  bool empty() const { return values_.empty(); }
  std::size_t dim() const { return points_.empty() ? 0 : static_cast<std::size_t>(points_.front().size()); }

  const std::vector<Vector>& points() const { return points_; }
  const std::vector<double>& values() const { return values_; }

  /// Native-sign best value; NaN when empty.
  double best_value() const { return best_value_; }
  const Vector& best_point() const { return best_point_; }

  /// Values under the maximization convention.
  Vector scores() const;
  double best_score() const { return direction_sign(direction_) * best_value_; }

  Matrix point_matrix() const;

 private:
  Direction direction_;
  std::vector<Vector> points_;
  std::vector<double> values_;
  double best_value_ = std::numeric_limits<double>::quiet_NaN();
  Vector best_point_;
};

}  // namespace batchbo
