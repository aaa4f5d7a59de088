#pragma once

#include <climits>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace batchbo {

/// First-encounter sentinel for a repeat that never reached the tolerance.
inline constexpr int kNeverEncountered = INT_MAX;

/// Smallest index t with series[t] <= tol (index 0 is the initial design),
/// or kNeverEncountered.
int first_encounter(const std::vector<double>& regret_series, double tol);
std::vector<int> first_encounter(const std::vector<std::vector<double>>& regret_series, double tol);

struct ZScores {
  std::vector<double> z;
  /// All scores equal: every z is 0.
  bool degenerate = false;
};

/// Normalized ranking (s - s_best) / (s_max - s_min), lower scores better.
/// Throws ParameterError for fewer than two or non-finite scores.
ZScores z_score(const std::vector<double>& scores);

/// Final score and its spread for one strategy on one task.
struct TaskScore {
  double score = 0.0;
  double std_dev = 0.0;
};

/// task -> strategy -> score.
using ScoreTable = std::map<std::string, std::map<std::string, TaskScore>>;

struct AggregateZ {
  /// Mean Z of the score channel per strategy.
  std::map<std::string, double> performance;
  /// Mean Z of the std-dev channel per strategy.
  std::map<std::string, double> variance;
  /// Number of tasks each strategy was ranked on.
  std::map<std::string, std::size_t> n_tasks;
  std::vector<std::string> warnings;
};

/// Per-task Z for both channels, averaged over tasks. A strategy missing on a
/// task is left out of that task's ranking and its own mean (with a warning).
/// Tasks with fewer than two scored strategies are skipped with a warning.
/// Throws ParameterError when no task can be ranked.
AggregateZ aggregate_z(const ScoreTable& table);

double mean(const std::vector<double>& v);
/// Sample standard deviation (n - 1); 0 for fewer than two values.
double std_dev(const std::vector<double>& v);
/// Linear-interpolation quantile of the sorted sample (q in [0, 1]).
double quantile(std::vector<double> v, double q);
/// Standard deviation of the bootstrap distribution of the mean.
double bootstrap_std(const std::vector<double>& v, std::size_t n_resamples, std::uint64_t seed);

}  // namespace batchbo
