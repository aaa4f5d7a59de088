#include "batchbo/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "batchbo/errors.hpp"
#include "batchbo/rng.hpp"

namespace batchbo {

int first_encounter(const std::vector<double>& regret_series, double tol) {
  for (std::size_t t = 0; t < regret_series.size(); ++t) {
    if (regret_series[t] <= tol) return static_cast<int>(t);
  }
  return kNeverEncountered;
}

std::vector<int> first_encounter(const std::vector<std::vector<double>>& regret_series, double tol) {
  std::vector<int> out;
  out.reserve(regret_series.size());
  for (const auto& s : regret_series) out.push_back(first_encounter(s, tol));
  return out;
}

ZScores z_score(const std::vector<double>& scores) {
  if (scores.size() < 2) throw ParameterError("z_score needs at least two strategies");
  for (double s : scores) {
    if (!std::isfinite(s)) throw ParameterError("z_score needs finite scores");
  }
  const auto [lo, hi] = std::minmax_element(scores.begin(), scores.end());
  ZScores out;
  out.z.assign(scores.size(), 0.0);
  const double range = *hi - *lo;
  if (range == 0.0) {
    out.degenerate = true;
    return out;
  }
  for (std::size_t i = 0; i < scores.size(); ++i) out.z[i] = (scores[i] - *lo) / range;
  return out;
}

AggregateZ aggregate_z(const ScoreTable& table) {
  if (table.empty()) throw ParameterError("aggregate_z needs at least one task");
  std::map<std::string, bool> all;
  for (const auto& [task, row] : table) {
    for (const auto& [strategy, s] : row) all[strategy] = true;
  }
  AggregateZ out;
  std::map<std::string, double> perf_sum, var_sum;
  for (const auto& [task, row] : table) {
    for (const auto& [strategy, unused] : all) {
      if (!row.contains(strategy)) out.warnings.push_back("strategy '" + strategy + "' missing on task '" + task + "'");
    }
    if (row.size() < 2) {
      out.warnings.push_back("task '" + task + "' has fewer than two strategies; skipped");
      continue;
    }
    std::vector<std::string> names;
    std::vector<double> scores, spreads;
    for (const auto& [strategy, s] : row) {
      names.push_back(strategy);
      scores.push_back(s.score);
      spreads.push_back(s.std_dev);
    }
    const ZScores zp = z_score(scores);
    const ZScores zv = z_score(spreads);
    if (zp.degenerate) out.warnings.push_back("task '" + task + "': equal scores, Z set to 0");
    if (zv.degenerate) out.warnings.push_back("task '" + task + "': equal std-devs, Z set to 0");
    for (std::size_t i = 0; i < names.size(); ++i) {
      perf_sum[names[i]] += zp.z[i];
      var_sum[names[i]] += zv.z[i];
      ++out.n_tasks[names[i]];
    }
  }
  if (out.n_tasks.empty()) throw ParameterError("aggregate_z: no task could be ranked");
  for (const auto& [name, n] : out.n_tasks) {
    out.performance[name] = perf_sum[name] / static_cast<double>(n);
    out.variance[name] = var_sum[name] / static_cast<double>(n);
  }
  return out;
}

double mean(const std::vector<double>& v) {
  if (v.empty()) return std::nan("");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_dev(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double ss = 0.0;
  for (double x : v) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(v.size() - 1));
}

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::nan("");
  if (!(q >= 0.0 && q <= 1.0)) throw ParameterError("quantile must lie in [0, 1]");
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto i = static_cast<std::size_t>(std::floor(pos));
  if (i + 1 >= v.size()) return v.back();
  const double frac = pos - static_cast<double>(i);
  return v[i] + frac * (v[i + 1] - v[i]);
}

double bootstrap_std(const std::vector<double>& v, std::size_t n_resamples, std::uint64_t seed) {
  if (v.size() < 2 || n_resamples < 2) return 0.0;
  Rng rng = make_rng(seed, 0);
  std::uniform_int_distribution<std::size_t> pick(0, v.size() - 1);
  std::vector<double> means(n_resamples);
  for (auto& m : means) {
    double s = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) s += v[pick(rng)];
    m = s / static_cast<double>(v.size());
  }
  return std_dev(means);
}

}  // namespace batchbo
