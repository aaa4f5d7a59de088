#include "batchbo/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "batchbo/compression.hpp"
#include "batchbo/errors.hpp"
#include "batchbo/local_search.hpp"
#include "batchbo/metrics.hpp"

namespace batchbo {

void ExperimentConfig::validate() const {
  if (batch_size < 1 || n_epochs < 1 || n_init < 1 || n_slice < 1 || n_repeats < 1 || jobs < 1) {
    throw ParameterError("batch size, epochs, initial points, slice samples, repeats and jobs must all be >= 1");
  }
  if (gp_restarts < 1 || gp_max_iters < 1) throw ParameterError("GP restarts and iterations must be >= 1");
  if (!(cs_epsilon > 0.0 && cs_epsilon < 1.0)) throw ParameterError("cs epsilon must lie in (0, 1)");
  if (cs_calibration_samples < 2) throw ParameterError("cs calibration needs at least two samples");
  if (fe_tolerance && !(*fe_tolerance >= 0.0)) throw ParameterError("first-encounter tolerance must be >= 0");
  const auto names = objective_names();
  if (std::find(names.begin(), names.end(), objective.name) == names.end()) {
    throw ParameterError("unknown objective '" + objective.name + "'");
  }
  parse_strategy(strategy);
}

StrategyOptions ExperimentConfig::strategy_options() const {
  StrategyOptions opts;
  opts.n_slice = n_slice;
  opts.gp.restarts = gp_restarts;
  opts.gp.max_iters = gp_max_iters;
  return opts;
}

std::unique_ptr<Strategy> make_strategy(const ExperimentConfig& config) {
  const StrategyKind kind = parse_strategy(config.strategy);
  switch (kind) {
    case StrategyKind::random: return std::make_unique<RandomStrategy>();
    case StrategyKind::cs_kmbbo: {
      CsOptions cs;
      cs.epsilon = config.cs_epsilon;
      cs.n_comp = config.cs_calibration_samples;
      return std::make_unique<CsKmbboStrategy>(config.strategy_options(), cs);
    }
    default: return std::make_unique<GpBatchStrategy>(kind, config.strategy_options());
  }
}

std::vector<std::vector<double>> ExperimentResult::regret_series() const {
  if (!known_optimum) throw MetricUnavailableError("objective '" + objective + "' has no known optimum");
  std::vector<std::vector<double>> out;
  for (const auto& run : runs) {
    if (!run.failed) out.push_back(run.regret_series());
  }
  return out;
}

std::vector<int> first_encounter(const ExperimentResult& result, double tol) {
  return first_encounter(result.regret_series(), tol);
}

OracleReport run_oracle(const Objective& objective, std::uint64_t seed, std::size_t n_samples) {
  const Domain& domain = objective.domain();
  OracleReport rep;
  rep.objective = objective.name();
  rep.direction = objective.direction();
  rep.known_optimum = objective.known_optimum();
  double best_score = -std::numeric_limits<double>::infinity();
  double worst_score = std::numeric_limits<double>::infinity();
  if (domain.is_discrete()) {
    for (Eigen::Index r = 0; r < domain.candidates().rows(); ++r) {
      const double s = objective.score(domain.candidates().row(r).transpose());
      best_score = std::max(best_score, s);
      worst_score = std::min(worst_score, s);
    }
    rep.n_evaluations = domain.size();
  } else {
    Rng rng = make_rng(seed, 0);
    std::vector<std::pair<double, Vector>> top;
    for (std::size_t i = 0; i < n_samples; ++i) {
      Vector x = domain.sample_uniform(rng);
      const double s = objective.score(x);
      best_score = std::max(best_score, s);
      worst_score = std::min(worst_score, s);
      top.emplace_back(s, std::move(x));
      if (top.size() > 40) {
        std::partial_sort(top.begin(), top.begin() + 20, top.end(),
                          [](const auto& a, const auto& b) { return a.first > b.first; });
        top.resize(20);
      }
    }
    const ScalarFn f = [&objective](const Vector& x) { return objective.score(x); };
    AscentOptions polish;
    polish.max_iters = 500;
    for (const auto& [s, x] : top) best_score = std::max(best_score, local_ascent(f, domain.bounds(), x, polish).value);
    rep.n_evaluations = n_samples;
  }
  const double sign = direction_sign(objective.direction());
  rep.best_found = sign * best_score;
  rep.worst_found = sign * worst_score;
  if (rep.known_optimum) rep.violates_known_optimum = best_score > sign * *rep.known_optimum + 1e-9;
  return rep;
}

double default_fe_tolerance(const Objective& objective, std::uint64_t seed) {
  const OracleReport rep = run_oracle(objective, seed, 10000);
  return 1e-2 * std::abs(rep.worst_found - rep.best_found);
}

ExperimentSummary summarize(const ExperimentResult& result, double fe_tolerance) {
  ExperimentSummary s;
  s.fe_tolerance = fe_tolerance;
  const std::size_t n_epochs = result.config.n_epochs;
  std::vector<double> final_best, final_regret;
  std::vector<std::vector<double>> regret_by_epoch(n_epochs + 1);
  std::vector<double> wall_sum(n_epochs, 0.0);
  for (const auto& run : result.runs) {
    if (run.failed) {
      ++s.n_failed;
      continue;
    }
    ++s.n_success;
    final_best.push_back(run.epochs.empty() ? run.initial_best : run.epochs.back().best_so_far);
    for (std::size_t t = 0; t < run.epochs.size() && t < n_epochs; ++t) wall_sum[t] += run.epochs[t].wall_seconds;
    if (result.known_optimum) {
      const auto series = run.regret_series();
      final_regret.push_back(series.back());
      for (std::size_t t = 0; t < series.size() && t <= n_epochs; ++t) regret_by_epoch[t].push_back(series[t]);
    }
  }
  if (s.n_success == 0) return s;
  s.mean_final_best = mean(final_best);
  s.std_final_best = std_dev(final_best);
  for (double w : wall_sum) s.mean_wall_seconds.push_back(w / static_cast<double>(s.n_success));
  if (result.known_optimum) {
    s.mean_final_regret = mean(final_regret);
    s.std_final_regret = std_dev(final_regret);
    s.bootstrap_std_final_regret = bootstrap_std(final_regret, 1000, result.config.base_seed);
    for (std::size_t t = 0; t <= n_epochs; ++t) {
      const auto& v = regret_by_epoch[t];
      s.regret_quantiles.push_back({t, quantile(v, 0.1), quantile(v, 0.25), quantile(v, 0.5), quantile(v, 0.75),
                                    quantile(v, 0.9), mean(v), std_dev(v)});
    }
    s.first_encounter = first_encounter(result, fe_tolerance);
  }
  return s;
}

ExperimentResult run_experiment(const ExperimentConfig& config, const StrategyFactory& factory) {
  config.validate();
  const Objective objective = make_objective(config.objective);
  ExperimentResult result;
  result.config = config;
  result.objective = objective.name();
  result.direction = objective.direction();
  result.known_optimum = objective.known_optimum();
  result.objective_dim = objective.dim();
  result.runs.resize(config.n_repeats);

  const LoopConfig loop{config.batch_size, config.n_epochs, config.n_init};
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t r = next++; r < config.n_repeats; r = next++) {
      try {
        std::unique_ptr<Strategy> strategy = factory ? factory() : make_strategy(config);
        result.runs[r] = run_bo(objective, *strategy, loop, config.base_seed + r);
      } catch (...) {
        const std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const std::size_t n_threads = std::min(config.jobs, config.n_repeats);
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t i = 0; i < n_threads; ++i) pool.emplace_back(worker);
  }
  if (error) std::rethrow_exception(error);

  for (std::size_t r = 0; r < result.runs.size(); ++r) {
    if (result.runs[r].failed) {
      result.warnings.push_back("repeat " + std::to_string(r) + " failed: " + result.runs[r].failure);
    }
  }
  double tol = 0.0;
  if (result.known_optimum) tol = config.fe_tolerance ? *config.fe_tolerance : default_fe_tolerance(objective);
  result.summary = summarize(result, tol);
  if (result.summary.n_success == 0) result.warnings.push_back("every repeat failed; summary statistics are empty");
  return result;
}

}  // namespace batchbo
