#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "batchbo/benchmarks.hpp"
#include "batchbo/loop.hpp"

namespace batchbo {

struct ExperimentConfig {
  ObjectiveSpec objective;
  std::string strategy = "kmbbo";
  std::size_t batch_size = 8;
  std::size_t n_epochs = 10;
  std::size_t n_init = 10;
  std::size_t n_slice = 200;
  std::size_t n_repeats = 100;
  std::uint64_t base_seed = 42;
  int gp_restarts = 5;
  int gp_max_iters = 100;
  double cs_epsilon = 0.05;
  std::size_t cs_calibration_samples = 1000;
  /// Worker threads for repeats; results never depend on it.
  std::size_t jobs = 1;
  /// First-encounter tolerance; defaults to 1% of the oracle value range.
  std::optional<double> fe_tolerance;

  /// Throws ParameterError on zero counts or unknown names.
  void validate() const;
  StrategyOptions strategy_options() const;
};

std::unique_ptr<Strategy> make_strategy(const ExperimentConfig& config);

/// Regret distribution after the initial design (epoch 0) or an epoch.
struct EpochQuantiles {
  std::size_t epoch = 0;
  double q10 = 0.0, q25 = 0.0, median = 0.0, q75 = 0.0, q90 = 0.0;
  double mean = 0.0, std_dev = 0.0;
};

struct ExperimentSummary {
  std::size_t n_success = 0;
  std::size_t n_failed = 0;
  /// Best value after the last epoch (native sign), over successful repeats.
  std::optional<double> mean_final_best;
  std::optional<double> std_final_best;
  std::optional<double> mean_final_regret;
  std::optional<double> std_final_regret;
  std::optional<double> bootstrap_std_final_regret;
  std::vector<EpochQuantiles> regret_quantiles;  // epochs 0..N
  double fe_tolerance = 0.0;
  std::vector<int> first_encounter;
  /// Mean wall-clock seconds per epoch (index t-1 for epoch t).
  std::vector<double> mean_wall_seconds;
};

struct ExperimentResult {
  ExperimentConfig config;
  std::string objective;
  Direction direction = Direction::minimize;
  std::optional<double> known_optimum;
  std::size_t objective_dim = 0;
  /// One record per repeat in repeat order, failed ones included.
  std::vector<RunRecord> runs;
  ExperimentSummary summary;
  std::vector<std::string> warnings;

  /// Regret series of the successful repeats. Throws MetricUnavailableError
  /// when the objective has no known optimum.
  std::vector<std::vector<double>> regret_series() const;
};

/// Per-repeat first-encounter epochs. Throws MetricUnavailableError without a known optimum.
std::vector<int> first_encounter(const ExperimentResult& result, double tol);

/// Best and worst values seen by a brute-force sweep (10^5 uniform points
/// polished by local search on boxes, the whole pool otherwise).
struct OracleReport {
  std::string objective;
  Direction direction = Direction::minimize;
  std::optional<double> known_optimum;
  double best_found = 0.0;
  double worst_found = 0.0;
  std::size_t n_evaluations = 0;
  /// best_found beat known_optimum by more than 1e-9.
  bool violates_known_optimum = false;
};

OracleReport run_oracle(const Objective& objective, std::uint64_t seed, std::size_t n_samples = 100000);

/// 1% of the value range an n-point uniform sweep sees (exact range on pools).
double default_fe_tolerance(const Objective& objective, std::uint64_t seed = 0);

using StrategyFactory = std::function<std::unique_ptr<Strategy>()>;

/// Runs config.n_repeats independent repeats (seed base_seed + r) and summarizes.
/// A custom factory replaces the configured strategy.
ExperimentResult run_experiment(const ExperimentConfig& config, const StrategyFactory& factory = {});

/// Recomputes summary statistics from the runs.
ExperimentSummary summarize(const ExperimentResult& result, double fe_tolerance);

}  // namespace batchbo
