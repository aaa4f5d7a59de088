#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "batchbo/domain.hpp"
#include "batchbo/gp.hpp"
#include "batchbo/strategies.hpp"

namespace batchbo {

/// Fitted surrogate state logged with every epoch (working coordinates).
struct GpSnapshot {
  double signal_variance = 0.0;
  std::vector<double> lengthscales;
  double noise_variance = 0.0;
  double log_marginal_likelihood = 0.0;
  double jitter = 0.0;

  static GpSnapshot of(const GpPosterior& gp);
};

/// What a compressed-space strategy learned before its first epoch.
struct CompressionSummary {
  std::size_t original_dim = 0;
  std::size_t compressed_dim = 0;
  std::size_t sparsity_estimate = 0;
  double incoherence_estimate = 0.0;
  double epsilon = 0.0;
  double calibration_error = 0.0;
  std::vector<double> energy_spectrum;
  bool identity_fallback = false;
};

struct Proposal {
  Batch batch;
  std::optional<GpSnapshot> gp;
};

/// A batch-construction policy driven by the optimization loop.
class Strategy {
 public:
  virtual ~Strategy() = default;
  virtual std::string name() const = 0;
  /// Once per run, before the first epoch.
  virtual void prepare(const Objective& /*objective*/, std::uint64_t /*seed*/) {}
  virtual Proposal propose(const Objective& objective, const Dataset& data, std::size_t k, std::uint64_t seed) = 0;
  virtual std::optional<CompressionSummary> compression() const { return std::nullopt; }
};

enum class StrategyKind { kmbbo, cs_kmbbo, thompson, constant_liar, naive_qei, local_penalization, random };

/// Parses kmbbo | cs-kmbbo | thompson | cl | qei | lp | random.
StrategyKind parse_strategy(const std::string& name);
std::string to_string(StrategyKind kind);
std::vector<std::string> strategy_names();

/// Fits a GP on the data every epoch and hands it to one batch builder.
class GpBatchStrategy : public Strategy {
 public:
  GpBatchStrategy(StrategyKind kind, StrategyOptions options);
  std::string name() const override { return to_string(kind_); }
  Proposal propose(const Objective& objective, const Dataset& data, std::size_t k, std::uint64_t seed) override;

 private:
  StrategyKind kind_;
  StrategyOptions options_;
};

class RandomStrategy : public Strategy {
 public:
  std::string name() const override { return "random"; }
  Proposal propose(const Objective& objective, const Dataset& data, std::size_t k, std::uint64_t seed) override;
};

struct LoopConfig {
  std::size_t batch_size = 8;
  std::size_t n_epochs = 10;
  std::size_t n_init = 10;
};

struct EpochRecord {
  std::size_t epoch = 0;
  Matrix batch;
  std::vector<std::string> provenance;
  std::vector<double> values;
  double best_so_far = 0.0;
  std::optional<double> regret;
  double wall_seconds = 0.0;
  std::vector<std::string> flags;
  std::optional<GpSnapshot> gp;
};

struct RunRecord {
  std::uint64_t seed = 0;
  Matrix initial_points;
  std::vector<double> initial_values;
  double initial_best = 0.0;
  std::optional<double> initial_regret;
  std::vector<EpochRecord> epochs;
  std::optional<CompressionSummary> compression;
  bool failed = false;
  std::string failure;
  Dataset data;

  /// Regret after the initial design (index 0) and after each epoch.
  std::vector<double> regret_series() const;
};

/// n_init uniform initial points, then n_epochs rounds of propose, evaluate, append.
/// Strategy errors mark the run failed and stop it; they are not rethrown.
RunRecord run_bo(const Objective& objective, Strategy& strategy, const LoopConfig& config, std::uint64_t seed);

}  // namespace batchbo
