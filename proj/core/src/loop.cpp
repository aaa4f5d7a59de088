#include "batchbo/loop.hpp"

#include <algorithm>
#include <chrono>

#include "batchbo/errors.hpp"

namespace batchbo {

GpSnapshot GpSnapshot::of(const GpPosterior& gp) {
  GpSnapshot s;
  const GpHyperparams& hp = gp.hyperparams();
  s.signal_variance = hp.signal_variance;
  s.lengthscales.assign(hp.lengthscales.data(), hp.lengthscales.data() + hp.lengthscales.size());
  s.noise_variance = hp.noise_variance;
  s.log_marginal_likelihood = gp.log_marginal_likelihood();
  s.jitter = gp.jitter();
  return s;
}

StrategyKind parse_strategy(const std::string& name) {
  if (name == "kmbbo") return StrategyKind::kmbbo;
  if (name == "cs-kmbbo") return StrategyKind::cs_kmbbo;
  if (name == "thompson") return StrategyKind::thompson;
  if (name == "cl") return StrategyKind::constant_liar;
  if (name == "qei") return StrategyKind::naive_qei;
  if (name == "lp") return StrategyKind::local_penalization;
  if (name == "random") return StrategyKind::random;
  throw ParameterError("unknown strategy '" + name + "'");
}

std::string to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::kmbbo: return "kmbbo";
    case StrategyKind::cs_kmbbo: return "cs-kmbbo";
    case StrategyKind::thompson: return "thompson";
    case StrategyKind::constant_liar: return "cl";
    case StrategyKind::naive_qei: return "qei";
    case StrategyKind::local_penalization: return "lp";
    case StrategyKind::random: return "random";
  }
  return "unknown";
}

std::vector<std::string> strategy_names() { return {"kmbbo", "cs-kmbbo", "thompson", "cl", "qei", "lp", "random"}; }

GpBatchStrategy::GpBatchStrategy(StrategyKind kind, StrategyOptions options) : kind_(kind), options_(std::move(options)) {
  if (kind == StrategyKind::cs_kmbbo || kind == StrategyKind::random) {
    throw ParameterError("GpBatchStrategy does not implement " + to_string(kind));
  }
}

Proposal GpBatchStrategy::propose(const Objective& objective, const Dataset& data, std::size_t k, std::uint64_t seed) {
  const Domain& domain = objective.domain();
  const GpPosterior gp = fit_gp(data, domain, options_.gp, derive_seed(seed, 0));
  const std::uint64_t batch_seed = derive_seed(seed, 1);
  Proposal out;
  out.gp = GpSnapshot::of(gp);
  switch (kind_) {
    case StrategyKind::kmbbo: out.batch = kmbbo_batch(gp, data, domain, k, options_.n_slice, batch_seed, options_); break;
    case StrategyKind::thompson: out.batch = thompson_batch(gp, data, domain, k, options_.n_grid, batch_seed); break;
    case StrategyKind::constant_liar: out.batch = constant_liar_batch(gp, data, domain, k, batch_seed, options_); break;
    case StrategyKind::naive_qei: out.batch = naive_qei_batch(gp, data, domain, k, options_.n_grid, batch_seed); break;
    case StrategyKind::local_penalization: out.batch = lp_batch(gp, data, domain, k, batch_seed, options_); break;
    default: throw ParameterError("unsupported strategy");
  }
  return out;
}

Proposal RandomStrategy::propose(const Objective& objective, const Dataset& data, std::size_t k, std::uint64_t seed) {
  return {random_batch(data, objective.domain(), k, seed), std::nullopt};
}

std::vector<double> RunRecord::regret_series() const {
  std::vector<double> out;
  if (!initial_regret) return out;
  out.push_back(*initial_regret);
  for (const auto& e : epochs) out.push_back(e.regret.value_or(0.0));
  return out;
}

RunRecord run_bo(const Objective& objective, Strategy& strategy, const LoopConfig& config, std::uint64_t seed) {
  if (config.batch_size < 1 || config.n_epochs < 1 || config.n_init < 1) {
    throw ParameterError("batch size, epochs and initial design size must all be >= 1");
  }
  RunRecord run;
  run.seed = seed;
  run.data = Dataset(objective.direction());
  const Domain& domain = objective.domain();

  Rng init_rng = make_rng(seed, 1);
  run.initial_points = domain.sample_uniform(config.n_init, init_rng);
  for (Eigen::Index i = 0; i < run.initial_points.rows(); ++i) {
    const Vector x = run.initial_points.row(i).transpose();
    const double y = objective.eval(x);
    run.initial_values.push_back(y);
    run.data.append(x, y);
  }
  run.initial_best = run.data.best_value();
  run.initial_regret = objective.regret(run.initial_best);

  try {
    strategy.prepare(objective, derive_seed(seed, 2));
    run.compression = strategy.compression();
    for (std::size_t t = 1; t <= config.n_epochs; ++t) {
      const auto start = std::chrono::steady_clock::now();
      Proposal proposal = strategy.propose(objective, run.data, config.batch_size, derive_seed(seed, 1000 + t));
      const Batch& batch = proposal.batch;
      if (batch.size() != config.batch_size) throw StrategyError(strategy.name() + " returned a batch of the wrong size");

      EpochRecord rec;
      rec.epoch = t;
      rec.batch = batch.points;
      for (auto p : batch.provenance) rec.provenance.push_back(to_string(p));
      rec.flags = batch.flags;
      rec.gp = proposal.gp;
      for (Eigen::Index i = 0; i < batch.points.rows(); ++i) {
        const Vector x = batch.points.row(i).transpose();
        if (!domain.contains(x)) throw StrategyError(strategy.name() + " proposed a point outside the domain");
        const double y = objective.eval(x);
        rec.values.push_back(y);
        run.data.append(x, y);
      }
      rec.best_so_far = run.data.best_value();
      rec.regret = objective.regret(rec.best_so_far);
      const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start;
      rec.wall_seconds = std::max(elapsed.count(), 1e-9);
      run.epochs.push_back(std::move(rec));
    }
  } catch (const Error& e) {
    run.failed = true;
    run.failure = e.what();
  }
  return run;
}

}  // namespace batchbo
