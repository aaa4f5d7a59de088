// batchbo: run batch BO experiments, rank strategies, verify benchmark optima.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "batchbo/benchmarks.hpp"
#include "batchbo/errors.hpp"
#include "batchbo/harness.hpp"
#include "batchbo/report.hpp"

namespace {

void add_objective_flags(CLI::App& cmd, batchbo::ObjectiveSpec& spec) {
  cmd.add_option("--objective", spec.name, "branin | camel6 | hartmann6 | sparse-pool")
      ->check(CLI::IsMember(batchbo::objective_names()));
  cmd.add_option("--pool-size", spec.pool.n_candidates, "sparse-pool candidate count");
  cmd.add_option("--pool-dim", spec.pool.dim, "sparse-pool bit width");
  cmd.add_option("--pool-sparsity", spec.pool.sparsity, "non-zero weights of the hidden model");
  cmd.add_option("--pool-seed", spec.pool.seed, "sparse-pool construction seed");
}

void print_summary(const batchbo::ExperimentResult& r) {
  const auto& s = r.summary;
  std::cout << "objective " << r.objective << "  strategy " << r.config.strategy << "  repeats " << s.n_success
            << " ok / " << s.n_failed << " failed\n";
  if (s.mean_final_best) {
    std::cout << "final best   mean " << batchbo::format_number(*s.mean_final_best) << "  std "
              << batchbo::format_number(*s.std_final_best) << '\n';
  }
  if (s.mean_final_regret) {
    std::cout << "final regret mean " << batchbo::format_number(*s.mean_final_regret) << "  std "
              << batchbo::format_number(*s.std_final_regret) << "  bootstrap std "
              << batchbo::format_number(*s.bootstrap_std_final_regret) << '\n';
    std::size_t hit = 0;
    for (int t : s.first_encounter) hit += t != batchbo::kNeverEncountered;
    std::cout << "first encounter (tol " << batchbo::format_number(s.fe_tolerance) << "): " << hit << " of "
              << s.first_encounter.size() << " repeats\n";
  }
  double wall = 0.0;
  for (double w : s.mean_wall_seconds) wall += w;
  if (!s.mean_wall_seconds.empty()) {
    std::cout << "mean seconds per epoch " << batchbo::format_number(wall / static_cast<double>(s.mean_wall_seconds.size()))
              << '\n';
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw batchbo::IoError("cannot write " + path.string());
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Batch Bayesian optimization experiments"};
  app.require_subcommand(1);

  batchbo::ExperimentConfig cfg;
  std::string out_dir = "results";
  double fe_tol = -1.0;
  auto* run = app.add_subcommand("run", "run repeated optimization experiments");
  run->set_config("--config", "", "TOML/INI file with any of the flags below");
  add_objective_flags(*run, cfg.objective);
  run->add_option("--strategy", cfg.strategy, "kmbbo | cs-kmbbo | thompson | cl | qei | lp | random")
      ->check(CLI::IsMember(batchbo::strategy_names()));
  run->add_option("--batch-size", cfg.batch_size, "points per epoch")->capture_default_str();
  run->add_option("--epochs", cfg.n_epochs, "sampling epochs")->capture_default_str();
  run->add_option("--init", cfg.n_init, "uniform initial points")->capture_default_str();
  run->add_option("--repeats", cfg.n_repeats, "independent repeats")->capture_default_str();
  run->add_option("--seed", cfg.base_seed, "base seed; repeat r uses seed + r")->capture_default_str();
  run->add_option("--slice-samples", cfg.n_slice, "slice samples per batch")->capture_default_str();
  run->add_option("--gp-restarts", cfg.gp_restarts, "hyperparameter restarts")->capture_default_str();
  run->add_option("--gp-max-iters", cfg.gp_max_iters, "gradient steps per restart")->capture_default_str();
  run->add_option("--cs-epsilon", cfg.cs_epsilon, "compression error tolerance")->capture_default_str();
  run->add_option("--cs-calibration-samples", cfg.cs_calibration_samples, "compression calibration draws")
      ->capture_default_str();
  run->add_option("--fe-tol", fe_tol, "first-encounter regret tolerance (default: 1% of the value range)");
  run->add_option("--jobs", cfg.jobs, "worker threads")->capture_default_str();
  run->add_option("--out", out_dir, "output directory")->capture_default_str();

  std::vector<std::string> inputs;
  std::string rank_out;
  auto* rank = app.add_subcommand("rank", "Z-score ranking over result directories");
  rank->add_option("--inputs", inputs, "result directories or result.json files")->required();
  rank->add_option("--out", rank_out, "directory for rank.csv, rank_tasks.csv, final_table.csv");

  batchbo::ObjectiveSpec oracle_spec;
  std::size_t oracle_samples = 100000;
  std::uint64_t oracle_seed = 0;
  auto* oracle = app.add_subcommand("oracle", "brute-force check of a benchmark's known optimum");
  add_objective_flags(*oracle, oracle_spec);
  oracle->add_option("--samples", oracle_samples, "uniform draws on boxes")->capture_default_str();
  oracle->add_option("--seed", oracle_seed, "sweep seed")->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      if (fe_tol >= 0.0) cfg.fe_tolerance = fe_tol;
      const auto result = batchbo::run_experiment(cfg);
      batchbo::write_outputs(result, out_dir);
      for (const auto& w : result.warnings) std::cerr << "warning: " << w << '\n';
      print_summary(result);
      std::cout << "wrote " << out_dir << '\n';
    } else if (*rank) {
      std::vector<batchbo::ResultDigest> digests;
      for (const auto& in : inputs) digests.push_back(batchbo::load_result(in));
      const auto report = batchbo::rank_results(digests);
      for (const auto& w : report.aggregate.warnings) std::cerr << "warning: " << w << '\n';
      std::cout << batchbo::rank_csv(report);
      if (!rank_out.empty()) {
        std::filesystem::create_directories(rank_out);
        write_text(std::filesystem::path(rank_out) / "rank.csv", batchbo::rank_csv(report));
        write_text(std::filesystem::path(rank_out) / "rank_tasks.csv", batchbo::rank_tasks_csv(report));
        write_text(std::filesystem::path(rank_out) / "final_table.csv", batchbo::final_table_csv(digests));
      }
    } else if (*oracle) {
      const auto objective = batchbo::make_objective(oracle_spec);
      const auto rep = batchbo::run_oracle(objective, oracle_seed, oracle_samples);
      std::cout << "objective " << rep.objective << " (" << batchbo::to_string(rep.direction) << ")\n"
                << "evaluations " << rep.n_evaluations << '\n'
                << "best found  " << batchbo::format_number(rep.best_found) << '\n'
                << "worst found " << batchbo::format_number(rep.worst_found) << '\n';
      if (rep.known_optimum) std::cout << "known       " << batchbo::format_number(*rep.known_optimum) << '\n';
      if (rep.violates_known_optimum) {
        std::cout << "FAIL: sweep beat the known optimum\n";
        return 1;
      }
      std::cout << "ok\n";
    }
  } catch (const batchbo::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
