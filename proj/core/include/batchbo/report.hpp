#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "batchbo/harness.hpp"
#include "batchbo/metrics.hpp"

namespace batchbo {

inline constexpr int kSchemaVersion = 1;

/// Full experiment record. Without timing, wall-clock fields are left out so
/// the text depends only on the configuration and seeds.
std::string to_json(const ExperimentResult& result, bool include_timing = true);

/// What rank and round-trip checks need back from a result.json.
struct ResultDigest {
  int schema_version = 0;
  std::string task;
  std::string strategy;
  std::size_t n_repeats = 0;
  std::size_t n_epochs = 0;
  ExperimentSummary summary;
};

/// Throws IoError on malformed input or an unknown schema version.
ResultDigest parse_result_json(const std::string& text);
ResultDigest load_result(const std::filesystem::path& path_or_dir);

/// CSV writers. Headers:
///   regret_quantiles.csv  epoch,regret_q10,regret_q25,regret_median,regret_q75,regret_q90,regret_mean,regret_std
///   first_encounter.csv   epoch,count,tolerance   (last row: never)
///   final_table.csv       task,strategy,regret,std_dev,bootstrap_std_dev,n_success,n_failed
std::string regret_quantiles_csv(const ExperimentResult& result);
std::string first_encounter_csv(const ExperimentResult& result);
std::string final_table_csv(const std::vector<ResultDigest>& results);

/// Writes the three CSVs and result.json into dir (created if missing).
/// Throws IoError when the directory cannot be written.
void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

struct RankReport {
  AggregateZ aggregate;
  ScoreTable table;
  /// task -> strategy -> (z of regret, z of std-dev).
  std::map<std::string, std::map<std::string, std::pair<double, double>>> task_z;
};

/// Z-score ranking over result digests, scored by mean final regret.
RankReport rank_results(const std::vector<ResultDigest>& results);
///   rank.csv       strategy,z_performance,z_variance,n_tasks
std::string rank_csv(const RankReport& report);
///   rank_tasks.csv task,strategy,regret,std_dev,z_regret,z_std_dev
std::string rank_tasks_csv(const RankReport& report);

std::string format_number(double v);

}  // namespace batchbo
