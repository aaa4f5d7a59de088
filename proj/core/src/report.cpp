#include "batchbo/report.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "batchbo/errors.hpp"
#include "json.hpp"

namespace batchbo {
namespace {

using nlohmann::json;

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> read_optional(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

json matrix_rows(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

json config_json(const ExperimentConfig& c) {
  return {{"objective", c.objective.name},
          {"pool_size", c.objective.pool.n_candidates},
          {"pool_dim", c.objective.pool.dim},
          {"pool_sparsity", c.objective.pool.sparsity},
          {"pool_seed", c.objective.pool.seed},
          {"strategy", c.strategy},
          {"batch_size", c.batch_size},
          {"epochs", c.n_epochs},
          {"init", c.n_init},
          {"slice_samples", c.n_slice},
          {"repeats", c.n_repeats},
          {"seed", c.base_seed},
          {"gp_restarts", c.gp_restarts},
          {"gp_max_iters", c.gp_max_iters},
          {"cs_epsilon", c.cs_epsilon},
          {"cs_calibration_samples", c.cs_calibration_samples},
          {"fe_tolerance", c.fe_tolerance ? json(*c.fe_tolerance) : json(nullptr)}};
}

json summary_json(const ExperimentSummary& s, bool include_timing) {
  json q = json::array();
  for (const auto& e : s.regret_quantiles) {
    q.push_back({{"epoch", e.epoch},
                 {"q10", e.q10},
                 {"q25", e.q25},
                 {"median", e.median},
                 {"q75", e.q75},
                 {"q90", e.q90},
                 {"mean", e.mean},
                 {"std_dev", e.std_dev}});
  }
  json fe = json::array();
  for (int t : s.first_encounter) fe.push_back(t == kNeverEncountered ? json(nullptr) : json(t));
  json j = {{"n_success", s.n_success},
            {"n_failed", s.n_failed},
            {"mean_final_best", optional_number(s.mean_final_best)},
            {"std_final_best", optional_number(s.std_final_best)},
            {"mean_final_regret", optional_number(s.mean_final_regret)},
            {"std_final_regret", optional_number(s.std_final_regret)},
            {"bootstrap_std_final_regret", optional_number(s.bootstrap_std_final_regret)},
            {"regret_quantiles", std::move(q)},
            {"fe_tolerance", s.fe_tolerance},
            {"first_encounter", std::move(fe)}};
  if (include_timing) j["mean_wall_seconds"] = s.mean_wall_seconds;
  return j;
}

ExperimentSummary parse_summary(const json& j) {
  ExperimentSummary s;
  s.n_success = j.at("n_success").get<std::size_t>();
  s.n_failed = j.at("n_failed").get<std::size_t>();
  s.mean_final_best = read_optional(j, "mean_final_best");
  s.std_final_best = read_optional(j, "std_final_best");
  s.mean_final_regret = read_optional(j, "mean_final_regret");
  s.std_final_regret = read_optional(j, "std_final_regret");
  s.bootstrap_std_final_regret = read_optional(j, "bootstrap_std_final_regret");
  for (const auto& e : j.at("regret_quantiles")) {
    s.regret_quantiles.push_back({e.at("epoch").get<std::size_t>(), e.at("q10").get<double>(),
                                  e.at("q25").get<double>(), e.at("median").get<double>(), e.at("q75").get<double>(),
                                  e.at("q90").get<double>(), e.at("mean").get<double>(),
                                  e.at("std_dev").get<double>()});
  }
  s.fe_tolerance = j.at("fe_tolerance").get<double>();
  for (const auto& t : j.at("first_encounter")) s.first_encounter.push_back(t.is_null() ? kNeverEncountered : t.get<int>());
  if (j.contains("mean_wall_seconds")) s.mean_wall_seconds = j.at("mean_wall_seconds").get<std::vector<double>>();
  return s;
}

json gp_json(const GpSnapshot& gp) {
  return {{"signal_variance", gp.signal_variance},
          {"lengthscales", gp.lengthscales},
          {"noise_variance", gp.noise_variance},
          {"log_marginal_likelihood", gp.log_marginal_likelihood},
          {"jitter", gp.jitter}};
}

json run_json(const RunRecord& run, std::size_t index, bool include_timing) {
  json epochs = json::array();
  for (const auto& e : run.epochs) {
    json rec = {{"epoch", e.epoch},
                {"batch", matrix_rows(e.batch)},
                {"provenance", e.provenance},
                {"values", e.values},
                {"best_so_far", e.best_so_far},
                {"regret", optional_number(e.regret)},
                {"flags", e.flags},
                {"gp", e.gp ? gp_json(*e.gp) : json(nullptr)}};
    if (include_timing) rec["wall_seconds"] = e.wall_seconds;
    epochs.push_back(std::move(rec));
  }
  json j = {{"repeat", index},
            {"seed", run.seed},
            {"failed", run.failed},
            {"failure", run.failure},
            {"initial", {{"points", matrix_rows(run.initial_points)},
                         {"values", run.initial_values},
                         {"best", run.initial_best},
                         {"regret", optional_number(run.initial_regret)}}},
            {"epochs", std::move(epochs)}};
  if (run.compression) {
    const CompressionSummary& c = *run.compression;
    j["compression"] = {{"original_dim", c.original_dim},
                        {"compressed_dim", c.compressed_dim},
                        {"sparsity_estimate", c.sparsity_estimate},
                        {"incoherence_estimate", c.incoherence_estimate},
                        {"epsilon", c.epsilon},
                        {"calibration_error", c.calibration_error},
                        {"energy_spectrum", c.energy_spectrum},
                        {"identity_fallback", c.identity_fallback}};
  } else {
    j["compression"] = nullptr;
  }
  return j;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace

std::string format_number(double v) {
  if (std::isnan(v)) return "";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

std::string to_json(const ExperimentResult& result, bool include_timing) {
  json runs = json::array();
  for (std::size_t r = 0; r < result.runs.size(); ++r) runs.push_back(run_json(result.runs[r], r, include_timing));
  const json j = {{"schema_version", kSchemaVersion},
                  {"config", config_json(result.config)},
                  {"objective", {{"name", result.objective},
                                 {"direction", to_string(result.direction)},
                                 {"known_optimum", optional_number(result.known_optimum)},
                                 {"dim", result.objective_dim}}},
                  {"summary", summary_json(result.summary, include_timing)},
                  {"warnings", result.warnings},
                  {"repeats", std::move(runs)}};
  return j.dump(1) + "\n";
}

ResultDigest parse_result_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    ResultDigest d;
    d.schema_version = j.at("schema_version").get<int>();
    if (d.schema_version != kSchemaVersion) {
      throw IoError("unsupported schema_version " + std::to_string(d.schema_version));
    }
    d.task = j.at("objective").at("name").get<std::string>();
    d.strategy = j.at("config").at("strategy").get<std::string>();
    d.n_repeats = j.at("config").at("repeats").get<std::size_t>();
    d.n_epochs = j.at("config").at("epochs").get<std::size_t>();
    d.summary = parse_summary(j.at("summary"));
    return d;
  } catch (const json::exception& e) {
    throw IoError(std::string("malformed result JSON: ") + e.what());
  }
}

ResultDigest load_result(const std::filesystem::path& path_or_dir) {
  const auto path = std::filesystem::is_directory(path_or_dir) ? path_or_dir / "result.json" : path_or_dir;
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_result_json(ss.str());
}

std::string regret_quantiles_csv(const ExperimentResult& result) {
  std::ostringstream out;
  out << "epoch,regret_q10,regret_q25,regret_median,regret_q75,regret_q90,regret_mean,regret_std\n";
  const auto& q = result.summary.regret_quantiles;
  for (std::size_t t = 1; t <= result.config.n_epochs; ++t) {
    out << t;
    if (t < q.size()) {
      const auto& e = q[t];
      for (double v : {e.q10, e.q25, e.median, e.q75, e.q90, e.mean, e.std_dev}) out << ',' << format_number(v);
    } else {
      out << ",,,,,,,";
    }
    out << '\n';
  }
  return out.str();
}

std::string first_encounter_csv(const ExperimentResult& result) {
  const auto& fe = result.summary.first_encounter;
  std::ostringstream out;
  out << "epoch,count,tolerance\n";
  const std::string tol = format_number(result.summary.fe_tolerance);
  for (std::size_t t = 0; t <= result.config.n_epochs; ++t) {
    out << t << ',' << std::count(fe.begin(), fe.end(), static_cast<int>(t)) << ',' << tol << '\n';
  }
  out << "never," << std::count(fe.begin(), fe.end(), kNeverEncountered) << ',' << tol << '\n';
  return out.str();
}

std::string final_table_csv(const std::vector<ResultDigest>& results) {
  std::ostringstream out;
  out << "task,strategy,regret,std_dev,bootstrap_std_dev,n_success,n_failed\n";
  for (const auto& d : results) {
    const auto& s = d.summary;
    out << d.task << ',' << d.strategy << ',' << format_number(s.mean_final_regret.value_or(std::nan(""))) << ','
        << format_number(s.std_final_regret.value_or(std::nan(""))) << ','
        << format_number(s.bootstrap_std_final_regret.value_or(std::nan(""))) << ',' << s.n_success << ','
        << s.n_failed << '\n';
  }
  return out.str();
}

void write_outputs(const ExperimentResult& result, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const std::string json_text = to_json(result);
  write_file(dir / "result.json", json_text);
  write_file(dir / "regret_quantiles.csv", regret_quantiles_csv(result));
  write_file(dir / "first_encounter.csv", first_encounter_csv(result));
  write_file(dir / "final_table.csv", final_table_csv({parse_result_json(json_text)}));
}

RankReport rank_results(const std::vector<ResultDigest>& results) {
  RankReport rep;
  std::vector<std::string> skipped;
  for (const auto& d : results) {
    if (!d.summary.mean_final_regret) {
      skipped.push_back("result for " + d.task + "/" + d.strategy + " has no regret; skipped");
      continue;
    }
    auto& row = rep.table[d.task];
    if (row.contains(d.strategy)) throw ParameterError("duplicate result for " + d.task + "/" + d.strategy);
    row[d.strategy] = {*d.summary.mean_final_regret, d.summary.std_final_regret.value_or(0.0)};
  }
  rep.aggregate = aggregate_z(rep.table);
  rep.aggregate.warnings.insert(rep.aggregate.warnings.begin(), skipped.begin(), skipped.end());
  for (const auto& [task, row] : rep.table) {
    if (row.size() < 2) continue;
    std::vector<double> scores, spreads;
    for (const auto& [name, s] : row) {
      scores.push_back(s.score);
      spreads.push_back(s.std_dev);
    }
    const auto zp = z_score(scores).z;
    const auto zv = z_score(spreads).z;
    std::size_t i = 0;
    for (const auto& [name, s] : row) {
      rep.task_z[task][name] = {zp[i], zv[i]};
      ++i;
    }
  }
  return rep;
}

std::string rank_csv(const RankReport& report) {
  std::ostringstream out;
  out << "strategy,z_performance,z_variance,n_tasks\n";
  for (const auto& [name, z] : report.aggregate.performance) {
    out << name << ',' << format_number(z) << ',' << format_number(report.aggregate.variance.at(name)) << ','
        << report.aggregate.n_tasks.at(name) << '\n';
  }
  return out.str();
}

std::string rank_tasks_csv(const RankReport& report) {
  std::ostringstream out;
  out << "task,strategy,regret,std_dev,z_regret,z_std_dev\n";
  for (const auto& [task, row] : report.table) {
    for (const auto& [name, s] : row) {
      out << task << ',' << name << ',' << format_number(s.score) << ',' << format_number(s.std_dev) << ',';
      const auto t = report.task_z.find(task);
      if (t != report.task_z.end()) {
        const auto& z = t->second.at(name);
        out << format_number(z.first) << ',' << format_number(z.second);
      } else {
        out << ',';
      }
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace batchbo
