// Copyright 2026 The bayesfblin Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// bayesfblin: run pendulum identification-and-control experiments.

#include <glob.h>

#include <cmath>
#include <fstream>
#include <future>
#include <iostream>
#include <numbers>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "bayesfblin/errors.hpp"
#include "bayesfblin/harness.hpp"
#include "bayesfblin/logging.hpp"

namespace {

namespace fs = std::filesystem;
using namespace bayesfblin;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitNotConverged = 2;

std::vector<std::string> expand_glob(const std::string& pattern) {
  glob_t g{};
  std::vector<std::string> out;
  if (::glob(pattern.c_str(), 0, nullptr, &g) == 0) {
    for (std::size_t i = 0; i < g.gl_pathc; ++i) out.emplace_back(g.gl_pathv[i]);
  }
  globfree(&g);
  return out;
}

void print_summary(const RunRecord& r) {
  const Metrics m = metrics(r);
  std::cout << r.name << ": energy=" << m.energy << " error=" << m.error << " |D_a|=" << m.n_data_a
            << " |D_b|=" << m.n_data_b << " converged=" << (converged(r) ? "yes" : "no") << '\n';
}

int cmd_run(const std::string& config_path, const std::string& model_in, const std::string& model_out,
            const std::string& out_dir) {
  ExperimentConfig config = load_config(config_path);
  if (!model_in.empty()) config.model_in = model_in;
  if (!model_out.empty()) config.model_out = model_out;
  const RunRecord record = run(config);
  report(std::span<const RunRecord>(&record, 1), out_dir);
  print_summary(record);
  if (!record.complete) return kExitError;
  return converged(record) ? kExitOk : kExitNotConverged;
}

int cmd_optimize(const std::string& config_path, const std::string& model_in,
                 const std::string& config_out) {
  const ExperimentConfig config = load_config(config_path);
  const ExperimentConfig tuned = optimize_mode(config, load_models(model_in));
  std::ofstream out(config_out);
  if (!out) throw Error("cannot write " + config_out);
  out << config_to_json(tuned).dump(2) << '\n';
  return kExitOk;
}

int cmd_metrics(const std::string& csv_path, const std::vector<double>& xi) {
  RunRecord record;
  record.name = fs::path(csv_path).stem().string();
  record.rows = read_trajectory_csv(csv_path);
  record.xi = State::scalar(xi.at(0), xi.at(1));
  record.delta_u = record.rows.size() > 1 ? record.rows[1].t - record.rows[0].t : 0.0;
  if (!record.rows.empty()) {
    const auto& last = record.rows.back();
    record.terminal = State::scalar(last.x1, last.x2);
  }
  const Metrics m = metrics(record);
  std::size_t probe_steps = 0;
  for (const auto& row : record.rows) probe_steps += row.phase == "normal" ? 0 : 1;
  const nlohmann::json j{{"energy", m.energy},
                         {"error", m.error},
                         {"steps", record.rows.size()},
                         {"probe_steps", probe_steps},
                         {"probe_episodes", probe_steps / 3},
                         {"converged", converged(record)}};
  std::cout << j.dump(2) << '\n';
  return kExitOk;
}

int cmd_batch(const std::string& pattern, const std::string& out_dir) {
  const auto paths = expand_glob(pattern);
  if (paths.empty()) throw ConfigError("no configs match '" + pattern + "'");
  std::vector<std::future<RunRecord>> jobs;
  for (const auto& p : paths) {
    jobs.push_back(std::async(std::launch::async, [p] { return run(load_config(p)); }));
  }
  std::vector<RunRecord> records;
  for (auto& job : jobs) records.push_back(job.get());
  report(records, out_dir);
  bool all_converged = true;
  for (const auto& r : records) {
    print_summary(r);
    all_converged = all_converged && converged(r);
  }
  return all_converged ? kExitOk : kExitNotConverged;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging_from_env();
  CLI::App app{"Bayesian identification and feedback-linearising control of a pendulum"};
  app.require_subcommand(1);

  std::string config, model_in, model_out, out_dir = ".", config_out, csv, pattern;
  std::vector<double> xi{std::numbers::pi, 0.0};

  auto* run_cmd = app.add_subcommand("run", "Simulate one experiment");
  run_cmd->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--model-in", model_in, "Warm-start models (JSON)")->check(CLI::ExistingFile);
  run_cmd->add_option("--model-out", model_out, "Where to persist the final models");
  run_cmd->add_option("--out-dir", out_dir, "Directory for CSV/JSON reports")->required();

  auto* opt_cmd = app.add_subcommand("optimize-hypers", "Fit kernels by marginal likelihood");
  opt_cmd->add_option("--config", config, "Experiment JSON")->required()->check(CLI::ExistingFile);
  opt_cmd->add_option("--model-in", model_in, "Pilot models (JSON)")->required()->check(CLI::ExistingFile);
  opt_cmd->add_option("--config-out", config_out, "Where to write the tuned config")->required();

  auto* metrics_cmd = app.add_subcommand("metrics", "Recompute metrics from a trajectory CSV");
  metrics_cmd->add_option("--run", csv, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  metrics_cmd->add_option("--xi", xi, "Goal state q qdot")->expected(2);

  auto* batch_cmd = app.add_subcommand("batch", "Run every config matching a glob");
  batch_cmd->add_option("--configs", pattern, "Glob of experiment JSON files")->required();
  batch_cmd->add_option("--out-dir", out_dir, "Directory for CSV/JSON reports");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run_cmd) return cmd_run(config, model_in, model_out, out_dir);
    if (*opt_cmd) return cmd_optimize(config, model_in, config_out);
    if (*metrics_cmd) return cmd_metrics(csv, xi);
    if (*batch_cmd) return cmd_batch(pattern, out_dir);
  } catch (const std::exception& e) {
    spdlog::error("{}", e.what());
    return kExitError;
  }
  return kExitError;
}
