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

#ifndef BAYESFBLIN_HARNESS_HPP
#define BAYESFBLIN_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "bayesfblin/controller.hpp"
#include "bayesfblin/dynamics.hpp"
#include "bayesfblin/gp.hpp"
#include "bayesfblin/kernels.hpp"
#include "bayesfblin/lognormal.hpp"

namespace bayesfblin {

enum class ControllerKind { StochasticProcess, Proportional };
enum class HyperMode { Fixed, OptimizeMarginalLikelihood };

struct OptimizerSettings {
  int restarts = 5;
  int max_iterations = 500;
  std::optional<HyperparameterBounds> bounds_a;
  std::optional<HyperparameterBounds> bounds_b;
};

struct ExperimentConfig {
  std::string name = "run";
  PendulumParams plant;
  ControllerKind controller = ControllerKind::StochasticProcess;
  double gain = 1.0;  // baseline P gain
  ControllerConfig control;
  State x0 = State::scalar(0.0, 0.0);
  double t_f = 20.0;
  std::uint64_t seed = 0;
  HyperMode hyper_mode = HyperMode::Fixed;
  OptimizerSettings optimizer;

  KernelSpec kernel_a;
  double noise_a = 0.01;
  KernelSpec kernel_b;
  LogNoisePolicy noise_b;

  double integrator_tol = 1e-8;

  std::optional<std::filesystem::path> model_in;
  std::optional<std::filesystem::path> model_out;
  std::optional<std::filesystem::path> pilot_model;

  void validate() const;
};

/// Relative paths inside the file are resolved against its directory.
ExperimentConfig load_config(const std::filesystem::path& path);
ExperimentConfig parse_config(const nlohmann::json& j,
                              const std::filesystem::path& base_dir = {});
nlohmann::json config_to_json(const ExperimentConfig& config);

struct ModelBundle {
  std::vector<GPModel> a;
  std::vector<LogNormalModel> b;

  std::size_t data_size_a() const;
  std::size_t data_size_b() const;
};

/// Config kernels with empty data sets.
ModelBundle prior_models(const ExperimentConfig& config);
/// Config kernels conditioned on the training data held in `persisted`.
ModelBundle warm_models(const ExperimentConfig& config, const ModelBundle& persisted);

nlohmann::json models_to_json(const ModelBundle& models);
ModelBundle models_from_json(const nlohmann::json& j);
void save_models(const ModelBundle& models, const std::filesystem::path& path);
ModelBundle load_models(const std::filesystem::path& path);

struct StepRow {
  double t;
  double x1;
  double x2;
  double u;
  std::string phase;
  double mean_a;
  double var_a;
  double mean_b;
  double var_b;
};

struct Metrics {
  double energy = 0.0;  // sum u^2 * delta_u
  double error = 0.0;   // sum |x - xi|^2 * delta_u
  std::size_t n_data_a = 0;
  std::size_t n_data_b = 0;
};

struct RunRecord {
  std::string name;
  ControllerKind controller = ControllerKind::StochasticProcess;
  State xi;
  double delta_u = 0.0;
  std::vector<StepRow> rows;
  State terminal;
  bool complete = true;
  std::string failure;  // set when !complete
  ControllerCounters counters;
  std::optional<ModelBundle> models;  // final beliefs of an SP run
  Metrics summary;
};

/// Simulates decide -> hold -> integrate from x0 to t_f. `warm_start`, when
/// given, supplies training data for the initial beliefs.
RunRecord simulate(const ExperimentConfig& config, const ModelBundle* warm_start = nullptr);

/// File-level entry point: applies hyper_mode (using pilot_model), model_in
/// and model_out around `simulate`.
RunRecord run(const ExperimentConfig& config);

/// Rectangle-rule integrals at the control period plus data-set sizes.
Metrics metrics(const RunRecord& record);

/// Mean of |x - xi| over the final second below `tolerance`.
bool converged(const RunRecord& record, double tolerance = 0.05);

/// Replaces both kernels by their marginal-likelihood optimum on the pilot
/// data. The b kernel is kept when there are fewer than two b points.
ExperimentConfig optimize_mode(const ExperimentConfig& config, const ModelBundle& pilot);

void write_trajectory_csv(const RunRecord& record, const std::filesystem::path& path);
std::vector<StepRow> read_trajectory_csv(const std::filesystem::path& path);

nlohmann::json metrics_json(std::span<const RunRecord> records);
std::string metrics_json_text(std::span<const RunRecord> records);

/// Writes <dir>/<name>.csv per run and <dir>/metrics.{csv,json}.
void report(std::span<const RunRecord> records, const std::filesystem::path& dir);

}  // namespace bayesfblin

#endif  // BAYESFBLIN_HARNESS_HPP
