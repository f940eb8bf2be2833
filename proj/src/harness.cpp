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

#include "bayesfblin/harness.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "bayesfblin/errors.hpp"

namespace bayesfblin {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

constexpr const char* kCsvHeader = "t,x1,x2,u,phase,mean_a,var_a,mean_b,var_b";

std::pair<double, double> read_pair(const json& j, const char* key) {
  const auto v = j.at(key).get<std::vector<double>>();
  if (v.size() != 2) throw ConfigError(std::string("'") + key + "' must hold two numbers");
  return {v[0], v[1]};
}

State read_state(const json& j, const char* key) {
  const auto [q, q_dot] = read_pair(j, key);
  return State::scalar(q, q_dot);
}

json write_state(const State& s) { return json::array({s.x1[0], s.x2[0]}); }

std::optional<fs::path> read_path(const json& j, const char* key, const fs::path& base_dir) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  fs::path p = j.at(key).get<std::string>();
  if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
  return p;
}

json bounds_to_json(const HyperparameterBounds& b) {
  return json{{"lower", std::vector<double>(b.lower.data(), b.lower.data() + b.lower.size())},
              {"upper", std::vector<double>(b.upper.data(), b.upper.data() + b.upper.size())}};
}

HyperparameterBounds bounds_from_json(const json& j) {
  const auto lo = j.at("lower").get<std::vector<double>>();
  const auto hi = j.at("upper").get<std::vector<double>>();
  if (lo.size() != hi.size()) throw ConfigError("bounds lower/upper lengths differ");
  return {Eigen::Map<const Eigen::VectorXd>(lo.data(), static_cast<Eigen::Index>(lo.size())),
          Eigen::Map<const Eigen::VectorXd>(hi.data(), static_cast<Eigen::Index>(hi.size()))};
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) out.push_back(field);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

void ExperimentConfig::validate() const {
  plant.validate();
  control.validate();
  if (!(t_f >= 0.0)) throw ConfigError("t_f must be nonnegative");
  if (x0.dim() != 1 || control.xi.dim() != 1) throw ConfigError("pendulum states are one-dimensional");
  if (controller == ControllerKind::Proportional && !(gain > 0.0)) {
    throw ConfigError("P-controller gain must be positive");
  }
  if (controller == ControllerKind::StochasticProcess) {
    kernel_a.validate();
    kernel_b.validate();
    if (kernel_a.input_dim() != 2 || kernel_b.input_dim() != 2) {
      throw ConfigError("pendulum kernels take two inputs (x1, x2)");
    }
  }
  if (!(noise_a >= 0.0)) throw ConfigError("noise_a must be nonnegative");
  if (!(integrator_tol > 0.0)) throw ConfigError("integrator_tol must be positive");
  if (hyper_mode == HyperMode::OptimizeMarginalLikelihood && !pilot_model) {
    throw ConfigError("hyper_mode 'optimize' needs a pilot_model");
  }
}

ExperimentConfig parse_config(const json& j, const fs::path& base_dir) {
  ExperimentConfig c;
  c.name = j.value("name", std::string("run"));

  const auto plant = j.value("plant", std::string("pendulum"));
  if (plant != "pendulum") throw ConfigError("unknown plant '" + plant + "'");
  c.plant.length = j.at("l").get<double>();
  c.plant.mass = j.at("m").get<double>();
  c.plant.friction = j.at("r").get<double>();
  c.plant.gravity = j.value("g", 9.81);

  const auto controller = j.value("controller", std::string("sp"));
  if (controller == "sp") {
    c.controller = ControllerKind::StochasticProcess;
  } else if (controller == "p") {
    c.controller = ControllerKind::Proportional;
  } else {
    throw ConfigError("unknown controller '" + controller + "'");
  }
  c.gain = j.value("gain", 1.0);

  c.control.delta_u = j.at("delta_u").get<double>();
  c.control.delta_lambda = j.at("delta_l").get<double>();
  std::tie(c.control.theta_var_a, c.control.theta_var_b) = read_pair(j, "theta");
  std::tie(c.control.w1, c.control.w2) = read_pair(j, "w");
  c.control.xi = read_state(j, "xi");
  c.control.u_probe = j.value("u_probe", 1.0);
  c.control.accel_noise_variance = j.value("accel_noise_variance", 0.0);
  c.control.observe_velocity = j.value("observe_velocity", true);
  c.x0 = read_state(j, "x0");
  c.t_f = j.at("t_f").get<double>();
  c.control.probe_budget_end =
      j.contains("probe_budget_end") && !j.at("probe_budget_end").is_null()
          ? j.at("probe_budget_end").get<double>()
          : c.t_f;

  c.seed = j.value("seed", std::uint64_t{0});
  const auto mode = j.value("hyper_mode", std::string("fixed"));
  if (mode == "fixed") {
    c.hyper_mode = HyperMode::Fixed;
  } else if (mode == "optimize") {
    c.hyper_mode = HyperMode::OptimizeMarginalLikelihood;
  } else {
    throw ConfigError("unknown hyper_mode '" + mode + "'");
  }
  if (j.contains("optimizer")) {
    const auto& o = j.at("optimizer");
    c.optimizer.restarts = o.value("restarts", 5);
    c.optimizer.max_iterations = o.value("max_iterations", 500);
    if (o.contains("bounds_a")) c.optimizer.bounds_a = bounds_from_json(o.at("bounds_a"));
    if (o.contains("bounds_b")) c.optimizer.bounds_b = bounds_from_json(o.at("bounds_b"));
  }

  if (j.contains("kernel_a")) c.kernel_a = j.at("kernel_a").get<KernelSpec>();
  if (j.contains("kernel_b")) c.kernel_b = j.at("kernel_b").get<KernelSpec>();
  c.noise_a = j.value("noise_a", 0.01);
  if (j.contains("noise_log_b")) c.noise_b = j.at("noise_log_b").get<LogNoisePolicy>();
  c.integrator_tol = j.value("integrator_tol", 1e-8);

  c.model_in = read_path(j, "model_in", base_dir);
  c.model_out = read_path(j, "model_out", base_dir);
  c.pilot_model = read_path(j, "pilot_model", base_dir);
  c.validate();
  return c;
}

ExperimentConfig load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse config " + path.string() + ": " + e.what());
  }
  return parse_config(j, path.parent_path());
}

json config_to_json(const ExperimentConfig& c) {
  json j{{"name", c.name},
         {"plant", "pendulum"},
         {"l", c.plant.length},
         {"m", c.plant.mass},
         {"r", c.plant.friction},
         {"g", c.plant.gravity},
         {"controller", c.controller == ControllerKind::StochasticProcess ? "sp" : "p"},
         {"gain", c.gain},
         {"delta_u", c.control.delta_u},
         {"delta_l", c.control.delta_lambda},
         {"theta", {c.control.theta_var_a, c.control.theta_var_b}},
         {"x0", write_state(c.x0)},
         {"xi", write_state(c.control.xi)},
         {"w", {c.control.w1, c.control.w2}},
         {"t_f", c.t_f},
         {"u_probe", c.control.u_probe},
         {"probe_budget_end", c.control.probe_budget_end},
         {"accel_noise_variance", c.control.accel_noise_variance},
         {"observe_velocity", c.control.observe_velocity},
         {"seed", c.seed},
         {"hyper_mode", c.hyper_mode == HyperMode::Fixed ? "fixed" : "optimize"},
         {"kernel_a", c.kernel_a},
         {"noise_a", c.noise_a},
         {"kernel_b", c.kernel_b},
         {"noise_log_b", c.noise_b},
         {"integrator_tol", c.integrator_tol}};
  json o{{"restarts", c.optimizer.restarts}, {"max_iterations", c.optimizer.max_iterations}};
  if (c.optimizer.bounds_a) o["bounds_a"] = bounds_to_json(*c.optimizer.bounds_a);
  if (c.optimizer.bounds_b) o["bounds_b"] = bounds_to_json(*c.optimizer.bounds_b);
  j["optimizer"] = o;
  if (c.model_in) j["model_in"] = c.model_in->string();
  if (c.model_out) j["model_out"] = c.model_out->string();
  if (c.pilot_model) j["pilot_model"] = c.pilot_model->string();
  return j;
}

std::size_t ModelBundle::data_size_a() const {
  std::size_t total = 0;
  for (const auto& g : a) total += g.size();
  return total;
}

std::size_t ModelBundle::data_size_b() const {
  std::size_t total = 0;
  for (const auto& g : b) total += g.size();
  return total;
}

ModelBundle prior_models(const ExperimentConfig& config) {
  return {{GPModel(config.kernel_a, config.noise_a)},
          {LogNormalModel(GPModel(config.kernel_b, 0.0), config.noise_b)}};
}

ModelBundle warm_models(const ExperimentConfig& config, const ModelBundle& persisted) {
  if (persisted.a.size() != 1 || persisted.b.size() != 1) {
    throw ConfigError("persisted models do not describe a one-dimensional plant");
  }
  return {{GPModel(config.kernel_a, config.noise_a, persisted.a[0].data())},
          {LogNormalModel(GPModel(config.kernel_b, 0.0, persisted.b[0].log_gp().data()), config.noise_b)}};
}

json models_to_json(const ModelBundle& models) {
  json a = json::array();
  for (const auto& g : models.a) a.push_back(gp_to_json(g));
  json b = json::array();
  for (const auto& g : models.b) b.push_back(lognormal_to_json(g));
  return json{{"model_a", a}, {"model_b", b}};
}

ModelBundle models_from_json(const json& j) {
  ModelBundle m;
  for (const auto& g : j.at("model_a")) m.a.push_back(gp_from_json(g));
  for (const auto& g : j.at("model_b")) m.b.push_back(lognormal_from_json(g));
  return m;
}

void save_models(const ModelBundle& models, const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write models to " + path.string());
  out << models_to_json(models).dump(2) << '\n';
  if (!out) throw Error("failed writing models to " + path.string());
}

ModelBundle load_models(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open models " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("cannot parse models " + path.string() + ": " + e.what());
  }
  return models_from_json(j);
}

RunRecord simulate(const ExperimentConfig& config, const ModelBundle* warm_start) {
  config.validate();
  const ControlAffinePlant plant = make_pendulum(config.plant);
  const double du = config.control.delta_u;
  const State& xi = config.control.xi;

  RunRecord record;
  record.name = config.name;
  record.controller = config.controller;
  record.xi = xi;
  record.delta_u = du;

  std::optional<ControllerState> cs;
  if (config.controller == ControllerKind::StochasticProcess) {
    ModelBundle models = warm_start != nullptr ? warm_models(config, *warm_start) : prior_models(config);
    cs.emplace(std::move(models.a), std::move(models.b));
  }

  const long steps = std::lround(config.t_f / du);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  record.rows.reserve(static_cast<std::size_t>(steps));
  State x = config.x0;
  for (long k = 0; k < steps; ++k) {
    const double t = static_cast<double>(k) * du;
    StepRow row{t, x.x1[0], x.x2[0], 0.0, "normal", nan, nan, nan, nan};
    Eigen::VectorXd u;
    if (cs) {
      Decision d = decide(config.control, *cs, t, x);
      u = std::move(d.u);
      row.phase = phase_label(d.emitted_phase, d.emitted_channel);
      *cs = std::move(d.next);
      try {
        const BeliefSummary beliefs = summarize_beliefs(*cs, x);
        row.mean_a = beliefs.mean_a[0];
        row.var_a = beliefs.var_a[0];
        row.mean_b = beliefs.mean_b[0];
        row.var_b = beliefs.var_b[0];
      } catch (const Error& e) {
        spdlog::warn("t={:.3f}: cannot summarise beliefs: {}", t, e.what());
      }
    } else {
      u = baseline_p(x, xi, config.gain);
    }
    row.u = u[0];
    record.rows.push_back(row);
    try {
      x = integrate_hold(plant, x, u, du, config.integrator_tol);
    } catch (const IntegrationError& e) {
      record.complete = false;
      record.failure = fmt::format("integration failed at t={:.6g}: {}", t + e.time_reached(), e.what());
      spdlog::error("{}: {}", config.name, record.failure);
      break;
    }
  }
  record.terminal = x;
  if (cs) {
    record.counters = cs->counters;
    record.models = ModelBundle{cs->model_a, cs->model_b};
  }
  record.summary = metrics(record);
  return record;
}

RunRecord run(const ExperimentConfig& config) {
  ExperimentConfig effective = config;
  if (config.hyper_mode == HyperMode::OptimizeMarginalLikelihood) {
    effective = optimize_mode(config, load_models(*config.pilot_model));
  }
  std::optional<ModelBundle> warm;
  if (config.model_in) warm = load_models(*config.model_in);
  RunRecord record = simulate(effective, warm ? &*warm : nullptr);
  if (config.model_out && record.models) save_models(*record.models, *config.model_out);
  return record;
}

Metrics metrics(const RunRecord& record) {
  Metrics m;
  for (const auto& row : record.rows) {
    m.energy += row.u * row.u * record.delta_u;
    const double e1 = row.x1 - record.xi.x1[0];
    const double e2 = row.x2 - record.xi.x2[0];
    m.error += (e1 * e1 + e2 * e2) * record.delta_u;
  }
  if (record.models) {
    m.n_data_a = record.models->data_size_a();
    m.n_data_b = record.models->data_size_b();
  }
  return m;
}

bool converged(const RunRecord& record, double tolerance) {
  if (!record.complete) return false;
  auto distance = [&](double x1, double x2) {
    return std::hypot(x1 - record.xi.x1[0], x2 - record.xi.x2[0]);
  };
  if (record.rows.empty()) return distance(record.terminal.x1[0], record.terminal.x2[0]) < tolerance;
  const double t_end = record.rows.back().t + record.delta_u;
  double sum = 0.0;
  std::size_t count = 0;
  for (const auto& row : record.rows) {
    if (row.t >= t_end - 1.0 - 1e-9) {
      sum += distance(row.x1, row.x2);
      ++count;
    }
  }
  return sum / static_cast<double>(count) < tolerance;
}

ExperimentConfig optimize_mode(const ExperimentConfig& config, const ModelBundle& pilot) {
  if (pilot.a.size() != 1 || pilot.b.size() != 1) {
    throw OptimizationError("pilot models do not describe a one-dimensional plant");
  }
  if (pilot.a[0].size() == 0) throw OptimizationError("pilot data has no drift observations");
  ExperimentConfig out = config;

  OptimizeOptions options_a;
  options_a.bounds = config.optimizer.bounds_a.value_or(default_bounds(config.kernel_a));
  options_a.restarts = config.optimizer.restarts;
  options_a.max_iterations = config.optimizer.max_iterations;
  options_a.seed = config.seed;
  const GPModel model_a(config.kernel_a, config.noise_a, pilot.a[0].data());
  const GPModel fitted_a = optimize_hyperparameters(model_a, options_a);
  spdlog::info("optimised a kernel: log marginal likelihood {:.6g} -> {:.6g}",
               model_a.log_marginal_likelihood(), fitted_a.log_marginal_likelihood());
  out.kernel_a = fitted_a.kernel();

  const auto& b_data = pilot.b[0].log_gp().data();
  if (b_data.size() < 2) {
    spdlog::warn("only {} b observation(s) in pilot data; keeping the configured b kernel", b_data.size());
  } else {
    OptimizeOptions options_b = options_a;
    options_b.bounds = config.optimizer.bounds_b.value_or(default_bounds(config.kernel_b));
    options_b.seed = config.seed + 1;
    const GPModel model_b(config.kernel_b, 0.0, b_data);
    out.kernel_b = optimize_hyperparameters(model_b, options_b).kernel();
  }
  out.hyper_mode = HyperMode::Fixed;
  out.pilot_model.reset();
  return out;
}

void write_trajectory_csv(const RunRecord& record, const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write trajectory to " + path.string());
  out << kCsvHeader << '\n';
  for (const auto& r : record.rows) {
    out << format_double(r.t) << ',' << format_double(r.x1) << ',' << format_double(r.x2) << ','
        << format_double(r.u) << ',' << r.phase << ',' << format_double(r.mean_a) << ','
        << format_double(r.var_a) << ',' << format_double(r.mean_b) << ','
        << format_double(r.var_b) << '\n';
  }
  if (!out) throw Error("failed writing trajectory to " + path.string());
}

std::vector<StepRow> read_trajectory_csv(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open trajectory " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw Error("unexpected trajectory header in " + path.string());
  }
  std::vector<StepRow> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 9) throw Error(fmt::format("{}:{}: expected 9 fields", path.string(), line_no));
    try {
      rows.push_back({std::stod(f[0]), std::stod(f[1]), std::stod(f[2]), std::stod(f[3]), f[4],
                      std::stod(f[5]), std::stod(f[6]), std::stod(f[7]), std::stod(f[8])});
    } catch (const std::exception&) {
      throw Error(fmt::format("{}:{}: malformed number", path.string(), line_no));
    }
  }
  return rows;
}

json metrics_json(std::span<const RunRecord> records) {
  json runs = json::array();
  for (const auto& r : records) {
    const Metrics m = metrics(r);
    runs.push_back(json{{"name", r.name},
                        {"controller", r.controller == ControllerKind::StochasticProcess ? "sp" : "p"},
                        {"energy", m.energy},
                        {"error", m.error},
                        {"n_data_a", m.n_data_a},
                        {"n_data_b", m.n_data_b},
                        {"probes_a", r.counters.probes_a},
                        {"probes_b", r.counters.probes_b},
                        {"rejected_b", r.counters.rejected_b},
                        {"terminal", write_state(r.terminal)},
                        {"complete", r.complete},
                        {"converged", converged(r)}});
  }
  return json{{"runs", runs}};
}

std::string metrics_json_text(std::span<const RunRecord> records) {
  return metrics_json(records).dump(2) + "\n";
}

void report(std::span<const RunRecord> records, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create output directory " + dir.string() + ": " + ec.message());

  std::map<std::string, int> seen;
  for (const auto& r : records) {
    const int count = seen[r.name]++;
    const std::string stem = count == 0 ? r.name : fmt::format("{}_{}", r.name, count);
    write_trajectory_csv(r, dir / (stem + ".csv"));
  }

  const fs::path csv_path = dir / "metrics.csv";
  std::ofstream csv(csv_path);
  if (!csv) throw Error("cannot write " + csv_path.string());
  csv << "name,controller,energy,error,n_data_a,n_data_b,converged\n";
  for (const auto& r : records) {
    const Metrics m = metrics(r);
    csv << r.name << ',' << (r.controller == ControllerKind::StochasticProcess ? "sp" : "p") << ','
        << format_double(m.energy) << ',' << format_double(m.error) << ',' << m.n_data_a << ','
        << m.n_data_b << ',' << (converged(r) ? "true" : "false") << '\n';
  }
  if (!csv) throw Error("failed writing " + csv_path.string());

  const fs::path json_path = dir / "metrics.json";
  std::ofstream js(json_path);
  if (!js) throw Error("cannot write " + json_path.string());
  js << metrics_json_text(records);
  if (!js) throw Error("failed writing " + json_path.string());
}

}  // namespace bayesfblin
