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

#ifndef BAYESFBLIN_CONTROLLER_HPP
#define BAYESFBLIN_CONTROLLER_HPP

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bayesfblin/dynamics.hpp"
#include "bayesfblin/estimation.hpp"
#include "bayesfblin/gp.hpp"
#include "bayesfblin/lognormal.hpp"

namespace bayesfblin {

struct ControllerConfig {
  double delta_u = 0.01;       // control period [s]
  double delta_lambda = 0.5;   // learning-check period [s]
  double theta_var_a = 1e-3;   // posterior variance threshold for a
  double theta_var_b = 5e-3;   // log-space posterior variance threshold for b
  double w1 = 1.0;
  double w2 = 1.0;
  State xi;
  double u_probe = 1.0;
  // Learning checks only happen at t <= probe_budget_end.
  double probe_budget_end = std::numeric_limits<double>::infinity();
  // Variance attributed to the finite-difference acceleration estimate; enters
  // the linear-space variance handed to the b models.
  double accel_noise_variance = 0.0;
  bool observe_velocity = true;

  void validate() const;
  /// Controller calls per learning check.
  long check_stride() const;
};

enum class Phase { Normal, ProbingA, ProbingB };

struct ControllerCounters {
  std::size_t probes_a = 0;
  std::size_t probes_b = 0;
  std::size_t admitted_a = 0;
  std::size_t admitted_b = 0;
  std::size_t rejected_b = 0;
  std::size_t fallbacks = 0;
};

struct ControllerState {
  Phase phase = Phase::Normal;
  int step = 0;     // 0..2 within a probe
  int channel = 0;  // probed input channel during ProbingB
  Eigen::VectorXd held_control;
  std::vector<double> window_times;
  std::vector<State> window_states;
  std::vector<GPModel> model_a;         // one per configuration dimension
  std::vector<LogNormalModel> model_b;  // one per input channel (diagonal b)
  ControllerCounters counters;
  long call_index = 0;

  ControllerState(std::vector<GPModel> a, std::vector<LogNormalModel> b);

  int n() const { return static_cast<int>(model_a.size()); }
  int m() const { return static_cast<int>(model_b.size()); }
  std::size_t data_size_a() const;
  std::size_t data_size_b() const;
};

struct Decision {
  Eigen::VectorXd u;
  ControllerState next;
  Phase emitted_phase;  // phase that produced u
  int emitted_channel;
};

std::string phase_label(Phase phase, int channel);

/// One controller call. Must be invoked every delta_u seconds in order.
Decision decide(const ControllerConfig& config, const ControllerState& state, double t,
                const State& x);

/// Conditions the a models on the window's midpoint acceleration.
ControllerState admit_a(const ControllerConfig& config, const ControllerState& state,
                        const SampleWindow& window);

/// b_j estimate (y2' - E[a]) / u_j with linear variance
/// (var(y2') + var a) / u_j^2. A non-positive estimate is counted as rejected.
ControllerState admit_b(const ControllerConfig& config, const ControllerState& state,
                        const SampleWindow& window, int channel, double u_j);

/// E[b]^{-1} (u' - E[a]); throws ConditioningError for a non-square or
/// ill-conditioned E[b].
Eigen::VectorXd outer_law(const Eigen::Ref<const Eigen::VectorXd>& mean_a,
                          const Eigen::Ref<const Eigen::MatrixXd>& mean_b,
                          const Eigen::Ref<const Eigen::VectorXd>& u_prime);

/// w1 (xi1 - x1) + w2 (xi2 - x2).
Eigen::VectorXd inner_law(const State& x, const State& xi, double w1, double w2);

/// k [(xi1 - x1) + (xi2 - x2)], applied directly as torque.
Eigen::VectorXd baseline_p(const State& x, const State& xi, double gain);

/// Posterior summaries at x used for logging.
struct BeliefSummary {
  Eigen::VectorXd mean_a, var_a;
  Eigen::VectorXd mean_b, var_b;          // linear space
  Eigen::VectorXd log_mean_b, log_var_b;  // log space
};
BeliefSummary summarize_beliefs(const ControllerState& state, const State& x);

}  // namespace bayesfblin

#endif  // BAYESFBLIN_CONTROLLER_HPP
