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

#include "bayesfblin/controller.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <spdlog/spdlog.h>

#include "bayesfblin/errors.hpp"

namespace bayesfblin {
namespace {

constexpr double kTimeSlack = 1e-9;

SampleWindow window_from(const ControllerState& state) {
  SampleWindow w;
  for (std::size_t i = 0; i < 3; ++i) {
    w.times[i] = state.window_times.at(i);
    w.states[i] = state.window_states.at(i);
  }
  return w;
}

Eigen::VectorXd feedback_control(const ControllerConfig& config, const ControllerState& state,
                                 const State& x) {
  const Eigen::VectorXd z = x.stacked();
  Eigen::VectorXd mean_a(state.n());
  for (int i = 0; i < state.n(); ++i) mean_a[i] = state.model_a[static_cast<std::size_t>(i)].posterior(z).mean;
  Eigen::MatrixXd mean_b = Eigen::MatrixXd::Zero(state.n(), state.m());
  for (int j = 0; j < state.m(); ++j) mean_b(j, j) = state.model_b[static_cast<std::size_t>(j)].linear_mean(z);
  return outer_law(mean_a, mean_b, inner_law(x, config.xi, config.w1, config.w2));
}

}  // namespace

void ControllerConfig::validate() const {
  if (!(delta_u > 0.0)) throw ConfigError("delta_u must be positive");
  if (!(delta_lambda >= delta_u)) throw ConfigError("delta_lambda must be at least delta_u");
  const double ratio = delta_lambda / delta_u;
  if (std::abs(ratio - std::round(ratio)) > 1e-9 * ratio) {
    throw ConfigError("delta_lambda must be an integer multiple of delta_u");
  }
  if (!(w1 > 0.0) || !(w2 > 0.0)) throw ConfigError("inner-law gains must be positive");
  if (!(u_probe > 0.0)) throw ConfigError("probe magnitude must be positive");
  if (!(theta_var_a >= 0.0) || !(theta_var_b >= 0.0)) throw ConfigError("variance thresholds must be nonnegative");
  if (!(accel_noise_variance >= 0.0)) throw ConfigError("accel_noise_variance must be nonnegative");
  if (xi.x1.size() == 0) throw ConfigError("goal state is empty");
}

long ControllerConfig::check_stride() const { return std::lround(delta_lambda / delta_u); }

ControllerState::ControllerState(std::vector<GPModel> a, std::vector<LogNormalModel> b)
    : model_a(std::move(a)), model_b(std::move(b)) {
  if (model_a.empty() || model_a.size() != model_b.size()) {
    throw DimensionError("controller needs one a model per configuration dimension and a square b");
  }
  held_control = Eigen::VectorXd::Zero(m());
}

std::size_t ControllerState::data_size_a() const {
  std::size_t total = 0;
  for (const auto& g : model_a) total += g.size();
  return total;
}

std::size_t ControllerState::data_size_b() const {
  std::size_t total = 0;
  for (const auto& g : model_b) total += g.size();
  return total;
}

std::string phase_label(Phase phase, int channel) {
  switch (phase) {
    case Phase::Normal:
      return "normal";
    case Phase::ProbingA:
      return "probe_a";
    case Phase::ProbingB:
      return "probe_b" + std::to_string(channel);
  }
  return "unknown";
}

Decision decide(const ControllerConfig& config, const ControllerState& state, double t,
                const State& x) {
  ControllerState next = state;
  next.call_index = state.call_index + 1;

  if (state.phase != Phase::Normal) {
    next.window_times.push_back(t);
    next.window_states.push_back(x);
    next.step = state.step + 1;
    if (next.step == 2) {
      const SampleWindow window = window_from(next);
      try {
        if (state.phase == Phase::ProbingA) {
          next = admit_a(config, next, window);
        } else {
          next = admit_b(config, next, window, state.channel, state.held_control[state.channel]);
        }
      } catch (const Error& e) {
        spdlog::warn("t={:.3f}: discarding probe data: {}", t, e.what());
      }
      next.phase = Phase::Normal;
      next.step = 0;
      next.window_times.clear();
      next.window_states.clear();
    }
    return {state.held_control, std::move(next), state.phase, state.channel};
  }

  const bool check_time = state.call_index % config.check_stride() == 0 &&
                          t <= config.probe_budget_end + kTimeSlack;
  try {
    if (check_time) {
      const Eigen::VectorXd z = x.stacked();
      double var_a = 0.0;
      for (const auto& model : state.model_a) var_a = std::max(var_a, model.posterior(z).variance);
      int probe_channel = -1;
      Phase probe = Phase::Normal;
      if (var_a > config.theta_var_a) {
        probe = Phase::ProbingA;
      } else {
        for (int j = 0; j < state.m(); ++j) {
          if (state.model_b[static_cast<std::size_t>(j)].log_posterior(z).variance > config.theta_var_b) {
            probe = Phase::ProbingB;
            probe_channel = j;
            break;
          }
        }
      }
      if (probe != Phase::Normal) {
        next.phase = probe;
        next.step = 0;
        next.channel = std::max(probe_channel, 0);
        next.held_control = Eigen::VectorXd::Zero(state.m());
        if (probe == Phase::ProbingB) {
          next.held_control[probe_channel] = config.u_probe;
          ++next.counters.probes_b;
        } else {
          ++next.counters.probes_a;
        }
        next.window_times = {t};
        next.window_states = {x};
        const int channel = next.channel;
        Eigen::VectorXd u = next.held_control;
        return {std::move(u), std::move(next), probe, channel};
      }
    }
    Eigen::VectorXd u = feedback_control(config, state, x);
    next.held_control = u;
    return {std::move(u), std::move(next), Phase::Normal, 0};
  } catch (const Error& e) {
    spdlog::warn("t={:.3f}: model failure, applying zero control: {}", t, e.what());
    ++next.counters.fallbacks;
    next.held_control = Eigen::VectorXd::Zero(state.m());
    Eigen::VectorXd u = next.held_control;
    return {std::move(u), std::move(next), Phase::Normal, 0};
  }
}

ControllerState admit_a(const ControllerConfig& config, const ControllerState& state,
                        const SampleWindow& window) {
  const auto sample = acceleration_sample(window, config.observe_velocity);
  if (sample.acceleration.size() != state.n()) throw DimensionError("window dimension does not match the a models");
  const Eigen::VectorXd z = sample.state.stacked();
  ControllerState next = state;
  for (int i = 0; i < state.n(); ++i) {
    auto& model = next.model_a[static_cast<std::size_t>(i)];
    model = model.condition({z, sample.acceleration[i], 0.0});
  }
  ++next.counters.admitted_a;
  return next;
}

ControllerState admit_b(const ControllerConfig& config, const ControllerState& state,
                        const SampleWindow& window, int channel, double u_j) {
  if (channel < 0 || channel >= state.m()) throw DimensionError("input channel out of range");
  if (u_j == 0.0) throw ConfigError("b probe needs a nonzero control");
  const auto sample = acceleration_sample(window, config.observe_velocity);
  const Eigen::VectorXd z = sample.state.stacked();
  const auto a = state.model_a[static_cast<std::size_t>(channel)].posterior(z);
  const double b_estimate = (sample.acceleration[channel] - a.mean) / u_j;
  const double linear_variance = (config.accel_noise_variance + a.variance) / (u_j * u_j);

  ControllerState next = state;
  try {
    auto& model = next.model_b[static_cast<std::size_t>(channel)];
    model = model.observe(z, b_estimate, linear_variance);
    ++next.counters.admitted_b;
  } catch (const InvalidObservation& e) {
    spdlog::info("rejecting b{} observation: {}", channel, e.what());
    ++next.counters.rejected_b;
  }
  return next;
}

Eigen::VectorXd outer_law(const Eigen::Ref<const Eigen::VectorXd>& mean_a,
                          const Eigen::Ref<const Eigen::MatrixXd>& mean_b,
                          const Eigen::Ref<const Eigen::VectorXd>& u_prime) {
  if (mean_a.size() != mean_b.rows() || u_prime.size() != mean_b.rows()) {
    throw DimensionError("outer law operands have inconsistent dimensions");
  }
  check_full_rank(mean_b);
  if (mean_b.rows() == 1) return (u_prime - mean_a) / mean_b(0, 0);
  return mean_b.partialPivLu().solve(u_prime - mean_a);
}

Eigen::VectorXd inner_law(const State& x, const State& xi, double w1, double w2) {
  if (x.dim() != xi.dim()) throw DimensionError("state and goal dimensions differ");
  return w1 * (xi.x1 - x.x1) + w2 * (xi.x2 - x.x2);
}

Eigen::VectorXd baseline_p(const State& x, const State& xi, double gain) {
  if (x.dim() != xi.dim()) throw DimensionError("state and goal dimensions differ");
  return gain * ((xi.x1 - x.x1) + (xi.x2 - x.x2));
}

BeliefSummary summarize_beliefs(const ControllerState& state, const State& x) {
  const Eigen::VectorXd z = x.stacked();
  BeliefSummary s;
  s.mean_a.resize(state.n());
  s.var_a.resize(state.n());
  for (int i = 0; i < state.n(); ++i) {
    const auto p = state.model_a[static_cast<std::size_t>(i)].posterior(z);
    s.mean_a[i] = p.mean;
    s.var_a[i] = p.variance;
  }
  s.mean_b.resize(state.m());
  s.var_b.resize(state.m());
  s.log_mean_b.resize(state.m());
  s.log_var_b.resize(state.m());
  for (int j = 0; j < state.m(); ++j) {
    const auto p = state.model_b[static_cast<std::size_t>(j)].log_posterior(z);
    s.log_mean_b[j] = p.mean;
    s.log_var_b[j] = p.variance;
    s.mean_b[j] = lognormal_mean(p.mean, p.variance);
    s.var_b[j] = lognormal_variance(p.mean, p.variance);
  }
  return s;
}

}  // namespace bayesfblin
