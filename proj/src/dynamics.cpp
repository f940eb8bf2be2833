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

#include "bayesfblin/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <boost/numeric/odeint.hpp>

#include "bayesfblin/errors.hpp"

namespace bayesfblin {

State::State(Eigen::VectorXd q, Eigen::VectorXd q_dot) : x1(std::move(q)), x2(std::move(q_dot)) {
  if (x1.size() != x2.size()) throw DimensionError("configuration and velocity dimensions differ");
}

State State::scalar(double q, double q_dot) {
  return State(Eigen::VectorXd::Constant(1, q), Eigen::VectorXd::Constant(1, q_dot));
}

State State::from_stacked(const Eigen::Ref<const Eigen::VectorXd>& stacked) {
  if (stacked.size() % 2 != 0) throw DimensionError("stacked state must have even length");
  const Eigen::Index n = stacked.size() / 2;
  return State(stacked.head(n), stacked.tail(n));
}

Eigen::VectorXd State::stacked() const {
  Eigen::VectorXd out(x1.size() + x2.size());
  out << x1, x2;
  return out;
}

void PendulumParams::validate() const {
  if (!(length > 0.0)) throw ConfigError("pendulum length must be positive");
  if (!(mass > 0.0)) throw ConfigError("pendulum mass must be positive");
  if (!(friction >= 0.0)) throw ConfigError("pendulum friction must be nonnegative");
}

double pendulum_drift(const PendulumParams& p, const State& x) {
  if (x.dim() != 1) throw DimensionError("pendulum state must be one-dimensional");
  return -(p.gravity / p.length) * std::sin(x.x1[0]) -
         p.friction / (p.mass * p.length * p.length) * x.x2[0];
}

double pendulum_input(const PendulumParams& p) { return 1.0 / (p.mass * p.length * p.length); }

ControlAffinePlant make_pendulum(const PendulumParams& params) {
  params.validate();
  ControlAffinePlant plant;
  plant.n = 1;
  plant.m = 1;
  plant.drift = [params](const State& x) {
    return Eigen::VectorXd::Constant(1, pendulum_drift(params, x));
  };
  plant.input = [params](const State&) {
    return Eigen::MatrixXd::Constant(1, 1, pendulum_input(params));
  };
  return plant;
}

double pendulum_energy(const PendulumParams& p, const State& x) {
  const double inertia = p.mass * p.length * p.length;
  return 0.5 * inertia * x.x2[0] * x.x2[0] - p.mass * p.gravity * p.length * std::cos(x.x1[0]);
}

void check_full_rank(const Eigen::MatrixXd& b, double max_condition) {
  if (b.rows() != b.cols()) {
    throw ConditioningError("input matrix is " + std::to_string(b.rows()) + "x" +
                            std::to_string(b.cols()) + ", expected square");
  }
  const Eigen::JacobiSVD<Eigen::MatrixXd> svd(b);
  const auto& s = svd.singularValues();
  const double smallest = s[s.size() - 1];
  if (!(smallest > 0.0) || !(s[0] / smallest < max_condition)) {
    throw ConditioningError("input matrix is ill-conditioned");
  }
}

State integrate_hold(const ControlAffinePlant& plant, const State& x0,
                     const Eigen::Ref<const Eigen::VectorXd>& u, double dt, double tol) {
  namespace odeint = boost::numeric::odeint;
  using Vec = std::vector<double>;

  if (!(dt > 0.0)) throw ConfigError("hold interval must be positive");
  if (x0.dim() != plant.n) throw DimensionError("state dimension does not match plant");
  if (u.size() != plant.m) throw DimensionError("control dimension does not match plant");

  const int n = plant.n;
  const Eigen::VectorXd held = u;
  auto rhs = [&](const Vec& y, Vec& dydt, double /*t*/) {
    const Eigen::Map<const Eigen::VectorXd> stacked(y.data(), 2 * n);
    const State x = State::from_stacked(stacked);
    const Eigen::VectorXd accel = plant.drift(x) + plant.input(x) * held;
    for (int i = 0; i < n; ++i) {
      dydt[i] = y[n + i];
      dydt[n + i] = accel[i];
    }
  };

  const Eigen::VectorXd start = x0.stacked();
  Vec y(start.data(), start.data() + start.size());
  double reached = 0.0;
  auto observer = [&](const Vec& state, double t) {
    if (std::all_of(state.begin(), state.end(), [](double v) { return std::isfinite(v); })) reached = t;
  };
  try {
    auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_dopri5<Vec>());
    odeint::integrate_adaptive(stepper, rhs, y, 0.0, dt, dt, observer);
  } catch (const odeint::step_adjustment_error& e) {
    throw IntegrationError(std::string("step size underflow: ") + e.what(), reached);
  } catch (const odeint::no_progress_error& e) {
    throw IntegrationError(std::string("integration stalled: ") + e.what(), reached);
  }
  const Eigen::Map<const Eigen::VectorXd> out(y.data(), 2 * n);
  if (!out.allFinite()) throw IntegrationError("state became non-finite", reached);
  return State::from_stacked(out);
}

}  // namespace bayesfblin
