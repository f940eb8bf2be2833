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

#ifndef BAYESFBLIN_DYNAMICS_HPP
#define BAYESFBLIN_DYNAMICS_HPP

#include <functional>

#include <Eigen/Dense>

namespace bayesfblin {

/// Mechanical state: configuration x1 and velocity x2, both of dimension n.
struct State {
  Eigen::VectorXd x1;
  Eigen::VectorXd x2;

  State() = default;
  State(Eigen::VectorXd q, Eigen::VectorXd q_dot);
  static State scalar(double q, double q_dot);
  static State from_stacked(const Eigen::Ref<const Eigen::VectorXd>& stacked);

  int dim() const { return static_cast<int>(x1.size()); }
  /// [x1; x2], the input representation used by the function models.
  Eigen::VectorXd stacked() const;
};

/// x1' = x2,  x2' = a(x) + b(x) u.
struct ControlAffinePlant {
  int n = 1;
  int m = 1;
  std::function<Eigen::VectorXd(const State&)> drift;
  std::function<Eigen::MatrixXd(const State&)> input;
};

struct PendulumParams {
  double length = 1.0;
  double mass = 1.0;
  double friction = 0.0;
  double gravity = 9.81;

  void validate() const;
};

/// a(x) = -(g/l) sin(x1) - r/(m l^2) x2.  x1 = 0 hangs down.
double pendulum_drift(const PendulumParams& params, const State& x);
/// b = 1/(m l^2).
double pendulum_input(const PendulumParams& params);
ControlAffinePlant make_pendulum(const PendulumParams& params);

/// 1/2 m l^2 x2^2 - m g l cos(x1).
double pendulum_energy(const PendulumParams& params, const State& x);

/// Throws ConditioningError unless b is square with condition number below
/// `max_condition`.
void check_full_rank(const Eigen::MatrixXd& b, double max_condition = 1e8);

/// Integrates the plant over [0, dt] with u held constant, using an adaptive
/// Dormand-Prince 5(4) pair at absolute and relative tolerance `tol`.
/// Throws IntegrationError if the step size collapses.
State integrate_hold(const ControlAffinePlant& plant, const State& x0,
                     const Eigen::Ref<const Eigen::VectorXd>& u, double dt, double tol = 1e-8);

}  // namespace bayesfblin

#endif  // BAYESFBLIN_DYNAMICS_HPP
