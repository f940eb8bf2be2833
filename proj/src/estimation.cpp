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

#include "bayesfblin/estimation.hpp"

#include <cmath>

#include "bayesfblin/errors.hpp"

namespace bayesfblin {

void SampleWindow::validate() const {
  const double d0 = times[1] - times[0];
  const double d1 = times[2] - times[1];
  if (!(d0 > 0.0) || !(d1 > 0.0)) throw WindowError("window times must be strictly increasing");
  if (std::abs(d1 - d0) > 1e-9) throw WindowError("window times are not uniformly spaced");
  const int n = states[0].dim();
  for (const auto& s : states) {
    if (s.dim() != n || s.x2.size() != n) throw WindowError("window states have mixed dimensions");
  }
}

DerivativeEstimate central_difference(const SampleWindow& window) {
  window.validate();
  const double two_d = window.times[2] - window.times[0];
  const State& first = window.states[0];
  const State& last = window.states[2];
  return {window.times[1], State((last.x1 - first.x1) / two_d, (last.x2 - first.x2) / two_d)};
}

AccelerationSample acceleration_sample(const SampleWindow& window, bool observe_velocity) {
  if (observe_velocity) {
    const auto estimate = central_difference(window);
    return {estimate.midpoint_time, window.states[1], estimate.derivative.x2};
  }
  window.validate();
  const double d = window.spacing();
  const Eigen::VectorXd& q0 = window.states[0].x1;
  const Eigen::VectorXd& q1 = window.states[1].x1;
  const Eigen::VectorXd& q2 = window.states[2].x1;
  const Eigen::VectorXd velocity = (q2 - q0) / (2.0 * d);
  const Eigen::VectorXd acceleration = (q2 - 2.0 * q1 + q0) / (d * d);
  return {window.times[1], State(q1, velocity), acceleration};
}

}  // namespace bayesfblin
