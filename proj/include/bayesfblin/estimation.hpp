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

#ifndef BAYESFBLIN_ESTIMATION_HPP
#define BAYESFBLIN_ESTIMATION_HPP

#include <array>

#include "bayesfblin/dynamics.hpp"

namespace bayesfblin {

/// Three observations at t, t + d, t + 2d.
struct SampleWindow {
  std::array<double, 3> times{};
  std::array<State, 3> states;

  /// Throws WindowError unless times are strictly increasing and uniformly
  /// spaced to within 1e-9.
  void validate() const;
  double spacing() const { return times[1] - times[0]; }
};

struct DerivativeEstimate {
  double midpoint_time;
  State derivative;  // (d x1/dt, d x2/dt) at the midpoint
};

/// (x(t + 2d) - x(t)) / (2d), attributed to t + d.
DerivativeEstimate central_difference(const SampleWindow& window);

/// Training sample for the acceleration models: the midpoint state and the
/// estimated x2' there.
struct AccelerationSample {
  double time;
  State state;
  Eigen::VectorXd acceleration;
};

/// With `observe_velocity` the midpoint state is taken as observed and x2' is
/// central-differenced from x2. Otherwise only x1 is used: the midpoint
/// velocity is the central difference of x1 and the acceleration is the
/// central difference of the half-step velocity estimates,
/// (x1(t+2d) - 2 x1(t+d) + x1(t)) / d^2.
AccelerationSample acceleration_sample(const SampleWindow& window, bool observe_velocity);

}  // namespace bayesfblin

#endif  // BAYESFBLIN_ESTIMATION_HPP
