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

#ifndef BAYESFBLIN_OPTIM_HPP
#define BAYESFBLIN_OPTIM_HPP

#include <functional>

#include <Eigen/Dense>

namespace bayesfblin {

struct SimplexResult {
  Eigen::VectorXd argmin;
  double value;
  int iterations;
};

/// Box-constrained Nelder-Mead. Trial points are projected onto
/// [lower, upper]; the best vertex never gets worse, so the returned value is
/// at most objective(clamp(start)).
SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& objective,
                               const Eigen::VectorXd& start, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper, int max_iterations,
                               double initial_step = 0.5, double tolerance = 1e-10);

}  // namespace bayesfblin

#endif  // BAYESFBLIN_OPTIM_HPP
