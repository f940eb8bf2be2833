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

#ifndef BAYESFBLIN_KERNELS_HPP
#define BAYESFBLIN_KERNELS_HPP

#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace bayesfblin {

enum class KernelKind { SquaredExponentialArd, RationalQuadraticArd };

/// ARD covariance function over state space.
///
/// SE:  k(x,x') = sf^2 exp(-r^2 / 2)
/// RQ:  k(x,x') = sf^2 (1 + r^2 / (2 alpha))^(-alpha)
/// with r^2 = sum_d (x_d - x'_d)^2 / l_d^2. `alpha` is ignored for SE.
struct KernelSpec {
  KernelKind kind = KernelKind::SquaredExponentialArd;
  Eigen::VectorXd lengthscales;
  double output_scale = 1.0;
  double alpha = 2.0;

  static KernelSpec squared_exponential(Eigen::VectorXd lengthscales,
                                        double output_scale);
  static KernelSpec rational_quadratic(Eigen::VectorXd lengthscales,
                                       double output_scale, double alpha);

  int input_dim() const { return static_cast<int>(lengthscales.size()); }

  /// Throws ConfigError on a non-positive hyperparameter.
  void validate() const;

  /// Log-space hyperparameters laid out as
  /// [log l_1 .. log l_d, log sf, (log alpha for RQ)].
  Eigen::VectorXd log_params() const;
  KernelSpec with_log_params(const Eigen::VectorXd& params) const;
  int num_params() const;

  bool operator==(const KernelSpec& other) const;
};

double evaluate(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& x_prime);

/// G[i][j] = k(x_i, x_j) + noise_i * delta_ij. `noise` holds either one value
/// per point or a single value broadcast to all points.
Eigen::MatrixXd gram(const KernelSpec& spec, std::span<const Eigen::VectorXd> points,
                     std::span<const double> noise);

void to_json(nlohmann::json& j, const KernelSpec& spec);
void from_json(const nlohmann::json& j, KernelSpec& spec);

}  // namespace bayesfblin

#endif  // BAYESFBLIN_KERNELS_HPP
