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

#ifndef BAYESFBLIN_LOGNORMAL_HPP
#define BAYESFBLIN_LOGNORMAL_HPP

#include <nlohmann/json.hpp>

#include "bayesfblin/gp.hpp"

namespace bayesfblin {

/// exp(mu + var/2): mean of exp(Z) for Z ~ N(mu, var).
double lognormal_mean(double log_mean, double log_variance);
/// exp(2 mu + var) (exp(var) - 1): variance of exp(Z) for Z ~ N(mu, var).
double lognormal_variance(double log_mean, double log_variance);

/// How a linear-space observation of b is turned into log-space noise.
struct LogNoisePolicy {
  double fixed_variance = 0.1;
  // Delta method: var_log ~= var_linear / b^2, floored at `floor`.
  bool delta_method = false;
  double floor = 1e-4;
};

/// Positive-valued process: a GP over log b, reported in linear space.
class LogNormalModel {
 public:
  explicit LogNormalModel(GPModel log_gp, LogNoisePolicy policy = {});

  /// Conditions on log(b_estimate). Throws InvalidObservation when
  /// b_estimate <= 0 (or is not finite).
  LogNormalModel observe(const Eigen::Ref<const Eigen::VectorXd>& x, double b_estimate,
                         double linear_variance) const;

  double observation_log_noise(double b_estimate, double linear_variance) const;

  Prediction log_posterior(const Eigen::Ref<const Eigen::VectorXd>& x) const {
    return log_gp_.posterior(x);
  }
  double linear_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  double linear_variance(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const GPModel& log_gp() const { return log_gp_; }
  const LogNoisePolicy& policy() const { return policy_; }
  std::size_t size() const { return log_gp_.size(); }

  LogNormalModel with_log_gp(GPModel log_gp) const { return LogNormalModel(std::move(log_gp), policy_); }

 private:
  GPModel log_gp_;
  LogNoisePolicy policy_;
};

void to_json(nlohmann::json& j, const LogNoisePolicy& policy);
void from_json(const nlohmann::json& j, LogNoisePolicy& policy);
nlohmann::json lognormal_to_json(const LogNormalModel& model);
LogNormalModel lognormal_from_json(const nlohmann::json& j);

}  // namespace bayesfblin

#endif  // BAYESFBLIN_LOGNORMAL_HPP
