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

#include "bayesfblin/lognormal.hpp"

#include <cmath>
#include <string>

#include "bayesfblin/errors.hpp"

namespace bayesfblin {

double lognormal_mean(double log_mean, double log_variance) {
  return std::exp(log_mean + 0.5 * log_variance);
}

double lognormal_variance(double log_mean, double log_variance) {
  return std::exp(2.0 * log_mean + log_variance) * std::expm1(log_variance);
}

LogNormalModel::LogNormalModel(GPModel log_gp, LogNoisePolicy policy)
    : log_gp_(std::move(log_gp)), policy_(policy) {
  if (!(policy_.fixed_variance >= 0.0) || !(policy_.floor >= 0.0)) {
    throw ConfigError("log-space noise settings must be nonnegative");
  }
}

double LogNormalModel::observation_log_noise(double b_estimate, double linear_variance) const {
  if (!policy_.delta_method) return policy_.fixed_variance;
  return std::max(policy_.floor, linear_variance / (b_estimate * b_estimate));
}

LogNormalModel LogNormalModel::observe(const Eigen::Ref<const Eigen::VectorXd>& x, double b_estimate,
                                       double linear_variance) const {
  if (!(b_estimate > 0.0) || !std::isfinite(b_estimate)) {
    throw InvalidObservation("input-gain estimate " + std::to_string(b_estimate) +
                             " is not positive");
  }
  if (!(linear_variance >= 0.0)) throw InvalidObservation("negative observation variance");
  TrainingPoint point{x, std::log(b_estimate), observation_log_noise(b_estimate, linear_variance)};
  return LogNormalModel(log_gp_.condition(point), policy_);
}

double LogNormalModel::linear_mean(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const auto p = log_gp_.posterior(x);
  return lognormal_mean(p.mean, p.variance);
}

double LogNormalModel::linear_variance(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const auto p = log_gp_.posterior(x);
  return lognormal_variance(p.mean, p.variance);
}

void to_json(nlohmann::json& j, const LogNoisePolicy& policy) {
  j = nlohmann::json{{"fixed_variance", policy.fixed_variance},
                     {"delta_method", policy.delta_method},
                     {"floor", policy.floor}};
}

void from_json(const nlohmann::json& j, LogNoisePolicy& policy) {
  policy.fixed_variance = j.value("fixed_variance", 0.1);
  policy.delta_method = j.value("delta_method", false);
  policy.floor = j.value("floor", 1e-4);
}

nlohmann::json lognormal_to_json(const LogNormalModel& model) {
  return nlohmann::json{{"type", "lognormal"},
                        {"log_gp", gp_to_json(model.log_gp())},
                        {"noise_policy", model.policy()}};
}

LogNormalModel lognormal_from_json(const nlohmann::json& j) {
  if (j.value("type", std::string{}) != "lognormal") {
    throw ConfigError("expected a model of type 'lognormal'");
  }
  LogNoisePolicy policy;
  if (j.contains("noise_policy")) policy = j.at("noise_policy").get<LogNoisePolicy>();
  return LogNormalModel(gp_from_json(j.at("log_gp")), policy);
}

}  // namespace bayesfblin
