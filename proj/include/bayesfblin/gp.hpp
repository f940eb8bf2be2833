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

#ifndef BAYESFBLIN_GP_HPP
#define BAYESFBLIN_GP_HPP

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "bayesfblin/kernels.hpp"

namespace bayesfblin {

struct TrainingPoint {
  Eigen::VectorXd input;
  double target = 0.0;
  double noise_variance = 0.0;  // added on top of the model's base noise
};

struct Prediction {
  double mean;
  double variance;
};

/// Exact zero-mean GP regression with heteroscedastic observation noise.
///
/// Models are immutable: `condition` returns a new model and copies share
/// the cached factorisation, so concurrent reads are safe.
class GPModel {
 public:
  GPModel(KernelSpec kernel, double base_noise_variance);
  GPModel(KernelSpec kernel, double base_noise_variance, std::vector<TrainingPoint> data);

  /// Adds `point`, replacing an existing point whose input lies within
  /// kDedupRadius of it. Throws NumericalError if the Gram matrix cannot be
  /// factorised even after jitter escalation.
  GPModel condition(const TrainingPoint& point) const;

  Prediction posterior(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  /// log p(y | X, theta); zero for an empty data set.
  double log_marginal_likelihood() const;

  /// Same data, different kernel (re-factorises).
  GPModel with_kernel(KernelSpec kernel) const;

  const KernelSpec& kernel() const { return kernel_; }
  double base_noise_variance() const { return base_noise_variance_; }
  const std::vector<TrainingPoint>& data() const { return impl_->data; }
  std::size_t size() const { return impl_->data.size(); }
  int input_dim() const { return kernel_.input_dim(); }

  /// Lower Cholesky factor of K + diag(noise) + jitter*I.
  const Eigen::MatrixXd& factor() const { return impl_->lower; }
  double jitter() const { return impl_->jitter; }

  /// Number of posterior queries whose variance came out slightly negative
  /// and was clamped to zero.
  std::size_t clamped_variance_count() const { return impl_->clamped.load(); }

  static constexpr double kDedupRadius = 1e-6;

 private:
  struct Impl {
    std::vector<TrainingPoint> data;
    Eigen::MatrixXd lower;
    Eigen::VectorXd alpha;
    double jitter = 0.0;
    mutable std::atomic<std::size_t> clamped{0};
  };

  GPModel(KernelSpec kernel, double base_noise_variance, std::shared_ptr<const Impl> impl);
  static std::shared_ptr<const Impl> factorize(const KernelSpec& kernel, double base_noise,
                                               std::vector<TrainingPoint> data);

  KernelSpec kernel_;
  double base_noise_variance_;
  std::shared_ptr<const Impl> impl_;
};

/// Log-space box for the kernel hyperparameters, same layout as
/// KernelSpec::log_params().
struct HyperparameterBounds {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;
};

HyperparameterBounds default_bounds(const KernelSpec& kernel);

struct OptimizeOptions {
  HyperparameterBounds bounds;
  int restarts = 5;
  int max_iterations = 500;
  std::uint64_t seed = 0;
};

/// Maximises the log marginal likelihood over the kernel hyperparameters with
/// a seeded multi-start simplex search. The first start is the model's current
/// kernel (clamped into the bounds); the remaining starts are drawn uniformly
/// in the log-space box.
GPModel optimize_hyperparameters(const GPModel& model, const OptimizeOptions& options);

void to_json(nlohmann::json& j, const TrainingPoint& point);
void from_json(const nlohmann::json& j, TrainingPoint& point);
nlohmann::json gp_to_json(const GPModel& model);
GPModel gp_from_json(const nlohmann::json& j);

}  // namespace bayesfblin

#endif  // BAYESFBLIN_GP_HPP
