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

#include "bayesfblin/gp.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include <spdlog/spdlog.h>

#include "bayesfblin/errors.hpp"
#include "bayesfblin/optim.hpp"

namespace bayesfblin {
namespace {

// Jitter is escalated from kJitterStart to kJitterMax times the mean diagonal.
constexpr double kJitterStart = 1e-10;
constexpr double kJitterMax = 1e-4;
constexpr double kNegativeVarianceTolerance = 1e-8;

void check_point(const KernelSpec& kernel, const TrainingPoint& point) {
  if (point.input.size() != kernel.input_dim()) {
    throw DimensionError("training input has dimension " + std::to_string(point.input.size()) +
                         ", model expects " + std::to_string(kernel.input_dim()));
  }
  if (!(point.noise_variance >= 0.0)) throw ConfigError("noise_variance must be nonnegative");
  if (!std::isfinite(point.target) || !point.input.allFinite()) {
    throw NumericalError("training point is not finite");
  }
}

// Index of an existing point within the dedup radius of `input`, or -1.
long find_duplicate(const std::vector<TrainingPoint>& data, const Eigen::VectorXd& input) {
  for (std::size_t i = 0; i < data.size(); ++i) {
    if ((data[i].input - input).norm() <= GPModel::kDedupRadius) return static_cast<long>(i);
  }
  return -1;
}

}  // namespace

GPModel::GPModel(KernelSpec kernel, double base_noise_variance)
    : GPModel(std::move(kernel), base_noise_variance, std::vector<TrainingPoint>{}) {}

GPModel::GPModel(KernelSpec kernel, double base_noise_variance, std::vector<TrainingPoint> data)
    : kernel_(std::move(kernel)), base_noise_variance_(base_noise_variance) {
  kernel_.validate();
  if (!(base_noise_variance_ >= 0.0)) throw ConfigError("base noise variance must be nonnegative");
  std::vector<TrainingPoint> unique;
  unique.reserve(data.size());
  for (auto& p : data) {
    check_point(kernel_, p);
    const long dup = find_duplicate(unique, p.input);
    if (dup >= 0) {
      unique[static_cast<std::size_t>(dup)] = std::move(p);
    } else {
      unique.push_back(std::move(p));
    }
  }
  impl_ = factorize(kernel_, base_noise_variance_, std::move(unique));
}

GPModel::GPModel(KernelSpec kernel, double base_noise_variance, std::shared_ptr<const Impl> impl)
    : kernel_(std::move(kernel)), base_noise_variance_(base_noise_variance), impl_(std::move(impl)) {}

std::shared_ptr<const GPModel::Impl> GPModel::factorize(const KernelSpec& kernel, double base_noise,
                                                        std::vector<TrainingPoint> data) {
  auto impl = std::make_shared<Impl>();
  impl->data = std::move(data);
  const auto n = static_cast<Eigen::Index>(impl->data.size());
  if (n == 0) return impl;

  std::vector<Eigen::VectorXd> inputs;
  std::vector<double> noise;
  Eigen::VectorXd targets(n);
  inputs.reserve(impl->data.size());
  noise.reserve(impl->data.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = impl->data[static_cast<std::size_t>(i)];
    inputs.push_back(p.input);
    noise.push_back(base_noise + p.noise_variance);
    targets[i] = p.target;
  }
  const Eigen::MatrixXd g = gram(kernel, inputs, noise);

  Eigen::LLT<Eigen::MatrixXd> llt(g);
  double jitter = 0.0;
  if (llt.info() != Eigen::Success) {
    const double scale = g.trace() / static_cast<double>(n);
    bool ok = false;
    for (double rel = kJitterStart; rel <= kJitterMax * (1.0 + 1e-9); rel *= 10.0) {
      jitter = rel * scale;
      llt.compute(g + jitter * Eigen::MatrixXd::Identity(n, n));
      if (llt.info() == Eigen::Success) {
        ok = true;
        break;
      }
    }
    if (!ok) throw NumericalError("Gram matrix is not positive definite after jitter escalation");
    spdlog::debug("gp: factorised with jitter {:.3g}", jitter);
  }
  impl->lower = llt.matrixL();
  impl->alpha = llt.solve(targets);
  impl->jitter = jitter;
  if (!impl->alpha.allFinite()) throw NumericalError("GP weight vector is not finite");
  return impl;
}

GPModel GPModel::condition(const TrainingPoint& point) const {
  check_point(kernel_, point);
  std::vector<TrainingPoint> data = impl_->data;
  const long dup = find_duplicate(data, point.input);
  if (dup >= 0) {
    data[static_cast<std::size_t>(dup)] = point;
  } else {
    data.push_back(point);
  }
  return GPModel(kernel_, base_noise_variance_, factorize(kernel_, base_noise_variance_, std::move(data)));
}

GPModel GPModel::with_kernel(KernelSpec kernel) const {
  kernel.validate();
  auto impl = factorize(kernel, base_noise_variance_, impl_->data);
  return GPModel(std::move(kernel), base_noise_variance_, std::move(impl));
}

Prediction GPModel::posterior(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  const double prior = evaluate(kernel_, x, x);
  const auto& data = impl_->data;
  if (data.empty()) return {0.0, prior};

  Eigen::VectorXd k_star(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) {
    k_star[static_cast<Eigen::Index>(i)] = evaluate(kernel_, data[i].input, x);
  }
  const double mean = k_star.dot(impl_->alpha);
  const Eigen::VectorXd v = impl_->lower.triangularView<Eigen::Lower>().solve(k_star);
  double variance = prior - v.squaredNorm();
  if (variance < 0.0) {
    if (variance < -kNegativeVarianceTolerance * std::max(1.0, prior)) {
      throw NumericalError("posterior variance " + std::to_string(variance) + " is negative");
    }
    impl_->clamped.fetch_add(1, std::memory_order_relaxed);
    variance = 0.0;
  }
  return {mean, variance};
}

double GPModel::log_marginal_likelihood() const {
  const auto& data = impl_->data;
  if (data.empty()) return 0.0;
  Eigen::VectorXd targets(static_cast<Eigen::Index>(data.size()));
  for (std::size_t i = 0; i < data.size(); ++i) targets[static_cast<Eigen::Index>(i)] = data[i].target;
  const double log_det_half = impl_->lower.diagonal().array().log().sum();
  const double n = static_cast<double>(data.size());
  return -0.5 * targets.dot(impl_->alpha) - log_det_half -
         0.5 * n * std::log(2.0 * std::numbers::pi);
}

HyperparameterBounds default_bounds(const KernelSpec& kernel) {
  const int d = kernel.input_dim();
  HyperparameterBounds bounds{Eigen::VectorXd(kernel.num_params()), Eigen::VectorXd(kernel.num_params())};
  bounds.lower.head(d).setConstant(std::log(0.1));
  bounds.upper.head(d).setConstant(std::log(100.0));
  bounds.lower[d] = std::log(0.01);
  bounds.upper[d] = std::log(100.0);
  if (kernel.kind == KernelKind::RationalQuadraticArd) {
    bounds.lower[d + 1] = std::log(0.1);
    bounds.upper[d + 1] = std::log(100.0);
  }
  return bounds;
}

GPModel optimize_hyperparameters(const GPModel& model, const OptimizeOptions& options) {
  if (model.size() < 2) {
    throw OptimizationError("hyperparameter optimisation needs at least two training points");
  }
  const KernelSpec& base = model.kernel();
  const auto& bounds = options.bounds;
  if (bounds.lower.size() != base.num_params() || bounds.upper.size() != base.num_params()) {
    throw DimensionError("hyperparameter bounds do not match the kernel parameter count");
  }
  if ((bounds.lower.array() > bounds.upper.array()).any()) {
    throw ConfigError("hyperparameter lower bound exceeds upper bound");
  }

  auto negative_lml = [&](const Eigen::VectorXd& params) {
    try {
      return -model.with_kernel(base.with_log_params(params)).log_marginal_likelihood();
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };

  std::mt19937_64 rng(options.seed);
  double best_value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_params = base.log_params().cwiseMax(bounds.lower).cwiseMin(bounds.upper);
  const int restarts = std::max(1, options.restarts);
  for (int r = 0; r < restarts; ++r) {
    Eigen::VectorXd start(base.num_params());
    if (r == 0) {
      start = base.log_params().cwiseMax(bounds.lower).cwiseMin(bounds.upper);
    } else {
      for (Eigen::Index i = 0; i < start.size(); ++i) {
        std::uniform_real_distribution<double> dist(bounds.lower[i], bounds.upper[i]);
        start[i] = dist(rng);
      }
    }
    const auto result = minimize_simplex(negative_lml, start, bounds.lower, bounds.upper,
                                         options.max_iterations);
    spdlog::debug("gp: restart {} -> log marginal likelihood {:.6g}", r, -result.value);
    if (result.value < best_value) {
      best_value = result.value;
      best_params = result.argmin;
    }
  }
  if (!std::isfinite(best_value)) {
    throw OptimizationError("no restart reached a finite log marginal likelihood");
  }
  return model.with_kernel(base.with_log_params(best_params));
}

void to_json(nlohmann::json& j, const TrainingPoint& point) {
  j = nlohmann::json{{"input", std::vector<double>(point.input.data(), point.input.data() + point.input.size())},
                     {"target", point.target},
                     {"noise_variance", point.noise_variance}};
}

void from_json(const nlohmann::json& j, TrainingPoint& point) {
  const auto input = j.at("input").get<std::vector<double>>();
  point.input = Eigen::Map<const Eigen::VectorXd>(input.data(), static_cast<Eigen::Index>(input.size()));
  point.target = j.at("target").get<double>();
  point.noise_variance = j.value("noise_variance", 0.0);
}

nlohmann::json gp_to_json(const GPModel& model) {
  return nlohmann::json{{"kernel", model.kernel()},
                        {"base_noise_variance", model.base_noise_variance()},
                        {"data", model.data()}};
}

GPModel gp_from_json(const nlohmann::json& j) {
  return GPModel(j.at("kernel").get<KernelSpec>(), j.at("base_noise_variance").get<double>(),
                 j.at("data").get<std::vector<TrainingPoint>>());
}

}  // namespace bayesfblin
