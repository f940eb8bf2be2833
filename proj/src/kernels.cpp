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

#include "bayesfblin/kernels.hpp"

#include <cmath>
#include <string>

#include "bayesfblin/errors.hpp"

namespace bayesfblin {
namespace {

double scaled_sq_distance(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                          const Eigen::Ref<const Eigen::VectorXd>& x_prime) {
  if (x.size() != spec.lengthscales.size() || x_prime.size() != spec.lengthscales.size()) {
    throw DimensionError("kernel input dimension " + std::to_string(x.size()) + "/" +
                         std::to_string(x_prime.size()) + " does not match " +
                         std::to_string(spec.lengthscales.size()) + " lengthscales");
  }
  return ((x - x_prime).array() / spec.lengthscales.array()).square().sum();
}

}  // namespace

KernelSpec KernelSpec::squared_exponential(Eigen::VectorXd lengthscales, double output_scale) {
  KernelSpec spec;
  spec.kind = KernelKind::SquaredExponentialArd;
  spec.lengthscales = std::move(lengthscales);
  spec.output_scale = output_scale;
  spec.validate();
  return spec;
}

KernelSpec KernelSpec::rational_quadratic(Eigen::VectorXd lengthscales, double output_scale,
                                          double alpha) {
  KernelSpec spec;
  spec.kind = KernelKind::RationalQuadraticArd;
  spec.lengthscales = std::move(lengthscales);
  spec.output_scale = output_scale;
  spec.alpha = alpha;
  spec.validate();
  return spec;
}

void KernelSpec::validate() const {
  if (lengthscales.size() == 0) throw ConfigError("kernel needs at least one lengthscale");
  for (Eigen::Index d = 0; d < lengthscales.size(); ++d) {
    if (!(lengthscales[d] > 0.0) || !std::isfinite(lengthscales[d])) {
      throw ConfigError("kernel lengthscales must be positive and finite");
    }
  }
  if (!(output_scale > 0.0) || !std::isfinite(output_scale)) {
    throw ConfigError("kernel output_scale must be positive and finite");
  }
  if (kind == KernelKind::RationalQuadraticArd && (!(alpha > 0.0) || !std::isfinite(alpha))) {
    throw ConfigError("rational quadratic alpha must be positive and finite");
  }
}

int KernelSpec::num_params() const {
  return input_dim() + 1 + (kind == KernelKind::RationalQuadraticArd ? 1 : 0);
}

Eigen::VectorXd KernelSpec::log_params() const {
  Eigen::VectorXd params(num_params());
  params.head(input_dim()) = lengthscales.array().log();
  params[input_dim()] = std::log(output_scale);
  if (kind == KernelKind::RationalQuadraticArd) params[input_dim() + 1] = std::log(alpha);
  return params;
}

KernelSpec KernelSpec::with_log_params(const Eigen::VectorXd& params) const {
  if (params.size() != num_params()) {
    throw DimensionError("expected " + std::to_string(num_params()) +
                         " log hyperparameters, got " + std::to_string(params.size()));
  }
  KernelSpec out = *this;
  out.lengthscales = params.head(input_dim()).array().exp();
  out.output_scale = std::exp(params[input_dim()]);
  if (kind == KernelKind::RationalQuadraticArd) out.alpha = std::exp(params[input_dim() + 1]);
  return out;
}

bool KernelSpec::operator==(const KernelSpec& other) const {
  if (kind != other.kind || output_scale != other.output_scale) return false;
  if (lengthscales.size() != other.lengthscales.size()) return false;
  if (lengthscales != other.lengthscales) return false;
  return kind == KernelKind::SquaredExponentialArd || alpha == other.alpha;
}

double evaluate(const KernelSpec& spec, const Eigen::Ref<const Eigen::VectorXd>& x,
                const Eigen::Ref<const Eigen::VectorXd>& x_prime) {
  const double r2 = scaled_sq_distance(spec, x, x_prime);
  const double sf2 = spec.output_scale * spec.output_scale;
  switch (spec.kind) {
    case KernelKind::SquaredExponentialArd:
      return sf2 * std::exp(-0.5 * r2);
    case KernelKind::RationalQuadraticArd:
      return sf2 * std::pow(1.0 + r2 / (2.0 * spec.alpha), -spec.alpha);
  }
  return 0.0;
}

Eigen::MatrixXd gram(const KernelSpec& spec, std::span<const Eigen::VectorXd> points,
                     std::span<const double> noise) {
  const auto n = static_cast<Eigen::Index>(points.size());
  if (noise.size() != 1 && noise.size() != points.size()) {
    throw DimensionError("noise list has " + std::to_string(noise.size()) + " entries for " +
                         std::to_string(points.size()) + " points");
  }
  Eigen::MatrixXd g(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      g(i, j) = g(j, i) = evaluate(spec, points[i], points[j]);
    }
    g(i, i) = evaluate(spec, points[i], points[i]) + noise[noise.size() == 1 ? 0 : i];
  }
  if (!g.allFinite()) throw NumericalError("Gram matrix has non-finite entries");
  return g;
}

void to_json(nlohmann::json& j, const KernelSpec& spec) {
  j = nlohmann::json{
      {"kind", spec.kind == KernelKind::SquaredExponentialArd ? "se_ard" : "rq_ard"},
      {"lengthscales", std::vector<double>(spec.lengthscales.data(),
                                           spec.lengthscales.data() + spec.lengthscales.size())},
      {"output_scale", spec.output_scale},
      {"alpha", spec.alpha}};
}

void from_json(const nlohmann::json& j, KernelSpec& spec) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "se_ard") {
    spec.kind = KernelKind::SquaredExponentialArd;
  } else if (kind == "rq_ard") {
    spec.kind = KernelKind::RationalQuadraticArd;
  } else {
    throw ConfigError("unknown kernel kind '" + kind + "'");
  }
  const auto ls = j.at("lengthscales").get<std::vector<double>>();
  spec.lengthscales = Eigen::Map<const Eigen::VectorXd>(ls.data(), static_cast<Eigen::Index>(ls.size()));
  spec.output_scale = j.at("output_scale").get<double>();
  spec.alpha = j.value("alpha", 2.0);
  spec.validate();
}

}  // namespace bayesfblin
