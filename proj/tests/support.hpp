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

// Shared generators and reference computations for the test suites.

#ifndef BAYESFBLIN_TESTS_SUPPORT_HPP
#define BAYESFBLIN_TESTS_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bayesfblin/gp.hpp"
#include "bayesfblin/kernels.hpp"

namespace bayesfblin::testing {

class Gen {
 public:
  explicit Gen(std::uint64_t seed) : rng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  double normal(double mean = 0.0, double sd = 1.0) {
    return std::normal_distribution<double>(mean, sd)(rng_);
  }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Eigen::VectorXd vector(int dim, double lo, double hi) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) v[i] = uniform(lo, hi);
    return v;
  }

  std::vector<Eigen::VectorXd> points(int count, int dim, double lo, double hi) {
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < count; ++i) out.push_back(vector(dim, lo, hi));
    return out;
  }

  KernelSpec kernel(int dim) {
    Eigen::VectorXd ls = vector(dim, 0.3, 3.0);
    const double sf = uniform(0.3, 2.0);
    if (integer(0, 1) == 0) return KernelSpec::squared_exponential(ls, sf);
    return KernelSpec::rational_quadratic(ls, sf, uniform(0.5, 5.0));
  }

  // Points spaced apart so the dedup rule never merges them.
  std::vector<TrainingPoint> dataset(int count, int dim) {
    std::vector<TrainingPoint> out;
    while (static_cast<int>(out.size()) < count) {
      TrainingPoint p{vector(dim, -2.0, 2.0), normal(0.0, 1.5), uniform(0.0, 0.05)};
      bool far = true;
      for (const auto& q : out) far = far && (q.input - p.input).norm() > 1e-2;
      if (far) out.push_back(p);
    }
    return out;
  }

 private:
  std::mt19937_64 rng_;
};

// Posterior and evidence from an explicit matrix inverse, for comparison with the factorised path.
struct DenseOracle {
  Eigen::MatrixXd inverse;
  Eigen::VectorXd weights;
  double lml = 0.0;

  DenseOracle(const KernelSpec& k, double base_noise, const std::vector<TrainingPoint>& data) : k_(k) {
    const auto n = static_cast<Eigen::Index>(data.size());
    Eigen::MatrixXd g(n, n);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      y[i] = data[i].target;
      inputs_.push_back(data[i].input);
      for (Eigen::Index j = 0; j < n; ++j) g(i, j) = evaluate(k, data[i].input, data[j].input);
      g(i, i) += base_noise + data[i].noise_variance;
    }
    inverse = g.inverse();
    weights = inverse * y;
    lml = -0.5 * y.dot(weights) - 0.5 * std::log(g.determinant()) -
          0.5 * static_cast<double>(n) * std::log(2.0 * std::numbers::pi);
  }

  Prediction at(const Eigen::VectorXd& x) const {
    Eigen::VectorXd ks(static_cast<Eigen::Index>(inputs_.size()));
    for (std::size_t i = 0; i < inputs_.size(); ++i) ks[static_cast<Eigen::Index>(i)] = evaluate(k_, x, inputs_[i]);
    return {ks.dot(weights), evaluate(k_, x, x) - ks.dot(inverse * ks)};
  }

 private:
  KernelSpec k_;
  std::vector<Eigen::VectorXd> inputs_;
};

inline Eigen::VectorXd vec(std::initializer_list<double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v[i++] = x;
  return v;
}

}  // namespace bayesfblin::testing

#endif  // BAYESFBLIN_TESTS_SUPPORT_HPP
