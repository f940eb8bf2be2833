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

#include "bayesfblin/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

namespace bayesfblin {
namespace {

double safe_eval(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x) {
  const double v = f(x);
  return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

}  // namespace

SimplexResult minimize_simplex(const std::function<double(const Eigen::VectorXd&)>& objective,
                               const Eigen::VectorXd& start, const Eigen::VectorXd& lower,
                               const Eigen::VectorXd& upper, int max_iterations,
                               double initial_step, double tolerance) {
  const Eigen::Index dim = start.size();
  auto project = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
    return x.cwiseMax(lower).cwiseMin(upper);
  };

  std::vector<Eigen::VectorXd> vertices(dim + 1);
  std::vector<double> values(dim + 1);
  vertices[0] = project(start);
  for (Eigen::Index i = 0; i < dim; ++i) {
    Eigen::VectorXd v = vertices[0];
    // Step towards the roomier side of the box so the simplex is not flat.
    v[i] += (upper[i] - v[i] >= v[i] - lower[i]) ? initial_step : -initial_step;
    vertices[i + 1] = project(v);
  }
  for (std::size_t i = 0; i < vertices.size(); ++i) values[i] = safe_eval(objective, vertices[i]);

  std::vector<std::size_t> order(vertices.size());
  int iteration = 0;
  for (; iteration < max_iterations; ++iteration) {
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second_worst = order[order.size() - 2];

    if (std::isfinite(values[worst]) && std::abs(values[worst] - values[best]) <=
                                            tolerance * (std::abs(values[best]) + tolerance)) {
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (i != worst) centroid += vertices[i];
    }
    centroid /= static_cast<double>(dim);

    const Eigen::VectorXd reflected = project(centroid + (centroid - vertices[worst]));
    const double f_reflected = safe_eval(objective, reflected);

    if (f_reflected < values[best]) {
      const Eigen::VectorXd expanded = project(centroid + 2.0 * (centroid - vertices[worst]));
      const double f_expanded = safe_eval(objective, expanded);
      if (f_expanded < f_reflected) {
        vertices[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        vertices[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second_worst]) {
      vertices[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }

    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        outside ? project(centroid + 0.5 * (reflected - centroid))
                : project(centroid + 0.5 * (vertices[worst] - centroid));
    const double f_contracted = safe_eval(objective, contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      vertices[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }

    for (std::size_t i = 0; i < vertices.size(); ++i) {
      if (i == best) continue;
      vertices[i] = project(vertices[best] + 0.5 * (vertices[i] - vertices[best]));
      values[i] = safe_eval(objective, vertices[i]);
    }
  }

  const auto best_it = std::min_element(values.begin(), values.end());
  const auto best = static_cast<std::size_t>(best_it - values.begin());
  return {vertices[best], values[best], iteration};
}

}  // namespace bayesfblin
