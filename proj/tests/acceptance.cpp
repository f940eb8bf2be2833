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


// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "bayesfblin/dynamics.hpp"
#include "bayesfblin/estimation.hpp"
#include "bayesfblin/gp.hpp"
#include "bayesfblin/harness.hpp"
#include "bayesfblin/lognormal.hpp"
#include "support.hpp"

namespace bf = bayesfblin;
namespace fs = std::filesystem;

namespace {

const fs::path kExperiments{BAYESFBLIN_EXPERIMENTS_DIR};
const double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "FAILED ") + what;
  }
};

class Suite {
 public:
  explicit Suite(fs::path work) : work_(std::move(work)) { fs::create_directories(work_); }

  void run(int id, const std::string& title, double limit_s, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = body();
    } catch (const std::exception& e) {
      out.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    out.require(secs < limit_s, fmt::format("runtime {:.1f}s < {:.0f}s", secs, limit_s));
    failures_ += out.pass ? 0 : 1;
    std::printf("criterion %d [%s]: %s | %s\n", id, title.c_str(), out.pass ? "PASS" : "FAIL", out.detail.c_str());
    std::fflush(stdout);
  }

  const fs::path& work() const { return work_; }
  int failures() const { return failures_; }

 private:
  fs::path work_;
  int failures_ = 0;
};

double offset(const bf::State& x) { return std::hypot(x.x1[0] - kPi, x.x2[0]); }

std::string describe(const bf::RunRecord& r) {
  const auto m = bf::metrics(r);
  return fmt::format("{} E={:.1f} err={:.1f} |D|=({},{}) probes={} terminal=({:.4f},{:.4f}) conv={}", r.name,
                     m.energy, m.error, m.n_data_a, m.n_data_b, r.counters.probes_a + r.counters.probes_b,
                     r.terminal.x1[0], r.terminal.x2[0], bf::converged(r) ? "yes" : "no");
}

bf::ExperimentConfig load(const std::string& file) { return bf::load_config(kExperiments / file); }

bf::ExperimentConfig proportional(bf::ExperimentConfig c, double gain) {
  c.controller = bf::ControllerKind::Proportional;
  c.gain = gain;
  c.hyper_mode = bf::HyperMode::Fixed;
  c.pilot_model.reset();
  c.name = fmt::format("{}_p{}", c.name, gain);
  return c;
}

// Least-squares line through (t, log y); returns slope and coefficient of determination.
std::pair<double, double> log_linear_fit(const std::vector<double>& t, const std::vector<double>& y) {
  const double n = static_cast<double>(t.size());
  double st = 0, sl = 0, stt = 0, stl = 0;
  std::vector<double> ly;
  for (std::size_t i = 0; i < t.size(); ++i) {
    ly.push_back(std::log(y[i]));
    st += t[i];
    sl += ly[i];
    stt += t[i] * t[i];
    stl += t[i] * ly[i];
  }
  const double slope = (n * stl - st * sl) / (n * stt - st * st);
  const double icept = (sl - slope * st) / n;
  const double mean = sl / n;
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    ss_res += std::pow(ly[i] - (icept + slope * t[i]), 2);
    ss_tot += std::pow(ly[i] - mean, 2);
  }
  return {slope, 1.0 - ss_res / ss_tot};
}

Outcome oracle_equivalence() {
  Outcome out;
  bf::testing::Gen gen(1001);
  double worst = 0.0;
  const int datasets = 2000;
  for (int trial = 0; trial < datasets; ++trial) {
    const int dim = gen.integer(1, 3);
    const auto k = gen.kernel(dim);
    const double base = gen.uniform(1e-3, 0.1);
    const auto data = gen.dataset(gen.integer(1, 8), dim);
    const bf::GPModel gp(k, base, data);
    const bf::testing::DenseOracle oracle(k, base, data);
    worst = std::max(worst, std::abs(gp.log_marginal_likelihood() - oracle.lml));
    for (int q = 0; q < 5; ++q) {
      const auto x = gen.vector(dim, -3, 3);
      const auto got = gp.posterior(x);
      const auto want = oracle.at(x);
      worst = std::max({worst, std::abs(got.mean - want.mean), std::abs(got.variance - want.variance)});
    }
  }
  out.require(worst <= 1e-8, fmt::format("{} datasets, max deviation {:.2e} <= 1e-8", datasets, worst));
  return out;
}

Outcome numerics() {
  Outcome out;
  bf::testing::Gen gen(1002);
  const bf::PendulumParams p{1.0, 0.5, 0.0, 9.81};
  const auto plant = bf::make_pendulum(p);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  double drift = 0.0;
  for (int trial = 0; trial < 3; ++trial) {
    auto x = bf::State::scalar(gen.uniform(-kPi, kPi), gen.uniform(-3, 3));
    const double e0 = bf::pendulum_energy(p, x);
    for (int k = 0; k < 2000; ++k) x = bf::integrate_hold(plant, x, zero, 0.01, 1e-8);
    drift = std::max(drift, std::abs(bf::pendulum_energy(p, x) - e0) / std::max(std::abs(e0), p.mass * p.gravity * p.length));
  }
  out.require(drift < 1e-6, fmt::format("energy drift over 20 s {:.2e} < 1e-6", drift));

  double worst = 0.0;
  for (int trial = 0; trial < 10000; ++trial) {
    const double a = gen.uniform(-2, 2), b = gen.uniform(-2, 2), c = gen.uniform(-2, 2);
    const double t0 = gen.uniform(-1, 1), d = gen.uniform(5e-3, 0.1);
    bf::SampleWindow w;
    for (std::size_t i = 0; i < 3; ++i) {
      const double t = t0 + static_cast<double>(i) * d;
      w.times[i] = t;
      const double v = a * t * t + b * t + c;
      w.states[i] = bf::State::scalar(v, v);
    }
    const auto e = bf::central_difference(w);
    worst = std::max(worst, std::abs(e.derivative.x2[0] - (2 * a * (t0 + d) + b)));
  }
  out.require(worst <= 1e-12, fmt::format("central difference on quadratics max error {:.2e} <= 1e-12", worst));
  return out;
}

Outcome lognormal_sampling() {
  Outcome out;
  const double mu = 0.3, var = 0.5;
  std::mt19937_64 rng(1003);
  std::normal_distribution<double> z(mu, std::sqrt(var));
  const int n = 1'000'000;
  double s = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const double b = std::exp(z(rng));
    s += b;
    ss += b * b;
  }
  const double mc_mean = s / n;
  const double mc_var = ss / n - mc_mean * mc_mean;
  const double rel_mean = std::abs(mc_mean - bf::lognormal_mean(mu, var)) / bf::lognormal_mean(mu, var);
  const double rel_var = std::abs(mc_var - bf::lognormal_variance(mu, var)) / bf::lognormal_variance(mu, var);
  out.require(rel_mean < 0.01, fmt::format("mean rel. error {:.2e} < 1%", rel_mean));
  out.require(rel_var < 0.02, fmt::format("variance rel. error {:.2e} < 2%", rel_var));
  return out;
}

struct ExpOne {
  bf::RunRecord sp1, sp2;
};

ExpOne run_exp1(const fs::path& dir) {
  auto c = load("exp1.json");
  c.name = "exp1_sp1";
  ExpOne r{bf::simulate(c), {}};
  c.name = "exp1_sp2";
  r.sp2 = bf::simulate(c, &*r.sp1.models);
  bf::report(std::vector<bf::RunRecord>{r.sp1, r.sp2}, dir / "exp1");
  return r;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path work = fs::temp_directory_path() / "bayesfblin_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--work-dir") work = argv[i + 1];
  }
  Suite suite(work);

  suite.run(1, "GP oracle equivalence", 10, oracle_equivalence);
  suite.run(2, "integrator and differencing numerics", 5, numerics);
  suite.run(3, "log-normal moments vs Monte Carlo", 10, lognormal_sampling);

  ExpOne exp1;
  suite.run(4, "Exp. 1 reproduction", 120, [&] {
    Outcome out;
    exp1 = run_exp1(suite.work());
    const auto& t = exp1.sp1.terminal;
    out.require(std::abs(t.x1[0] - kPi) < 0.05 && std::abs(t.x2[0]) < 0.05 && bf::converged(exp1.sp1),
                describe(exp1.sp1));
    const auto m1 = bf::metrics(exp1.sp1);
    const auto m2 = bf::metrics(exp1.sp2);
    out.require(m2.energy < m1.energy && m2.error < m1.error, describe(exp1.sp2));
    return out;
  });

  double p100_exp3_energy = std::nan("");
  suite.run(5, "P-controller baselines", 30, [&] {
    Outcome out;
    std::vector<bf::RunRecord> all;
    for (const char* file : {"exp1.json", "exp2.json", "exp3.json"}) {
      const auto c = load(file);
      const auto p1 = bf::simulate(proportional(c, 1.0));
      const auto p100 = bf::simulate(proportional(c, 100.0));
      if (std::string(file) == "exp3.json") p100_exp3_energy = bf::metrics(p100).energy;
      out.require(!bf::converged(p1), describe(p1));
      out.require(bf::converged(p100) && bf::metrics(p100).energy > bf::metrics(p1).energy, describe(p100));
      all.push_back(p1);
      all.push_back(p100);
    }
    bf::report(all, suite.work() / "baselines");
    return out;
  });

  std::optional<bf::ModelBundle> exp2_pilot;
  suite.run(6, "Exp. 2 reproduction", 60, [&] {
    Outcome out;
    auto c = load("exp2.json");
    c.name = "exp2_sp1";
    const auto sp1 = bf::simulate(c);
    c.name = "exp2_sp2";
    const auto sp2 = bf::simulate(c, &*sp1.models);
    exp2_pilot = sp1.models;
    for (const auto* r : {&sp1, &sp2}) {
      const auto m = bf::metrics(*r);
      out.require(!bf::converged(*r) && offset(r->terminal) > 0.5 && m.n_data_a + m.n_data_b <= 5, describe(*r));
    }
    bf::report(std::vector<bf::RunRecord>{sp1, sp2}, suite.work() / "exp2");
    bf::save_models(*sp1.models, suite.work() / "exp2" / "exp2_sp1_models.json");
    return out;
  });

  suite.run(7, "Exp. 3 reproduction", 120, [&] {
    Outcome out;
    auto c = load("exp3.json");
    if (!exp2_pilot) {
      auto c2 = load("exp2.json");
      exp2_pilot = bf::simulate(c2).models;
    }
    if (std::isnan(p100_exp3_energy)) p100_exp3_energy = bf::metrics(bf::simulate(proportional(c, 100.0))).energy;
    auto tuned = bf::optimize_mode(c, *exp2_pilot);
    tuned.name = "exp3_sp1";
    const auto sp1 = bf::simulate(tuned);
    tuned.name = "exp3_sp2";
    const auto sp2 = bf::simulate(tuned, &*sp1.models);
    for (const auto* r : {&sp1, &sp2}) {
      out.require(bf::converged(*r) && bf::metrics(*r).energy < p100_exp3_energy,
                  describe(*r) + fmt::format(" vs P100 E={:.1f}", p100_exp3_energy));
    }
    bf::report(std::vector<bf::RunRecord>{sp1, sp2}, suite.work() / "exp3");
    return out;
  });

  suite.run(8, "exponential convergence without learning", 30, [&] {
    Outcome out;
    if (!exp1.sp2.models) exp1 = run_exp1(suite.work());
    auto c = load("exp1.json");
    c.name = "exp1_no_learning";
    c.control.probe_budget_end = -1.0;
    const auto r = bf::simulate(c, &*exp1.sp2.models);
    out.require(r.counters.probes_a + r.counters.probes_b == 0, "no probing after budget");
    std::vector<double> t, e;
    const double t_end = r.rows.back().t;
    for (const auto& row : r.rows) {
      if (row.t >= t_end - 10.0) {
        t.push_back(row.t);
        e.push_back(std::hypot(row.x1 - kPi, row.x2));
      }
    }
    const auto [slope, r2] = log_linear_fit(t, e);
    out.require(-slope > 0.0 && r2 > 0.9, fmt::format("lambda={:.4f} > 0, R^2={:.4f} > 0.9", -slope, r2));
    return out;
  });

  suite.run(9, "determinism", 120, [&] {
    Outcome out;
    auto c = load("exp1.json");
    std::string text[2];
    for (int i = 0; i < 2; ++i) {
      const fs::path dir = suite.work() / fmt::format("determinism_{}", i);
      bf::report(std::vector<bf::RunRecord>{bf::simulate(c)}, dir);
      std::ifstream in(dir / "metrics.json", std::ios::binary);
      std::stringstream ss;
      ss << in.rdbuf();
      text[i] = ss.str();
    }
    out.require(!text[0].empty() && text[0] == text[1],
                fmt::format("metrics.json byte-identical ({} bytes)", text[0].size()));
    return out;
  });

  std::printf("acceptance: %d criterion(s) failed\n", suite.failures());
  return suite.failures() == 0 ? 0 : 1;
}
