/*
 Copyright 2026 The hocs Authors

 Licensed under the Apache License, Version 2.0 (the "License");
 you may not use this file except in compliance with the License.
 You may obtain a copy of the License at

      https://www.apache.org/licenses/LICENSE-2.0

 Unless required by applicable law or agreed to in writing, software
 distributed under the License is distributed on an "AS IS" BASIS,
 WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 See the License for the specific language governing permissions and
 limitations under the License.
*/

// Built-in example problems, their output bundles, and the controller
// comparison study on the mean-field example.

#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "hocs/config.hpp"
#include "hocs/csv.hpp"
#include "hocs/simulate.hpp"

namespace hocs {

struct NamedConfig {
  std::string name;
  RunConfig config;
};

/// Deterministic: a_bar=1, b_bar=2, q_bar=q_bar_N=3, r_bar=4, xbar_0=10, N=6.
inline RunConfig example1_config(int p) {
  ScalarProblem s;
  s.problem_class = ProblemClass::Deterministic;
  s.n_steps = 6;
  s.a_bar = 1.0;
  s.b_bar = 2.0;
  s.q_bar = s.q_bar_terminal = 3.0;
  s.r_bar = 4.0;
  s.p = p;
  s.initial = InitialLaw::dirac(10.0);
  return {s.build(), {}};
}

/// Additive noise: a_bar=2, b_bar=3, q_bar=q_bar_N=2, r_bar=3, q=q_N=4, r=5,
/// x_0 = 20.25 a.s., N=10, Gaussian noise with unit variance.
inline RunConfig example2_config(int p) {
  ScalarProblem s;
  s.problem_class = ProblemClass::Additive;
  s.n_steps = 10;
  s.a_bar = 2.0;
  s.b_bar = 3.0;
  s.q_bar = s.q_bar_terminal = 2.0;
  s.r_bar = 3.0;
  s.q = s.q_terminal = 4.0;
  s.r = 5.0;
  s.p = p;
  s.noise = NoiseSpec(NoiseKind::Additive, GaussianNoise{1.0});
  s.initial = InitialLaw::dirac(20.25);
  return {s.build(), {}};
}

/// Multiplicative state noise: a_bar=7, b_bar=6, q_bar=q_bar_N=4, r_bar=3,
/// q=q_N=2, r=1, N=10. The initial law is the two-point law with mean 15.3
/// that has 15 in its support.
inline RunConfig example3_config(int p) {
  ScalarProblem s;
  s.problem_class = ProblemClass::MultState;
  s.n_steps = 10;
  s.a_bar = 7.0;
  s.b_bar = 6.0;
  s.q_bar = s.q_bar_terminal = 4.0;
  s.r_bar = 3.0;
  s.q = s.q_terminal = 2.0;
  s.r = 1.0;
  s.p = p;
  s.noise = NoiseSpec(NoiseKind::MultState, GaussianNoise{1.0});
  s.initial = InitialLaw::empirical({15.0, 15.6});
  return {s.build(), {}};
}

/// Mean-field multiplicative noise: a_bar=b_bar=1, a=b=1/2, all weights 1,
/// N=10, o=p. Two-point initial law with mean 20.01 and 20 in its support.
inline RunConfig example4_config(int p) {
  ScalarProblem s;
  s.problem_class = ProblemClass::HigherMoment;
  s.n_steps = 10;
  s.a_bar = s.b_bar = 1.0;
  s.a = s.b = 0.5;
  s.q = s.q_terminal = s.q_bar = s.q_bar_terminal = s.r = s.r_bar = 1.0;
  s.p = s.o = p;
  s.noise = NoiseSpec(NoiseKind::MultMeanField, GaussianNoise{1.0});
  s.initial = InitialLaw::empirical({20.0, 20.02});
  return {s.build(), {}};
}

inline std::vector<NamedConfig> example_configs(int id) {
  RunConfig (*make)(int) = nullptr;
  switch (id) {
    case 1: make = example1_config; break;
    case 2: make = example2_config; break;
    case 3: make = example3_config; break;
    case 4: make = example4_config; break;
    default: throw Error(ErrorCode::Config, "no built-in example " + std::to_string(id));
  }
  std::vector<NamedConfig> out;
  for (int p = 1; p <= 3; ++p) out.push_back({"example" + std::to_string(id) + "_p" + std::to_string(p), make(p)});
  return out;
}

// ---------------------------------------------------------------------------
// Tables

inline CsvTable mean_table(const TrajectoryEnsemble& ens) {
  CsvTable t;
  t.header = {"k", "x_bar", "u_bar"};
  for (std::size_t k = 0; k <= ens.n_steps; ++k) {
    t.rows.push_back({static_cast<double>(k), ens.mean_path[k],
                      k < ens.n_steps ? Cell(ens.mean_control[k]) : Cell()});
  }
  return t;
}

/// States and controls of the first `max_paths` paths, one column pair per path.
inline CsvTable paths_table(const TrajectoryEnsemble& ens, std::size_t max_paths) {
  const std::size_t shown = std::min(max_paths, ens.n_paths);
  CsvTable t;
  t.header = {"k"};
  for (std::size_t i = 0; i < shown; ++i) {
    t.header.push_back("x_" + std::to_string(i));
    t.header.push_back("u_" + std::to_string(i));
  }
  for (std::size_t k = 0; k <= ens.n_steps; ++k) {
    std::vector<Cell> row{static_cast<double>(k)};
    for (std::size_t i = 0; i < shown; ++i) {
      row.emplace_back(ens.x(i, k));
      row.push_back(k < ens.n_steps ? Cell(ens.u(i, k)) : Cell());
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline CsvTable moments_table(const TrajectoryEnsemble& ens) {
  CsvTable t;
  t.header = {"k"};
  for (const auto& [order, _] : ens.central_moments) t.header.push_back("m" + std::to_string(order));
  for (std::size_t k = 0; k <= ens.n_steps; ++k) {
    std::vector<Cell> row{static_cast<double>(k)};
    for (const auto& [_, m] : ens.central_moments) row.emplace_back(m[k]);
    t.rows.push_back(std::move(row));
  }
  return t;
}

inline CsvTable cost_table(const CostReport& r) {
  CsvTable t;
  t.header = {"realized_mean", "realized_stderr", "predicted",     "state_power",
              "control_power", "state_moment",    "control_moment"};
  const auto& b = r.breakdown;
  t.rows.push_back({r.realized_mean, r.realized_stderr, std::isnan(r.predicted) ? Cell() : Cell(r.predicted),
                    b.state_power, b.control_power, b.state_moment, b.control_moment});
  return t;
}

inline CsvTable kpi_table(const TrajectoryEnsemble& ens) {
  CsvTable t;
  t.header = {"zeta", "kpi_x", "kpi_u"};
  for (int zeta = 1; zeta <= 3; ++zeta) {
    const Kpi v = kpi(ens, zeta);
    t.rows.push_back({static_cast<double>(zeta), v.x, v.u});
  }
  return t;
}

// ---------------------------------------------------------------------------
// Example bundles

struct ExampleRun {
  std::string name;
  RunConfig config;
  Solution solution;
  TrajectoryEnsemble ensemble;
  CostReport cost;
};

/// Solves and simulates one config. Noise-free problems use a single path.
inline ExampleRun run_config(const std::string& name, const RunConfig& cfg) {
  ExampleRun run{name, cfg, solve(cfg.problem, cfg.run.solve_options()), {}, {}};
  SimulationOptions sim;
  sim.mean_mode = cfg.run.mean_mode;
  sim.threads = cfg.run.threads;
  const std::size_t n_paths = is_stochastic(cfg.problem.problem_class) ? cfg.run.n_paths : 1;
  run.ensemble = simulate_ensemble(cfg.problem, FeedbackPolicy(run.solution.gains), n_paths, cfg.run.master_seed, sim);
  CostOptions copts;
  copts.threads = cfg.run.threads;
  run.cost = realized_cost(cfg.problem, run.ensemble, run.solution.coefficients, copts);
  return run;
}

/// Files written per run: <name>.json, _schedule, _mean, _paths, _moments,
/// _cost and _kpi CSVs.
inline std::vector<std::filesystem::path> write_run_bundle(const ExampleRun& run, const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  auto put = [&](const std::string& suffix, const std::string& content) {
    const auto path = dir / (run.name + suffix);
    write_file_atomic(path, content);
    written.push_back(path);
  };
  put(".json", dump_config(run.config));
  put("_schedule.csv", to_csv(schedule_table(run.solution)));
  put("_mean.csv", to_csv(mean_table(run.ensemble)));
  put("_paths.csv", to_csv(paths_table(run.ensemble, run.config.run.max_csv_paths)));
  put("_moments.csv", to_csv(moments_table(run.ensemble)));
  put("_cost.csv", to_csv(cost_table(run.cost)));
  put("_kpi.csv", to_csv(kpi_table(run.ensemble)));
  return written;
}

inline std::vector<ExampleRun> run_example(int id, std::size_t n_paths, std::uint64_t seed, unsigned threads = 0) {
  std::vector<ExampleRun> runs;
  for (auto& nc : example_configs(id)) {
    nc.config.run.n_paths = n_paths;
    nc.config.run.master_seed = seed;
    nc.config.run.threads = threads;
    runs.push_back(run_config(nc.name, nc.config));
  }
  return runs;
}

// ---------------------------------------------------------------------------
// Controller comparison on the mean-field example

enum class ComparisonCase { Sign = 1, Linear = 2, RiskAware = 3 };

struct KpiRow {
  std::uint64_t seed = 0;
  int case_id = 0;
  int zeta = 0;
  double kpi_x = 0.0;
  double kpi_u = 0.0;
};

struct KpiStudy {
  std::vector<KpiRow> rows;
  std::size_t n_seeds = 0;
  std::array<std::array<double, 3>, 3> mean_total{};  // [case-1][zeta-1]
  std::array<double, 3> case3_win_rate{};             // [zeta-1]

  [[nodiscard]] bool case3_lowest_mean(int zeta) const {
    const auto z = static_cast<std::size_t>(zeta - 1);
    return mean_total[2][z] < mean_total[0][z] && mean_total[2][z] < mean_total[1][z];
  }
};

/// Mean-field example with p = o = 3 and a single realized path starting at
/// x_0 = 20 while the law's mean is 20.01.
inline ProblemSpec comparison_spec() {
  ProblemSpec spec = example4_config(3).problem;
  spec.initial = InitialLaw{20.01, EmpiricalLaw{{20.0}}};
  return spec;
}

/// One path per seed (seeds first_seed .. first_seed + n_seeds - 1), with the
/// same noise draws for every case under a given seed.
inline KpiStudy kpi_study(std::size_t n_seeds, std::uint64_t first_seed, unsigned threads = 0) {
  const ProblemSpec spec = comparison_spec();
  const Solution sol = solve(example4_config(3).problem);
  const FeedbackPolicy risk_aware(sol.gains);
  const BaselinePolicy sign(BaselineKind::SignController, spec.n());
  const BaselinePolicy linear(BaselineKind::LinearFeedback, spec.n());
  SimulationOptions sim;
  sim.threads = threads;

  KpiStudy study;
  study.n_seeds = n_seeds;
  std::array<std::size_t, 3> wins{};
  for (std::size_t s = 0; s < n_seeds; ++s) {
    const std::uint64_t seed = first_seed + s;
    const std::array<TrajectoryEnsemble, 3> ens{simulate_ensemble(spec, sign, 1, seed, sim),
                                                simulate_ensemble(spec, linear, 1, seed, sim),
                                                simulate_ensemble(spec, risk_aware, 1, seed, sim)};
    for (int zeta = 1; zeta <= 3; ++zeta) {
      std::array<double, 3> total{};
      for (int c = 0; c < 3; ++c) {
        const Kpi v = kpi(ens[static_cast<std::size_t>(c)], zeta);
        study.rows.push_back({seed, c + 1, zeta, v.x, v.u});
        total[static_cast<std::size_t>(c)] = v.total();
        study.mean_total[static_cast<std::size_t>(c)][static_cast<std::size_t>(zeta - 1)] += v.total();
      }
      if (total[2] < total[0] && total[2] < total[1]) ++wins[static_cast<std::size_t>(zeta - 1)];
    }
  }
  const double inv = n_seeds ? 1.0 / static_cast<double>(n_seeds) : 0.0;
  for (auto& per_case : study.mean_total) {
    for (double& v : per_case) v *= inv;
  }
  for (std::size_t z = 0; z < 3; ++z) study.case3_win_rate[z] = static_cast<double>(wins[z]) * inv;
  return study;
}

inline CsvTable kpi_seed_table(const KpiStudy& study) {
  CsvTable t;
  t.header = {"seed", "case", "zeta", "kpi_x", "kpi_u", "total"};
  for (const auto& r : study.rows) {
    t.rows.push_back({static_cast<double>(r.seed), static_cast<double>(r.case_id), static_cast<double>(r.zeta),
                      r.kpi_x, r.kpi_u, r.kpi_x + r.kpi_u});
  }
  return t;
}

inline CsvTable kpi_aggregate_table(const KpiStudy& study) {
  CsvTable t;
  t.header = {"zeta", "case1_mean_total", "case2_mean_total", "case3_mean_total", "case3_win_rate"};
  for (std::size_t z = 0; z < 3; ++z) {
    t.rows.push_back({static_cast<double>(z + 1), study.mean_total[0][z], study.mean_total[1][z],
                      study.mean_total[2][z], study.case3_win_rate[z]});
  }
  return t;
}

}  // namespace hocs
