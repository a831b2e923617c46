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

// hocs: command-line front end.
//
//   hocs validate --config FILE
//   hocs solve    --config FILE [--out FILE]
//   hocs simulate --config FILE --out DIR [--paths N] [--seed S]
//   hocs verify   --config FILE [--tol T] [--paths N] [--seed S]
//   hocs example  --id {1,2,3,4} --out DIR [--paths N] [--seed S]
//   hocs kpi      --seeds N --out DIR [--seed S]
//
// Exit codes: 0 ok, 1 validation failure, 2 recursion or verification
// failure, 3 config or I/O error. HOCS_SEED overrides --seed.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hocs/hocs.hpp"

namespace {

using namespace hocs;

constexpr int kOk = 0;
constexpr int kValidation = 1;
constexpr int kVerification = 2;
constexpr int kConfigIo = 3;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidSpec:
    case ErrorCode::LengthMismatch:
    case ErrorCode::PreconditionViolated:
      return kValidation;
    case ErrorCode::DenominatorNotPositive:
    case ErrorCode::NonPositiveCoefficient:
    case ErrorCode::MissingMoment:
    case ErrorCode::NotConverged:
    case ErrorCode::IndexOutOfRange:
    case ErrorCode::InvalidPolicy:
      return kVerification;
    case ErrorCode::Config:
    case ErrorCode::Io:
      return kConfigIo;
  }
  return kConfigIo;
}

struct Args {
  std::string config;
  std::string out;
  std::size_t paths = 100000;
  std::uint64_t seed = 42;
  double tol = 1e-6;
  int id = 1;
  std::size_t seeds = 100;
  unsigned threads = 0;
  bool paths_given = false;
  bool seed_given = false;
};

std::uint64_t effective_seed(const Args& a, std::uint64_t fallback) {
  if (const char* env = std::getenv("HOCS_SEED"); env && *env) {
    try {
      return std::stoull(env);
    } catch (const std::exception&) {
      throw Error(ErrorCode::Config, std::string("HOCS_SEED is not an integer: ") + env);
    }
  }
  return a.seed_given ? a.seed : fallback;
}

RunConfig load_with_overrides(const Args& a) {
  RunConfig cfg = load_config(a.config);
  if (a.paths_given) cfg.run.n_paths = a.paths;
  cfg.run.master_seed = effective_seed(a, cfg.run.master_seed);
  if (a.threads) cfg.run.threads = a.threads;
  return cfg;
}

void print_report(const ValidationReport& report) {
  for (const auto& c : report.checks) {
    std::printf("%-40s %-22s %s\n", c.name.c_str(), to_string(c.status), c.detail.c_str());
  }
  if (report.noise_centered) std::printf("note: empirical noise samples were mean-centered\n");
}

int cmd_validate(const Args& a) {
  const RunConfig cfg = load_config(a.config);
  ValidationOptions vopts;
  vopts.allow_zero_weights = cfg.run.allow_zero_weights;
  vopts.allow_uncontrollable_steps = cfg.run.allow_uncontrollable_steps;
  const ValidationReport report = validate(cfg.problem, vopts);
  print_report(report);
  return report.ok() ? kOk : kValidation;
}

int cmd_solve(const Args& a) {
  const RunConfig cfg = load_config(a.config);
  const Solution sol = solve(cfg.problem, cfg.run.solve_options());
  const std::string csv = to_csv(schedule_table(sol));
  if (a.out.empty()) {
    std::fputs(csv.c_str(), stdout);
  } else {
    write_file_atomic(a.out, csv);
  }
  std::fprintf(a.out.empty() ? stderr : stdout, "predicted cost: %s\n",
               format_number(predicted_cost(sol.coefficients, cfg.problem.initial)).c_str());
  return kOk;
}

void print_cost(const CostReport& r) {
  std::printf("realized cost:  %s (bootstrap stderr %s)\n", format_number(r.realized_mean).c_str(),
              format_number(r.realized_stderr).c_str());
  std::printf("predicted cost: %s\n", format_number(r.predicted).c_str());
}

int cmd_simulate(const Args& a) {
  const RunConfig cfg = load_with_overrides(a);
  const std::string name = std::filesystem::path(a.config).stem().string();
  const ExampleRun run = run_config(name, cfg);
  const auto files = write_run_bundle(run, a.out.empty() ? cfg.run.output_dir : a.out);
  print_cost(run.cost);
  for (const auto& f : files) std::printf("wrote %s\n", f.string().c_str());
  return kOk;
}

int cmd_verify(const Args& a) {
  const RunConfig cfg = load_with_overrides(a);
  const SolveOptions sopts = cfg.run.solve_options();
  const Solution sol = solve(cfg.problem, sopts);
  bool ok = true;
  if (cfg.problem.problem_class == ProblemClass::Deterministic) {
    OracleOptions oopts;
    oopts.tol = cfg.run.oracle_tol;
    oopts.max_iter = cfg.run.oracle_max_iter;
    const OracleReport r = brute_force_deterministic(cfg.problem, cfg.problem.initial.mean, oopts, sopts);
    std::printf("closed-form cost %s\noracle cost      %s\nrelative gap     %s\nmax |du|         %s\niterations       %d\n",
                format_number(r.closed_form_cost).c_str(), format_number(r.oracle_cost).c_str(),
                format_number(r.relative_gap).c_str(), format_number(r.control_max_abs_diff).c_str(), r.iterations);
    ok = r.converged && !r.discrepant && r.relative_gap < a.tol;
  } else {
    McOptions mopts;
    mopts.sim.mean_mode = cfg.run.mean_mode;
    mopts.sim.threads = cfg.run.threads;
    mopts.cost.threads = cfg.run.threads;
    const OracleReport r = mc_validate(cfg.problem, sol, cfg.run.n_paths, cfg.run.master_seed, mopts);
    std::printf("predicted cost     %s\nrealized cost      %s\nbootstrap stderr   %s\nmean-channel gap   %s\n"
                "moment-channel gap %s\nz                  %s\n",
                format_number(r.closed_form_cost).c_str(), format_number(r.oracle_cost).c_str(),
                format_number(r.stderr_).c_str(), format_number(r.mean_channel_gap).c_str(),
                format_number(r.moment_channel_gap).c_str(), format_number(r.z_score).c_str());
    ok = r.converged && !r.discrepant;
  }
  std::printf("%s\n", ok ? "OK" : "DISCREPANT");
  return ok ? kOk : kVerification;
}

int cmd_example(const Args& a) {
  const std::filesystem::path dir = a.out.empty() ? "out" : a.out;
  const auto runs = run_example(a.id, a.paths, effective_seed(a, 42), a.threads);
  for (const auto& run : runs) {
    for (const auto& f : write_run_bundle(run, dir)) std::printf("wrote %s\n", f.string().c_str());
  }
  return kOk;
}

int cmd_kpi(const Args& a) {
  const std::filesystem::path dir = a.out.empty() ? "out" : a.out;
  const KpiStudy study = kpi_study(a.seeds, effective_seed(a, 42), a.threads);
  write_file_atomic(dir / "kpi_per_seed.csv", to_csv(kpi_seed_table(study)));
  write_file_atomic(dir / "kpi_aggregate.csv", to_csv(kpi_aggregate_table(study)));
  std::printf("zeta  case1_mean       case2_mean       case3_mean       case3_win_rate\n");
  for (int z = 1; z <= 3; ++z) {
    const auto i = static_cast<std::size_t>(z - 1);
    std::printf("%-5d %-16.6g %-16.6g %-16.6g %.2f\n", z, study.mean_total[0][i], study.mean_total[1][i],
                study.mean_total[2][i], study.case3_win_rate[i]);
  }
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Higher-order and moment-aware discrete-time control: solve, simulate, verify"};
  app.require_subcommand(1);
  Args args;

  auto add_config = [&](CLI::App* sub) { sub->add_option("--config", args.config, "Config file (JSON)")->required(); };
  auto add_mc = [&](CLI::App* sub) {
    sub->add_option("--paths", args.paths, "Monte-Carlo paths")->each([&](const std::string&) { args.paths_given = true; });
    sub->add_option("--seed", args.seed, "Master seed")->each([&](const std::string&) { args.seed_given = true; });
    sub->add_option("--threads", args.threads, "Worker threads (0: all cores)");
  };

  auto* validate_cmd = app.add_subcommand("validate", "Static validity checks");
  add_config(validate_cmd);

  auto* solve_cmd = app.add_subcommand("solve", "Coefficient and gain schedules as CSV");
  add_config(solve_cmd);
  solve_cmd->add_option("--out", args.out, "Output CSV (stdout if omitted)");

  auto* simulate_cmd = app.add_subcommand("simulate", "Monte-Carlo closed loop");
  add_config(simulate_cmd);
  simulate_cmd->add_option("--out", args.out, "Output directory");
  add_mc(simulate_cmd);

  auto* verify_cmd = app.add_subcommand("verify", "Run the oracle for the config's class");
  add_config(verify_cmd);
  verify_cmd->add_option("--tol", args.tol, "Relative tolerance for the deterministic oracle");
  add_mc(verify_cmd);

  auto* example_cmd = app.add_subcommand("example", "Built-in example bundle");
  example_cmd->add_option("--id", args.id, "Example id")->required()->check(CLI::Range(1, 4));
  example_cmd->add_option("--out", args.out, "Output directory");
  add_mc(example_cmd);

  auto* kpi_cmd = app.add_subcommand("kpi", "Controller comparison over many seeds");
  kpi_cmd->add_option("--seeds", args.seeds, "Number of seeds")->check(CLI::PositiveNumber);
  kpi_cmd->add_option("--out", args.out, "Output directory");
  kpi_cmd->add_option("--seed", args.seed, "First seed")->each([&](const std::string&) { args.seed_given = true; });
  kpi_cmd->add_option("--threads", args.threads, "Worker threads (0: all cores)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kConfigIo;
  }

  try {
    if (*validate_cmd) return cmd_validate(args);
    if (*solve_cmd) return cmd_solve(args);
    if (*simulate_cmd) return cmd_simulate(args);
    if (*verify_cmd) return cmd_verify(args);
    if (*example_cmd) return cmd_example(args);
    if (*kpi_cmd) return cmd_kpi(args);
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return exit_code_for(e.code());
  } catch (const std::filesystem::filesystem_error& e) {
    std::fprintf(stderr, "error [Io]: %s\n", e.what());
    return kConfigIo;
  }
  return kConfigIo;
}
