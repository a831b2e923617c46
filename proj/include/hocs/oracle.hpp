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

// Independent checks of the closed forms: direct minimization over the
// control sequence, Monte-Carlo cost agreement, gain-perturbation probes and
// the strict-convexity property the solution method relies on.

#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "hocs/control.hpp"
#include "hocs/recursion.hpp"
#include "hocs/simulate.hpp"

namespace hocs {

struct OracleReport {
  double closed_form_cost = 0.0;
  double oracle_cost = 0.0;
  double relative_gap = 0.0;  // |closed - oracle| / max(|oracle|, 1e-30)
  double control_max_abs_diff = 0.0;
  int iterations = 0;
  bool converged = false;
  /// The oracle disagrees with the closed form beyond tolerance (in the
  /// deterministic case: it found a strictly cheaper control sequence).
  bool discrepant = false;

  // Diagnostics
  double gradient_norm = 0.0;
  double stderr_ = 0.0;
  double z_score = 0.0;
  double mean_channel_gap = 0.0;
  double moment_channel_gap = 0.0;
  std::vector<double> oracle_controls;
};

inline double relative_gap(double closed_form, double oracle) {
  return std::fabs(closed_form - oracle) / std::max(std::fabs(oracle), 1e-30);
}

// ---------------------------------------------------------------------------
// Direct minimization of the deterministic cost

enum class OracleMethod {
  /// Damped Newton with exact Hessian and Armijo backtracking.
  Newton,
  /// Steepest descent with Armijo backtracking.
  GradientDescent,
};

struct OracleOptions {
  int max_iter = 10000;
  /// Stop when the gradient sup-norm falls below tol, or at stagnation below
  /// tol * max(1, L).
  double tol = 1e-10;
  OracleMethod method = OracleMethod::Newton;
  double armijo = 1e-4;
  double shrink = 0.5;
};

/// L(u) = q_bar_N x_N^{2p} + sum_k q_bar_k x_k^{2p} + r_bar_k u_k^{2p}
/// along x_{k+1} = a_bar_k x_k + b_bar_k u_k.
class DeterministicObjective {
 public:
  DeterministicObjective(const ProblemSpec& spec, double x0) : spec_(spec), x0_(x0) {}

  [[nodiscard]] std::size_t dim() const { return spec_.n(); }

  [[nodiscard]] std::vector<double> states(const std::vector<double>& u) const {
    const std::size_t n = dim();
    std::vector<double> x(n + 1);
    x[0] = x0_;
    for (std::size_t k = 0; k < n; ++k) x[k + 1] = spec_.mean_dyn.a_bar[k] * x[k] + spec_.mean_dyn.b_bar[k] * u[k];
    return x;
  }

  [[nodiscard]] double value(const std::vector<double>& u) const {
    const auto& c = spec_.cost;
    const int e = 2 * c.p;
    const auto x = states(u);
    const std::size_t n = dim();
    double v = c.q_bar_terminal * ipow(x[n], e);
    for (std::size_t k = 0; k < n; ++k) v += c.q_bar[k] * ipow(x[k], e) + c.r_bar[k] * ipow(u[k], e);
    return v;
  }

  /// Gradient by the adjoint recursion lambda_k = dL/dx_k.
  [[nodiscard]] std::vector<double> gradient(const std::vector<double>& u) const {
    const auto& c = spec_.cost;
    const int e = 2 * c.p;
    const auto x = states(u);
    const std::size_t n = dim();
    std::vector<double> g(n);
    double lambda = e * c.q_bar_terminal * ipow(x[n], e - 1);
    for (std::size_t k = n; k-- > 0;) {
      g[k] = e * c.r_bar[k] * ipow(u[k], e - 1) + spec_.mean_dyn.b_bar[k] * lambda;
      lambda = e * c.q_bar[k] * ipow(x[k], e - 1) + spec_.mean_dyn.a_bar[k] * lambda;
    }
    return g;
  }

  [[nodiscard]] Eigen::MatrixXd hessian(const std::vector<double>& u) const {
    const auto& c = spec_.cost;
    const int e = 2 * c.p;
    const auto x = states(u);
    const std::size_t n = dim();
    // S(j, k) = dx_j / du_k = b_k prod_{i=k+1}^{j-1} a_i for j > k.
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n + 1), static_cast<Eigen::Index>(n));
    for (std::size_t k = 0; k < n; ++k) {
      double s = spec_.mean_dyn.b_bar[k];
      for (std::size_t j = k + 1; j <= n; ++j) {
        S(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = s;
        if (j < n) s *= spec_.mean_dyn.a_bar[j];
      }
    }
    Eigen::MatrixXd H = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    const double curv = static_cast<double>(e) * (e - 1);
    for (std::size_t j = 1; j <= n; ++j) {
      const double w = curv * (j == n ? c.q_bar_terminal : c.q_bar[j]) * ipow(x[j], e - 2);
      const auto row = S.row(static_cast<Eigen::Index>(j));
      H.noalias() += w * row.transpose() * row;
    }
    for (std::size_t k = 0; k < n; ++k) {
      H(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k)) += curv * c.r_bar[k] * ipow(u[k], e - 2);
    }
    return H;
  }

 private:
  const ProblemSpec& spec_;
  double x0_;
};

/// Minimizes the deterministic cost over the open-loop control sequence from
/// the zero sequence and compares with the closed-form feedback solution.
/// The cost is strictly convex in the controls, so the stationary point found
/// is the global minimum.
inline OracleReport brute_force_deterministic(const ProblemSpec& spec, double x_bar0,
                                              const OracleOptions& opts = {},
                                              const SolveOptions& solve_opts = {}) {
  if (spec.problem_class != ProblemClass::Deterministic) {
    throw Error(ErrorCode::PreconditionViolated, "brute-force oracle needs the Deterministic class");
  }
  if (!(opts.tol > 0.0)) throw Error(ErrorCode::PreconditionViolated, "oracle tol must be > 0");

  ProblemSpec local = spec;
  local.initial = InitialLaw::dirac(x_bar0);
  const Solution sol = solve_deterministic(local, solve_opts);
  const Sequence x_closed = propagate_mean(local, sol.gains);

  const DeterministicObjective obj(local, x_bar0);
  const std::size_t n = obj.dim();
  std::vector<double> u(n, 0.0), trial(n);
  double f = obj.value(u);

  OracleReport rep;
  auto sup_norm = [](const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::fabs(x));
    return m;
  };
  std::vector<double> g = obj.gradient(u);
  // Newton direction and decrement g' H^{-1} g; the decrement is scale-free
  // and keeps measuring progress after the cost stops resolving it.
  auto newton_direction = [&](const std::vector<double>& at, const std::vector<double>& grad,
                              std::vector<double>& d, double& decrement) {
    const Eigen::MatrixXd H = obj.hessian(at);
    const Eigen::Map<const Eigen::VectorXd> gv(grad.data(), static_cast<Eigen::Index>(n));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return false;
    const Eigen::VectorXd step = ldlt.solve(-gv);
    if (!step.allFinite() || !(step.dot(gv) < 0.0)) return false;
    for (std::size_t i = 0; i < n; ++i) d[i] = step(static_cast<Eigen::Index>(i));
    decrement = -step.dot(gv);
    return true;
  };
  int it = 0;
  double last_decrement = std::numeric_limits<double>::infinity();
  std::vector<double> d(n), d_trial(n);
  for (; it < opts.max_iter && sup_norm(g) > 0.0; ++it) {
    double decrement = 0.0;
    const bool newton = opts.method == OracleMethod::Newton && newton_direction(u, g, d, decrement);
    last_decrement = newton ? decrement : std::numeric_limits<double>::infinity();
    if (!newton) {
      if (sup_norm(g) < opts.tol) break;
      for (std::size_t i = 0; i < n; ++i) d[i] = -g[i];
    }
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) slope += g[i] * d[i];
    double t = newton ? 1.0 : 1.0 / std::max(1.0, sup_norm(g));
    double f_trial = 0.0;
    bool accepted = false;
    for (int ls = 0; ls < 200; ++ls) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + t * d[i];
      f_trial = obj.value(trial);
      if (f_trial <= f + opts.armijo * t * slope) {
        accepted = true;
        break;
      }
      t *= opts.shrink;
    }
    if (accepted && f_trial < f) {
      u = trial;
      f = f_trial;
      g = obj.gradient(u);
      continue;
    }
    // The cost no longer resolves the decrease. Near the minimum a full
    // Newton step still shrinks the decrement; stop once it does not.
    if (!newton) break;
    for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + d[i];
    std::vector<double> g_trial = obj.gradient(trial);
    double decrement_trial = 0.0;
    const bool has_next = newton_direction(trial, g_trial, d_trial, decrement_trial);
    const bool progress = has_next ? decrement_trial < 0.5 * decrement : sup_norm(g_trial) < sup_norm(g);
    if (!progress) break;
    u = trial;
    f = obj.value(u);
    g = std::move(g_trial);
    last_decrement = has_next ? decrement_trial : 0.0;
  }
  rep.iterations = it;
  rep.gradient_norm = sup_norm(g);
  // An absolute gradient of `tol` can sit below rounding. At stagnation the
  // point is accepted if the gradient is small relative to the cost, or if
  // the Newton decrement (about twice f - f_min for a convex cost) is below
  // tol^2 relative to the cost.
  const double scale = std::max(1.0, std::fabs(f));
  rep.converged = rep.gradient_norm < opts.tol ||
                  (it < opts.max_iter &&
                   (rep.gradient_norm < opts.tol * scale || last_decrement <= opts.tol * opts.tol * scale));
  if (!rep.converged) {
    char buf[160];
    std::snprintf(buf, sizeof buf, "oracle gradient sup-norm %.3g (cost %.6g) after %d iterations", rep.gradient_norm,
                  f, it);
    throw Error(ErrorCode::NotConverged, buf);
  }

  rep.oracle_cost = f;
  rep.oracle_controls = u;
  rep.closed_form_cost = predicted_cost(sol.coefficients, local.initial);
  rep.relative_gap = relative_gap(rep.closed_form_cost, rep.oracle_cost);
  for (std::size_t k = 0; k < n; ++k) {
    const double u_closed = -sol.gains.k_mean[k] * x_closed[k];
    rep.control_max_abs_diff = std::max(rep.control_max_abs_diff, std::fabs(u_closed - u[k]));
  }
  rep.discrepant = rep.oracle_cost < rep.closed_form_cost - 1e-8 * std::max(1.0, std::fabs(rep.closed_form_cost));
  return rep;
}

// ---------------------------------------------------------------------------
// Monte-Carlo agreement for the stochastic classes

struct McOptions {
  /// Allowed |realized - predicted| on the moment channel in bootstrap stderrs.
  double z_threshold = 3.0;
  /// Relative tolerance on the noise-free mean channel.
  double mean_channel_rtol = 1e-10;
  /// Moment-channel tolerance used when the bootstrap stderr is zero.
  double degenerate_rtol = 1e-10;
  CostOptions cost;
  SimulationOptions sim;
};

/// Simulates the closed-form policy and compares the realized cost with the
/// value-function prediction. The mean channel is noise-free, so it is held to
/// a rounding tolerance; the moment channel is held to the Monte-Carlo error.
inline OracleReport mc_validate(const ProblemSpec& spec, const Solution& sol, std::size_t n_paths,
                                std::uint64_t master_seed, const McOptions& opts = {}) {
  if (!is_stochastic(spec.problem_class)) {
    throw Error(ErrorCode::PreconditionViolated, "mc_validate needs a stochastic class");
  }
  SimulationOptions sim = opts.sim;
  const auto ens = simulate_ensemble(spec, FeedbackPolicy(sol.gains), n_paths, master_seed, sim);
  const CostReport cost = realized_cost(spec, ens, opts.cost);
  const PredictedCost pred = predicted_cost_parts(sol.coefficients, spec.initial);

  OracleReport rep;
  rep.closed_form_cost = pred.total();
  rep.oracle_cost = cost.realized_mean;
  rep.relative_gap = relative_gap(rep.closed_form_cost, rep.oracle_cost);
  rep.stderr_ = cost.realized_stderr;
  rep.iterations = 1;

  bool ok = false;
  if (sim.mean_mode == MeanMode::Exact) {
    rep.mean_channel_gap = cost.breakdown.mean_channel() - pred.mean_channel;
    rep.moment_channel_gap = cost.breakdown.moment_channel() - pred.moment_channel;
    const bool mean_ok = std::fabs(rep.mean_channel_gap) <=
                         opts.mean_channel_rtol * std::max(std::fabs(pred.mean_channel), 1e-300);
    bool moment_ok = false;
    if (cost.realized_stderr > 0.0) {
      rep.z_score = rep.moment_channel_gap / cost.realized_stderr;
      moment_ok = std::fabs(rep.z_score) <= opts.z_threshold;
    } else {
      moment_ok = std::fabs(rep.moment_channel_gap) <=
                  opts.degenerate_rtol * std::max(std::fabs(pred.moment_channel), 1e-300);
    }
    ok = mean_ok && moment_ok;
  } else {
    const double gap = rep.oracle_cost - rep.closed_form_cost;
    rep.z_score = cost.realized_stderr > 0.0 ? gap / cost.realized_stderr : 0.0;
    ok = cost.realized_stderr > 0.0 ? std::fabs(rep.z_score) <= opts.z_threshold
                                    : rep.relative_gap <= opts.degenerate_rtol;
  }
  rep.converged = ok;
  rep.discrepant = !ok;
  return rep;
}

// ---------------------------------------------------------------------------
// Gain-perturbation probe

struct ProbePoint {
  double factor = 1.0;
  double cost = 0.0;
  double diff_vs_nominal = 0.0;  // cost(factor) - cost(1), paired
  double diff_stderr = 0.0;
};

struct ProbeCurve {
  GainChannel channel = GainChannel::Mean;
  std::vector<ProbePoint> points;
  double argmin_factor = 1.0;
  bool minimal_at_nominal = true;
};

struct ProbeReport {
  std::vector<ProbeCurve> curves;
  [[nodiscard]] bool passed() const {
    return std::all_of(curves.begin(), curves.end(), [](const ProbeCurve& c) { return c.minimal_at_nominal; });
  }
};

/// Scales one gain channel at a time by each factor in `grid` and re-simulates
/// with common random numbers. The nominal gains must not be beaten beyond
/// `z_threshold` paired standard errors (rounding only, when noise-free).
inline ProbeReport local_optimality_probe(const ProblemSpec& spec, const GainSchedule& gains,
                                          const std::vector<double>& grid, std::size_t n_paths,
                                          std::uint64_t master_seed, double z_threshold = 3.0,
                                          const SimulationOptions& sim = {}) {
  if (std::find(grid.begin(), grid.end(), 1.0) == grid.end()) {
    throw Error(ErrorCode::PreconditionViolated, "probe grid must contain 1.0");
  }
  SimulationOptions exact = sim;
  exact.mean_mode = MeanMode::Exact;

  struct Eval {
    double mean_channel;
    std::vector<double> per_path;
    double moment_mean;
  };
  auto evaluate = [&](const GainSchedule& g) {
    const auto ens = simulate_ensemble(spec, FeedbackPolicy(g), n_paths, master_seed, exact);
    Eval e;
    double control_power = 0.0;
    e.mean_channel = detail::mean_channel_cost(spec, ens.mean_path, ens.mean_control, &control_power) + control_power;
    e.per_path = per_path_moment_costs(spec, ens, exact.threads);
    double s = 0.0;
    for (double v : e.per_path) s += v;
    e.moment_mean = s / static_cast<double>(n_paths);
    return e;
  };
  const Eval nominal = evaluate(gains);
  const double nominal_cost = nominal.mean_channel + nominal.moment_mean;

  ProbeReport report;
  std::vector<GainChannel> channels{GainChannel::Mean};
  if (gains.k_dev) channels.push_back(GainChannel::Deviation);
  for (GainChannel ch : channels) {
    ProbeCurve curve;
    curve.channel = ch;
    double best = nominal_cost;
    for (double factor : grid) {
      ProbePoint pt;
      pt.factor = factor;
      if (factor == 1.0) {
        pt.cost = nominal_cost;
      } else {
        const Eval e = evaluate(scale_gains(gains, ch, factor));
        pt.cost = e.mean_channel + e.moment_mean;
        double sum = 0.0, sum_sq = 0.0;
        for (std::size_t i = 0; i < n_paths; ++i) {
          const double d = e.per_path[i] - nominal.per_path[i];
          sum += d;
          sum_sq += d * d;
        }
        const double nd = static_cast<double>(n_paths);
        const double mean_d = sum / nd;
        pt.diff_vs_nominal = (e.mean_channel - nominal.mean_channel) + mean_d;
        pt.diff_stderr = n_paths > 1 ? std::sqrt(std::max(0.0, (sum_sq - nd * mean_d * mean_d) / (nd - 1)) / nd) : 0.0;
        const double slack = z_threshold * pt.diff_stderr + 1e-12 * std::max(1.0, std::fabs(nominal_cost));
        if (pt.diff_vs_nominal < -slack) curve.minimal_at_nominal = false;
      }
      if (pt.cost < best) {
        best = pt.cost;
        curve.argmin_factor = factor;
      }
      curve.points.push_back(pt);
    }
    report.curves.push_back(std::move(curve));
  }
  return report;
}

// ---------------------------------------------------------------------------
// Strict convexity of z -> z^{2p} + (a z + b)^{2p}

struct ConvexityCounterexample {
  double z1 = 0.0, z2 = 0.0;
  double midpoint_value = 0.0;
  double chord_value = 0.0;
};

struct ConvexityResult {
  bool passed = true;
  std::size_t samples_checked = 0;
  std::optional<ConvexityCounterexample> counterexample;
};

/// Samples pairs z1 != z2 in [-10, 10] and checks the strict midpoint
/// inequality f((z1+z2)/2) < (f(z1)+f(z2))/2 with a relative margin of 1e-12.
/// Pairs closer than 1e-3 are redrawn: below that the true convexity gap can
/// sink under the margin itself.
inline ConvexityResult convexity_check(int p, double a, double b, std::size_t n_samples, std::uint64_t master_seed) {
  if (p < 1 || a == 0.0 || b == 0.0) {
    throw Error(ErrorCode::PreconditionViolated, "convexity check needs p >= 1, a != 0, b != 0");
  }
  const int e = 2 * p;
  auto f = [&](double z) { return ipow(z, e) + ipow(a * z + b, e); };
  auto eng = make_stream(master_seed, StreamTag::Sampling);
  std::uniform_real_distribution<double> dist(-10.0, 10.0);
  ConvexityResult res;
  while (res.samples_checked < n_samples) {
    const double z1 = dist(eng);
    const double z2 = dist(eng);
    if (std::fabs(z1 - z2) < 1e-3) continue;
    const double f1 = f(z1), f2 = f(z2);
    const double mid = f(0.5 * (z1 + z2));
    const double chord = 0.5 * (f1 + f2);
    ++res.samples_checked;
    if (!(chord - mid > 1e-12 * std::max(std::fabs(f1), std::fabs(f2)))) {
      res.passed = false;
      res.counterexample = ConvexityCounterexample{z1, z2, mid, chord};
      break;
    }
  }
  return res;
}

}  // namespace hocs
