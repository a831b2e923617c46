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

// Seeded Monte-Carlo simulation of the closed loop, realized and predicted
// costs, and risk-aware KPIs.

#pragma once

#include <algorithm>
#include <atomic>
#include <limits>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <thread>
#include <vector>

#include "hocs/control.hpp"
#include "hocs/recursion.hpp"

namespace hocs {

// ---------------------------------------------------------------------------
// Random streams

/// Independent purposes get independent streams even under the same seed.
enum class StreamTag : std::uint32_t { Initial = 1, Noise = 2, Bootstrap = 3, Sampling = 4 };

/// Engine for (master_seed, tag, index). Depends only on these three values,
/// so path i sees the same numbers however the work is scheduled.
inline std::mt19937_64 make_stream(std::uint64_t master_seed, StreamTag tag, std::uint64_t index = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(tag), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

template <class Engine>
double sample_noise(const NoiseSpec& noise, Engine& eng) {
  if (noise.kind() == NoiseKind::None) return 0.0;
  return std::visit(
      [&](const auto& d) -> double {
        using D = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<D, GaussianNoise>) {
          if (d.sigma == 0.0) return 0.0;
          return std::normal_distribution<double>(0.0, d.sigma)(eng);
        } else if constexpr (std::is_same_v<D, RademacherNoise>) {
          return std::bernoulli_distribution(0.5)(eng) ? d.scale : -d.scale;
        } else if constexpr (std::is_same_v<D, UniformSymmetricNoise>) {
          return std::uniform_real_distribution<double>(-d.halfwidth, d.halfwidth)(eng);
        } else {
          const auto& samples = noise.empirical_samples();
          std::uniform_int_distribution<std::size_t> pick(0, samples.size() - 1);
          return samples[pick(eng)];
        }
      },
      noise.distribution());
}

template <class Engine>
double sample_initial(const InitialLaw& law, Engine& eng) {
  return std::visit(
      [&](const auto& l) -> double {
        using L = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<L, DiracLaw>) {
          return law.mean;
        } else if constexpr (std::is_same_v<L, GaussianLaw>) {
          if (l.variance == 0.0) return law.mean;
          return std::normal_distribution<double>(law.mean, std::sqrt(l.variance))(eng);
        } else {
          std::uniform_int_distribution<std::size_t> pick(0, l.samples.size() - 1);
          return l.samples[pick(eng)];
        }
      },
      law.law);
}

// ---------------------------------------------------------------------------
// Deterministic chunked parallelism

namespace detail {

inline constexpr std::size_t kChunk = 4096;

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

/// Runs fn(begin, end, chunk_index) over fixed-size chunks of [0, n). Chunk
/// boundaries do not depend on the thread count.
template <class Fn>
void for_each_chunk(std::size_t n, unsigned threads, Fn&& fn) {
  const std::size_t n_chunks = (n + kChunk - 1) / kChunk;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), n_chunks));
  auto run_chunk = [&](std::size_t c) { fn(c * kChunk, std::min(n, (c + 1) * kChunk), c); };
  if (workers <= 1) {
    for (std::size_t c = 0; c < n_chunks; ++c) run_chunk(c);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t c = next.fetch_add(1); c < n_chunks; c = next.fetch_add(1)) run_chunk(c);
    });
  }
}

/// Sum of f(i) over [0, n) with per-chunk partials reduced in chunk order.
template <class Fn>
double ordered_sum(std::size_t n, unsigned threads, Fn&& f) {
  std::vector<double> partial((n + kChunk - 1) / kChunk, 0.0);
  for_each_chunk(n, threads, [&](std::size_t b, std::size_t e, std::size_t c) {
    double acc = 0.0;
    for (std::size_t i = b; i < e; ++i) acc += f(i);
    partial[c] = acc;
  });
  double total = 0.0;
  for (double v : partial) total += v;
  return total;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Ensembles

enum class MeanMode {
  /// xbar, ubar from the deterministic mean recursion (the law's mean).
  Exact,
  /// xbar, ubar as ensemble averages at each step.
  Empirical,
};

struct SimulationOptions {
  MeanMode mean_mode = MeanMode::Exact;
  unsigned threads = 0;  // 0: hardware concurrency
  /// Even orders of the tabulated empirical central moments; 2 and the
  /// spec's 2o are always included.
  std::vector<int> moment_orders;
};

struct TrajectoryEnsemble {
  std::size_t n_paths = 0;
  std::size_t n_steps = 0;
  std::vector<double> states;    // n_paths x (n_steps + 1), row per path
  std::vector<double> controls;  // n_paths x n_steps
  Sequence mean_path;            // xbar_k, k = 0..N
  Sequence mean_control;         // ubar_k, k = 0..N-1
  std::map<int, Sequence> central_moments;  // order -> E_hat[(x_k - xbar_k)^order]
  std::uint64_t master_seed = 0;
  MeanMode mean_mode = MeanMode::Exact;

  [[nodiscard]] double x(std::size_t path, std::size_t k) const { return states[path * (n_steps + 1) + k]; }
  [[nodiscard]] double u(std::size_t path, std::size_t k) const { return controls[path * n_steps + k]; }
  [[nodiscard]] std::span<const double> path_states(std::size_t path) const {
    return {states.data() + path * (n_steps + 1), n_steps + 1};
  }

  friend bool operator==(const TrajectoryEnsemble&, const TrajectoryEnsemble&) = default;
};

struct MeanTrajectory {
  Sequence x_bar;  // N+1
  Sequence u_bar;  // N
};

/// xbar_{k+1} = a_bar_k xbar_k + b_bar_k ubar_k with ubar from the policy's mean channel.
template <Policy P>
MeanTrajectory propagate_mean_trajectory(const ProblemSpec& spec, const P& policy) {
  const std::size_t n = spec.n();
  MeanTrajectory out{Sequence(n + 1, 0.0), Sequence(n, 0.0)};
  out.x_bar[0] = spec.initial.mean;
  for (std::size_t k = 0; k < n; ++k) {
    out.u_bar[k] = policy.mean_control(k, out.x_bar[k]);
    out.x_bar[k + 1] = spec.mean_dyn.a_bar[k] * out.x_bar[k] + spec.mean_dyn.b_bar[k] * out.u_bar[k];
  }
  return out;
}

inline Sequence propagate_mean(const ProblemSpec& spec, const GainSchedule& gains) {
  if (gains.size() != spec.n()) throw Error(ErrorCode::InvalidPolicy, "gain schedule horizon mismatch");
  return propagate_mean_trajectory(spec, FeedbackPolicy(gains)).x_bar;
}

namespace detail {

inline double transition(ProblemClass cls, const ProblemSpec& spec, std::size_t k, double x, double x_bar,
                         double u, double u_bar, double eps) {
  const double a_bar = spec.mean_dyn.a_bar[k];
  const double b_bar = spec.mean_dyn.b_bar[k];
  switch (cls) {
    case ProblemClass::Deterministic: return a_bar * x + b_bar * u;
    case ProblemClass::Additive: return a_bar * x + b_bar * u + eps;
    case ProblemClass::MultState: return a_bar * x + b_bar * u + (x - x_bar) * eps;
    case ProblemClass::HigherMoment:
      return (a_bar * x_bar + b_bar * u_bar) +
             (spec.dev_dyn.a[k] * (x - x_bar) + spec.dev_dyn.b[k] * (u - u_bar)) * eps;
  }
  return 0.0;
}

inline std::vector<int> moment_orders_for(const ProblemSpec& spec, const SimulationOptions& opts) {
  std::vector<int> orders = opts.moment_orders;
  orders.push_back(2);
  orders.push_back(2 * spec.moment_half_power());
  std::sort(orders.begin(), orders.end());
  orders.erase(std::unique(orders.begin(), orders.end()), orders.end());
  return orders;
}

}  // namespace detail

/// Runs `n_paths` closed-loop trajectories. Path i draws x_0 from stream
/// (seed, Initial, i) and eps_1..eps_N from stream (seed, Noise, i).
template <Policy P>
TrajectoryEnsemble simulate_ensemble(const ProblemSpec& spec, const P& policy, std::size_t n_paths,
                                     std::uint64_t master_seed, const SimulationOptions& opts = {}) {
  const std::size_t n = spec.n();
  if (policy.horizon() != n) {
    throw Error(ErrorCode::InvalidPolicy, "policy horizon " + std::to_string(policy.horizon()) +
                                              " does not match N = " + std::to_string(n));
  }
  if (n_paths == 0) throw Error(ErrorCode::PreconditionViolated, "n_paths must be >= 1");

  TrajectoryEnsemble ens;
  ens.n_paths = n_paths;
  ens.n_steps = n;
  ens.master_seed = master_seed;
  ens.mean_mode = opts.mean_mode;
  ens.states.assign(n_paths * (n + 1), 0.0);
  ens.controls.assign(n_paths * n, 0.0);
  std::vector<double> noise(n_paths * n, 0.0);

  const bool has_noise = spec.noise.kind() != NoiseKind::None;
  detail::for_each_chunk(n_paths, opts.threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      auto init = make_stream(master_seed, StreamTag::Initial, i);
      ens.states[i * (n + 1)] = sample_initial(spec.initial, init);
      if (has_noise) {
        auto eng = make_stream(master_seed, StreamTag::Noise, i);
        for (std::size_t k = 0; k < n; ++k) noise[i * n + k] = sample_noise(spec.noise, eng);
      }
    }
  });

  const double inv_n = 1.0 / static_cast<double>(n_paths);
  ens.mean_path.assign(n + 1, 0.0);
  ens.mean_control.assign(n, 0.0);
  MeanTrajectory exact;
  if (opts.mean_mode == MeanMode::Exact) exact = propagate_mean_trajectory(spec, policy);

  for (std::size_t k = 0; k <= n; ++k) {
    double x_bar = 0.0;
    if (opts.mean_mode == MeanMode::Exact) {
      x_bar = exact.x_bar[k];
    } else {
      x_bar = detail::ordered_sum(n_paths, opts.threads, [&](std::size_t i) { return ens.x(i, k); }) * inv_n;
    }
    ens.mean_path[k] = x_bar;
    if (k == n) break;

    detail::for_each_chunk(n_paths, opts.threads, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) ens.controls[i * n + k] = policy.control(k, ens.x(i, k), x_bar);
    });
    double u_bar = 0.0;
    if (opts.mean_mode == MeanMode::Exact) {
      u_bar = exact.u_bar[k];
    } else {
      u_bar = detail::ordered_sum(n_paths, opts.threads, [&](std::size_t i) { return ens.u(i, k); }) * inv_n;
    }
    ens.mean_control[k] = u_bar;

    detail::for_each_chunk(n_paths, opts.threads, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) {
        ens.states[i * (n + 1) + k + 1] = detail::transition(spec.problem_class, spec, k, ens.x(i, k), x_bar,
                                                             ens.u(i, k), u_bar, noise[i * n + k]);
      }
    });
  }

  for (int order : detail::moment_orders_for(spec, opts)) {
    Sequence m(n + 1, 0.0);
    for (std::size_t k = 0; k <= n; ++k) {
      const double xb = ens.mean_path[k];
      m[k] = detail::ordered_sum(n_paths, opts.threads, [&](std::size_t i) { return ipow(ens.x(i, k) - xb, order); }) *
             inv_n;
    }
    ens.central_moments.emplace(order, std::move(m));
  }
  return ens;
}

// ---------------------------------------------------------------------------
// Costs

struct CostBreakdown {
  double state_power = 0.0;     // sum q_bar xbar^{2p}
  double control_power = 0.0;   // sum r_bar ubar^{2p}
  double state_moment = 0.0;    // sum q E_hat[(x - xbar)^{2o}]
  double control_moment = 0.0;  // sum r E_hat[(u - ubar)^{2o}]

  [[nodiscard]] double mean_channel() const { return state_power + control_power; }
  [[nodiscard]] double moment_channel() const { return state_moment + control_moment; }
  [[nodiscard]] double total() const { return mean_channel() + moment_channel(); }
};

struct CostReport {
  double realized_mean = 0.0;
  double realized_stderr = 0.0;
  double predicted = std::numeric_limits<double>::quiet_NaN();
  CostBreakdown breakdown;
};

struct CostOptions {
  int bootstrap_resamples = 200;
  unsigned threads = 0;
};

namespace detail {

inline double mean_channel_cost(const ProblemSpec& spec, std::span<const double> x_bar,
                                std::span<const double> u_bar, double* control_part = nullptr) {
  const auto& c = spec.cost;
  const int two_p = 2 * c.p;
  const std::size_t n = spec.n();
  double state = c.q_bar_terminal * ipow(x_bar[n], two_p);
  double control = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    state += c.q_bar[k] * ipow(x_bar[k], two_p);
    control += c.r_bar[k] * ipow(u_bar[k], two_p);
  }
  if (control_part) *control_part = control;
  return state;
}

/// Moment-channel cost of one path around the given means.
inline void path_moment_cost(const ProblemSpec& spec, const TrajectoryEnsemble& ens, std::size_t i,
                             std::span<const double> x_bar, std::span<const double> u_bar, double& state,
                             double& control) {
  const auto& c = spec.cost;
  const int two_o = 2 * spec.moment_half_power();
  const std::size_t n = spec.n();
  state = c.q_terminal * ipow(ens.x(i, n) - x_bar[n], two_o);
  control = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    state += c.q[k] * ipow(ens.x(i, k) - x_bar[k], two_o);
    control += c.r[k] * ipow(ens.u(i, k) - u_bar[k], two_o);
  }
}

}  // namespace detail

/// Per-path moment-channel costs around the ensemble's own means. Zero for
/// the Deterministic class, whose cost has no moment terms.
inline std::vector<double> per_path_moment_costs(const ProblemSpec& spec, const TrajectoryEnsemble& ens,
                                                 unsigned threads = 0) {
  std::vector<double> out(ens.n_paths, 0.0);
  if (!is_stochastic(spec.problem_class)) return out;
  detail::for_each_chunk(ens.n_paths, threads, [&](std::size_t b, std::size_t e, std::size_t) {
    for (std::size_t i = b; i < e; ++i) {
      double s = 0.0, c = 0.0;
      detail::path_moment_cost(spec, ens, i, ens.mean_path, ens.mean_control, s, c);
      out[i] = s + c;
    }
  });
  return out;
}

/// Monte-Carlo estimate of E[L] with a path-level bootstrap standard error.
/// In Empirical mode each resample recomputes its own means.
inline CostReport realized_cost(const ProblemSpec& spec, const TrajectoryEnsemble& ens,
                                const CostOptions& opts = {}) {
  if (ens.n_steps != spec.n()) throw Error(ErrorCode::InvalidPolicy, "ensemble horizon mismatch");
  const std::size_t n_paths = ens.n_paths;
  const double inv_n = 1.0 / static_cast<double>(n_paths);
  const bool stochastic = is_stochastic(spec.problem_class);

  CostReport report;
  auto& br = report.breakdown;
  br.state_power = detail::mean_channel_cost(spec, ens.mean_path, ens.mean_control, &br.control_power);
  if (stochastic) {
    std::vector<double> st(n_paths), ct(n_paths);
    detail::for_each_chunk(n_paths, opts.threads, [&](std::size_t b, std::size_t e, std::size_t) {
      for (std::size_t i = b; i < e; ++i) {
        detail::path_moment_cost(spec, ens, i, ens.mean_path, ens.mean_control, st[i], ct[i]);
      }
    });
    br.state_moment = detail::ordered_sum(n_paths, opts.threads, [&](std::size_t i) { return st[i]; }) * inv_n;
    br.control_moment = detail::ordered_sum(n_paths, opts.threads, [&](std::size_t i) { return ct[i]; }) * inv_n;
  }
  report.realized_mean = br.total();

  if (opts.bootstrap_resamples <= 1 || n_paths < 2 || !stochastic) return report;

  const std::size_t n = spec.n();
  auto boot = make_stream(ens.master_seed, StreamTag::Bootstrap);
  std::uniform_int_distribution<std::size_t> pick(0, n_paths - 1);
  std::vector<std::size_t> idx(n_paths);
  std::vector<double> per_path;
  if (ens.mean_mode == MeanMode::Exact) per_path = per_path_moment_costs(spec, ens, opts.threads);

  std::vector<double> estimates;
  estimates.reserve(static_cast<std::size_t>(opts.bootstrap_resamples));
  Sequence xb(n + 1), ub(n);
  for (int rep = 0; rep < opts.bootstrap_resamples; ++rep) {
    for (auto& i : idx) i = pick(boot);
    if (ens.mean_mode == MeanMode::Exact) {
      const double m = detail::ordered_sum(n_paths, opts.threads, [&](std::size_t j) { return per_path[idx[j]]; });
      // The mean channel is the same in every resample; leaving it out keeps
      // its rounding from swamping a small moment channel.
      estimates.push_back(m * inv_n);
      continue;
    }
    for (std::size_t k = 0; k <= n; ++k) {
      xb[k] = detail::ordered_sum(n_paths, opts.threads, [&](std::size_t j) { return ens.x(idx[j], k); }) * inv_n;
      if (k < n) {
        ub[k] = detail::ordered_sum(n_paths, opts.threads, [&](std::size_t j) { return ens.u(idx[j], k); }) * inv_n;
      }
    }
    double control_power = 0.0;
    const double state_power = detail::mean_channel_cost(spec, xb, ub, &control_power);
    const double m = detail::ordered_sum(n_paths, opts.threads, [&](std::size_t j) {
      double s = 0.0, c = 0.0;
      detail::path_moment_cost(spec, ens, idx[j], xb, ub, s, c);
      return s + c;
    });
    estimates.push_back(state_power + control_power + m * inv_n);
  }
  double mu = 0.0;
  for (double v : estimates) mu += v;
  mu /= static_cast<double>(estimates.size());
  double ss = 0.0;
  for (double v : estimates) ss += (v - mu) * (v - mu);
  report.realized_stderr = std::sqrt(ss / static_cast<double>(estimates.size() - 1));
  return report;
}

struct PredictedCost {
  double mean_channel = 0.0;    // alpha_bar_0 xbar_0^{2p}
  double moment_channel = 0.0;  // alpha_0 E[(x_0 - xbar_0)^{2o}] + gamma_bar_0
  [[nodiscard]] double total() const { return mean_channel + moment_channel; }
};

/// Optimal cost from the value-function coefficients at k = 0.
inline PredictedCost predicted_cost_parts(const CoefficientSchedule& schedule, const InitialLaw& initial) {
  if (schedule.alpha_bar.empty()) throw Error(ErrorCode::MissingMoment, "empty coefficient schedule");
  PredictedCost out;
  out.mean_channel = schedule.alpha_bar.front() * ipow(initial.mean, 2 * schedule.p);
  if (schedule.problem_class == ProblemClass::Deterministic) return out;
  if (!schedule.alpha || schedule.alpha->empty()) {
    throw Error(ErrorCode::MissingMoment, "stochastic schedule without alpha");
  }
  const int order = schedule.problem_class == ProblemClass::HigherMoment ? 2 * schedule.o : 2;
  out.moment_channel = schedule.alpha->front() * initial.central_moment(order);
  if (schedule.problem_class == ProblemClass::Additive) {
    if (!schedule.gamma_bar || schedule.gamma_bar->empty()) {
      throw Error(ErrorCode::MissingMoment, "additive schedule without gamma_bar");
    }
    out.moment_channel += schedule.gamma_bar->front();
  }
  return out;
}

inline double predicted_cost(const CoefficientSchedule& schedule, const InitialLaw& initial) {
  return predicted_cost_parts(schedule, initial).total();
}

inline CostReport realized_cost(const ProblemSpec& spec, const TrajectoryEnsemble& ens,
                                const CoefficientSchedule& schedule, const CostOptions& opts = {}) {
  CostReport r = realized_cost(spec, ens, opts);
  r.predicted = predicted_cost(schedule, spec.initial);
  return r;
}

// ---------------------------------------------------------------------------
// KPIs

struct Kpi {
  double x = 0.0;  // sum_{k=0}^{N} (x_k - xbar_k)^{2 zeta} + xbar_k^{2 zeta}
  double u = 0.0;  // sum_{k=0}^{N-1} (u_k - ubar_k)^{2 zeta} + ubar_k^{2 zeta}
  [[nodiscard]] double total() const { return x + u; }
};

inline Kpi kpi_path(const TrajectoryEnsemble& ens, std::size_t path, int zeta) {
  if (zeta < 1) throw Error(ErrorCode::PreconditionViolated, "zeta must be >= 1");
  const int e = 2 * zeta;
  Kpi out;
  for (std::size_t k = 0; k <= ens.n_steps; ++k) {
    out.x += ipow(ens.x(path, k) - ens.mean_path[k], e) + ipow(ens.mean_path[k], e);
  }
  for (std::size_t k = 0; k < ens.n_steps; ++k) {
    out.u += ipow(ens.u(path, k) - ens.mean_control[k], e) + ipow(ens.mean_control[k], e);
  }
  return out;
}

/// Path-averaged KPI; for a single-path ensemble this is that path's KPI.
inline Kpi kpi(const TrajectoryEnsemble& ens, int zeta) {
  Kpi acc;
  for (std::size_t i = 0; i < ens.n_paths; ++i) {
    const Kpi k = kpi_path(ens, i, zeta);
    acc.x += k.x;
    acc.u += k.u;
  }
  const double inv = 1.0 / static_cast<double>(ens.n_paths);
  return {acc.x * inv, acc.u * inv};
}

}  // namespace hocs
