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

// Backward coefficient recursions and feedback gains.
//
// Value-function ansatz at step k:
//   f_k = alpha_k * E[(x_k - xbar_k)^{2o}] + alpha_bar_k * xbar_k^{2p} + gamma_bar_k
// Mean channel (power 2p) for every class:
//   c_k      = root_{2p-1}(alpha_bar_{k+1} b_bar_k / r_bar_k)
//   K_mean_k = c_k a_bar_k / (1 + c_k b_bar_k)
//   alpha_bar_k = q_bar_k + r_bar_k K^{2p} + alpha_bar_{k+1} (a_bar_k - b_bar_k K)^{2p}
// The deviation channel depends on the class; see the individual solvers.

#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "hocs/model.hpp"
#include "hocs/validate.hpp"

namespace hocs {

struct CoefficientSchedule {
  ProblemClass problem_class = ProblemClass::Deterministic;
  int p = 1;
  int o = 1;
  Sequence alpha_bar;                  // k = 0..N
  std::optional<Sequence> alpha;       // absent for Deterministic
  std::optional<Sequence> gamma_bar;   // Additive only

  friend bool operator==(const CoefficientSchedule&, const CoefficientSchedule&) = default;
};

/// u_k = -K_mean_k xbar_k - K_dev_k (x_k - xbar_k).
struct GainSchedule {
  Sequence k_mean;                // k = 0..N-1
  std::optional<Sequence> k_dev;  // absent for Deterministic

  [[nodiscard]] std::size_t size() const noexcept { return k_mean.size(); }
  friend bool operator==(const GainSchedule&, const GainSchedule&) = default;
};

struct Solution {
  CoefficientSchedule coefficients;
  GainSchedule gains;
};

struct SolveOptions {
  ValidationOptions validation;
  /// Drop the noise moment from the alpha_{k+1} (a - bK)^{2o} term of the
  /// higher-moment recursion while keeping it in the gain. This reproduces the
  /// recursion as commonly printed; it is not stationary for the true cost and
  /// exists only for comparison.
  bool literal_moment_recursion = false;
};

namespace detail {

inline void require_valid(const ProblemSpec& spec, const SolveOptions& opts, ProblemClass expected) {
  if (spec.problem_class != expected) {
    throw Error(ErrorCode::InvalidSpec, std::string("solver for ") + to_string(expected) +
                                            " called on class " + to_string(spec.problem_class));
  }
  const ValidationReport report = validate(spec, opts.validation);
  if (!report.ok()) {
    std::string why;
    for (const auto& c : report.checks) {
      if (c.status == CheckStatus::Fail) why += c.name + (c.detail.empty() ? "" : " (" + c.detail + ")") + "; ";
    }
    throw Error(ErrorCode::InvalidSpec, why);
  }
}

inline void require_coefficient(double value, const char* name, std::size_t k, bool allow_zero) {
  if (!std::isfinite(value) || value < 0.0 || (!allow_zero && value == 0.0)) {
    throw Error(ErrorCode::NonPositiveCoefficient,
                std::string(name) + "[" + std::to_string(k) + "] = " + std::to_string(value));
  }
}

struct ChannelStep {
  double gain = 0.0;
  double coefficient = 0.0;
};

/// One backward step of a power-2h channel
///   min_g  r g^{2h} + next * moment * (a - b g)^{2h}
/// whose value is q + r g*^{2h} + next * carry * (a - b g*)^{2h}, where carry
/// equals `moment` except in the literal higher-moment variant.
inline ChannelStep power_step(double a, double b, double q, double r, double next, double moment,
                              double carry, int half_power, std::size_t k, const char* channel) {
  const int two_h = 2 * half_power;
  ChannelStep out;
  double closed_loop = 0.0;
  if (r == 0.0) {
    // Free control: deadbeat when it helps, otherwise idle.
    out.gain = (b != 0.0 && next * moment != 0.0) ? a / b : 0.0;
    closed_loop = a - b * out.gain;
  } else {
    const double c = signed_root(next * b * moment / r, two_h - 1);
    const double denom = 1.0 + c * b;
    if (!(denom > 0.0)) {
      throw Error(ErrorCode::DenominatorNotPositive,
                  std::string(channel) + " channel: 1 + c b = " + std::to_string(denom) +
                      " at k = " + std::to_string(k));
    }
    out.gain = c * a / denom;
    closed_loop = a / denom;
  }
  out.coefficient = q + r * ipow(out.gain, two_h) + next * carry * ipow(closed_loop, two_h);
  return out;
}

/// Linear-quadratic deviation step shared by the Additive and MultState classes.
inline ChannelStep quadratic_step(double a, double b, double q, double r, double next, double extra,
                                  std::size_t k) {
  const double denom = r + next * b * b;
  if (!(denom > 0.0)) {
    if (denom == 0.0 && next == 0.0) return {0.0, q + extra};
    throw Error(ErrorCode::DenominatorNotPositive,
                "deviation channel: r + alpha b^2 = " + std::to_string(denom) +
                    " at k = " + std::to_string(k));
  }
  ChannelStep out;
  out.gain = next * b * a / denom;
  const double closed_loop = a - b * out.gain;
  out.coefficient = q + r * out.gain * out.gain + next * closed_loop * closed_loop + extra;
  return out;
}

inline void solve_mean_channel(const ProblemSpec& spec, const SolveOptions& opts,
                               CoefficientSchedule& coeffs, GainSchedule& gains) {
  const std::size_t n = spec.n();
  const auto& c = spec.cost;
  coeffs.alpha_bar.assign(n + 1, 0.0);
  gains.k_mean.assign(n, 0.0);
  coeffs.alpha_bar[n] = c.q_bar_terminal;
  for (std::size_t k = n; k-- > 0;) {
    const auto step = power_step(spec.mean_dyn.a_bar[k], spec.mean_dyn.b_bar[k], c.q_bar[k], c.r_bar[k],
                                 coeffs.alpha_bar[k + 1], 1.0, 1.0, c.p, k, "mean");
    gains.k_mean[k] = step.gain;
    coeffs.alpha_bar[k] = step.coefficient;
    require_coefficient(step.coefficient, "alpha_bar", k, opts.validation.allow_zero_weights);
  }
}

}  // namespace detail

/// Mean-channel-only problem with power-2p state and control costs.
inline Solution solve_deterministic(const ProblemSpec& spec, const SolveOptions& opts = {}) {
  detail::require_valid(spec, opts, ProblemClass::Deterministic);
  Solution s;
  s.coefficients.problem_class = spec.problem_class;
  s.coefficients.p = spec.cost.p;
  s.coefficients.o = 1;
  detail::solve_mean_channel(spec, opts, s.coefficients, s.gains);
  return s;
}

namespace detail {

inline Solution solve_quadratic_deviation(const ProblemSpec& spec, const SolveOptions& opts,
                                          bool multiplicative) {
  const std::size_t n = spec.n();
  const auto& c = spec.cost;
  Solution s;
  s.coefficients.problem_class = spec.problem_class;
  s.coefficients.p = c.p;
  s.coefficients.o = 1;
  solve_mean_channel(spec, opts, s.coefficients, s.gains);

  const double m2 = spec.noise.even_moment(2);
  Sequence alpha(n + 1, 0.0), k_dev(n, 0.0);
  alpha[n] = c.q_terminal;
  Sequence gamma_bar;
  if (!multiplicative) gamma_bar.assign(n + 1, 0.0);
  for (std::size_t k = n; k-- > 0;) {
    const double extra = multiplicative ? alpha[k + 1] * m2 : 0.0;
    const auto step = quadratic_step(spec.mean_dyn.a_bar[k], spec.mean_dyn.b_bar[k], c.q[k], c.r[k],
                                     alpha[k + 1], extra, k);
    k_dev[k] = step.gain;
    alpha[k] = step.coefficient;
    require_coefficient(alpha[k], "alpha", k, opts.validation.allow_zero_weights);
    if (!multiplicative) gamma_bar[k] = gamma_bar[k + 1] + alpha[k + 1] * m2;
  }
  s.coefficients.alpha = std::move(alpha);
  if (!multiplicative) s.coefficients.gamma_bar = std::move(gamma_bar);
  s.gains.k_dev = std::move(k_dev);
  return s;
}

}  // namespace detail

/// Additive noise x_{k+1} = a_bar x + b_bar u + eps: power-2p mean channel,
/// linear-quadratic variance channel, and the noise offset gamma_bar.
inline Solution solve_additive(const ProblemSpec& spec, const SolveOptions& opts = {}) {
  detail::require_valid(spec, opts, ProblemClass::Additive);
  return detail::solve_quadratic_deviation(spec, opts, false);
}

/// Multiplicative state noise x_{k+1} = a_bar x + b_bar u + (x - xbar) eps.
/// Same gains as the additive case; the noise feeds alpha directly and there
/// is no offset term.
inline Solution solve_mult_state(const ProblemSpec& spec, const SolveOptions& opts = {}) {
  detail::require_valid(spec, opts, ProblemClass::MultState);
  return detail::solve_quadratic_deviation(spec, opts, true);
}

/// Mean-field multiplicative noise
///   x_{k+1} = (a_bar xbar + b_bar ubar) + (a (x - xbar) + b (u - ubar)) eps
/// with power-2o central-moment costs. With m = E[eps^{2o}]:
///   c_k     = root_{2o-1}(alpha_{k+1} b_k m / r_k)
///   K_dev_k = c_k a_k / (1 + c_k b_k)
///   alpha_k = q_k + r_k K^{2o} + alpha_{k+1} m (a_k - b_k K)^{2o}
inline Solution solve_higher_moment(const ProblemSpec& spec, const SolveOptions& opts = {}) {
  detail::require_valid(spec, opts, ProblemClass::HigherMoment);
  const std::size_t n = spec.n();
  const auto& c = spec.cost;
  Solution s;
  s.coefficients.problem_class = spec.problem_class;
  s.coefficients.p = c.p;
  s.coefficients.o = c.o;
  detail::solve_mean_channel(spec, opts, s.coefficients, s.gains);

  const double m = spec.noise.even_moment(2 * c.o);
  const double carry = opts.literal_moment_recursion ? 1.0 : m;
  Sequence alpha(n + 1, 0.0), k_dev(n, 0.0);
  alpha[n] = c.q_terminal;
  for (std::size_t k = n; k-- > 0;) {
    const auto step = detail::power_step(spec.dev_dyn.a[k], spec.dev_dyn.b[k], c.q[k], c.r[k],
                                         alpha[k + 1], m, carry, c.o, k, "deviation");
    k_dev[k] = step.gain;
    alpha[k] = step.coefficient;
    detail::require_coefficient(alpha[k], "alpha", k, opts.validation.allow_zero_weights);
  }
  s.coefficients.alpha = std::move(alpha);
  s.gains.k_dev = std::move(k_dev);
  return s;
}

inline Solution solve(const ProblemSpec& spec, const SolveOptions& opts = {}) {
  switch (spec.problem_class) {
    case ProblemClass::Deterministic: return solve_deterministic(spec, opts);
    case ProblemClass::Additive: return solve_additive(spec, opts);
    case ProblemClass::MultState: return solve_mult_state(spec, opts);
    case ProblemClass::HigherMoment: return solve_higher_moment(spec, opts);
  }
  throw Error(ErrorCode::InvalidSpec, "unknown problem class");
}

/// Classical LQR Riccati difference equation on the mean channel,
///   alpha_bar_k = q_bar_k + alpha_bar_{k+1} a_bar^2 r_bar / (r_bar + alpha_bar_{k+1} b_bar^2),
/// written independently of the power-2p solver so the two can be compared.
inline CoefficientSchedule riccati_lqr(const ProblemSpec& spec, const ValidationOptions& vopts = {}) {
  if (spec.cost.p != 1) {
    throw Error(ErrorCode::PreconditionViolated, "riccati_lqr needs p = 1");
  }
  const ValidationReport report = validate(spec, vopts);
  if (!report.ok()) throw Error(ErrorCode::InvalidSpec, "riccati_lqr on an invalid spec");
  const std::size_t n = spec.n();
  const auto& a = spec.mean_dyn.a_bar;
  const auto& b = spec.mean_dyn.b_bar;
  const auto& c = spec.cost;
  CoefficientSchedule out;
  out.problem_class = spec.problem_class;
  out.p = 1;
  out.o = 1;
  out.alpha_bar.assign(n + 1, 0.0);
  out.alpha_bar[n] = c.q_bar_terminal;
  for (std::size_t k = n; k-- > 0;) {
    const double P = out.alpha_bar[k + 1];
    const double denom = c.r_bar[k] + P * b[k] * b[k];
    out.alpha_bar[k] = denom == 0.0 ? c.q_bar[k] : c.q_bar[k] + P * a[k] * a[k] * c.r_bar[k] / denom;
  }
  return out;
}

}  // namespace hocs
