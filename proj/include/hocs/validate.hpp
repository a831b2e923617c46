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

#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "hocs/model.hpp"

namespace hocs {

enum class CheckStatus { Pass, Fail, Deferred };

constexpr const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "FAIL";
    case CheckStatus::Deferred: return "deferred-to-recursion";
  }
  return "?";
}

struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Pass;
  std::string detail;
  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct ValidationReport {
  std::vector<CheckResult> checks;
  bool noise_centered = false;

  /// True when no static check failed (deferred checks do not count).
  [[nodiscard]] bool ok() const {
    return std::none_of(checks.begin(), checks.end(),
                        [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
  }

  [[nodiscard]] const CheckResult* find(const std::string& name) const {
    for (const auto& c : checks) {
      if (c.name == name) return &c;
    }
    return nullptr;
  }

  friend bool operator==(const ValidationReport&, const ValidationReport&) = default;
};

/// Relaxations used by tests and degenerate studies.
struct ValidationOptions {
  /// Accept zero (never negative) weights.
  bool allow_zero_weights = false;
  /// Accept b_bar_k = 0; the mean gain is then forced to zero at that step.
  bool allow_uncontrollable_steps = false;

  friend bool operator==(const ValidationOptions&, const ValidationOptions&) = default;
};

namespace check_names {
inline constexpr const char* kHorizon = "horizon at least one step";
inline constexpr const char* kLengths = "sequence lengths equal N";
inline constexpr const char* kWeights = "weights strictly positive";
inline constexpr const char* kDynamics = "dynamics finite and bounded";
inline constexpr const char* kControllable = "b_bar nonzero at every step";
inline constexpr const char* kCompatibility = "class/noise compatibility";
inline constexpr const char* kPowers = "powers valid";
inline constexpr const char* kSharedDynamics = "deviation dynamics match mean dynamics";
inline constexpr const char* kNoiseMoments = "noise moments finite and non-negative";
inline constexpr const char* kNoiseMean = "noise zero-mean";
inline constexpr const char* kInitial = "initial law consistent";
inline constexpr const char* kMeanDenominator = "denominator 1 + c_k b_bar_k > 0";
inline constexpr const char* kDevDenominator = "deviation-channel denominator > 0";
}  // namespace check_names

namespace detail {

inline bool all_finite(const Sequence& s) {
  return std::all_of(s.begin(), s.end(), [](double v) { return std::isfinite(v); });
}

inline std::string first_bad_weight(const std::string& label, const Sequence& s, bool allow_zero) {
  for (std::size_t k = 0; k < s.size(); ++k) {
    const double v = s[k];
    if (!std::isfinite(v) || v < 0.0 || (!allow_zero && v == 0.0)) {
      return label + "[" + std::to_string(k) + "] = " + std::to_string(v);
    }
  }
  return {};
}

}  // namespace detail

/// Static well-posedness checks. Failures are reported, never thrown.
inline ValidationReport validate(const ProblemSpec& spec, const ValidationOptions& opts = {}) {
  using namespace check_names;
  ValidationReport report;
  report.noise_centered = spec.noise.centered();
  auto add = [&](const char* name, bool pass, std::string detail = {}) {
    report.checks.push_back({name, pass ? CheckStatus::Pass : CheckStatus::Fail, std::move(detail)});
  };

  const std::size_t n = spec.n();
  add(kHorizon, n >= 1, "N = " + std::to_string(n));

  const bool stochastic = is_stochastic(spec.problem_class);
  const auto& c = spec.cost;
  std::vector<std::pair<const char*, const Sequence*>> seqs = {
      {"a_bar", &spec.mean_dyn.a_bar}, {"b_bar", &spec.mean_dyn.b_bar},
      {"a", &spec.dev_dyn.a},          {"b", &spec.dev_dyn.b},
      {"q", &c.q},                     {"q_bar", &c.q_bar},
      {"r", &c.r},                     {"r_bar", &c.r_bar}};
  std::string len_detail;
  for (const auto& [label, s] : seqs) {
    if (s->size() != n) {
      len_detail += std::string(label) + " has length " + std::to_string(s->size()) + "; ";
    }
  }
  const bool lengths_ok = len_detail.empty();
  add(kLengths, lengths_ok, len_detail);

  {
    std::string bad = detail::first_bad_weight("q_bar", c.q_bar, opts.allow_zero_weights);
    if (bad.empty()) bad = detail::first_bad_weight("r_bar", c.r_bar, opts.allow_zero_weights);
    if (bad.empty()) bad = detail::first_bad_weight("q_bar_N", {c.q_bar_terminal}, opts.allow_zero_weights);
    if (bad.empty() && stochastic) {
      bad = detail::first_bad_weight("q", c.q, opts.allow_zero_weights);
      if (bad.empty()) bad = detail::first_bad_weight("r", c.r, opts.allow_zero_weights);
      if (bad.empty()) bad = detail::first_bad_weight("q_N", {c.q_terminal}, opts.allow_zero_weights);
    }
    add(kWeights, bad.empty(), bad);
  }

  {
    const bool finite = detail::all_finite(spec.mean_dyn.a_bar) && detail::all_finite(spec.mean_dyn.b_bar) &&
                        detail::all_finite(spec.dev_dyn.a) && detail::all_finite(spec.dev_dyn.b);
    add(kDynamics, finite, finite ? "" : "non-finite dynamics entry");
  }

  {
    std::string bad;
    if (!opts.allow_uncontrollable_steps) {
      for (std::size_t k = 0; k < spec.mean_dyn.b_bar.size(); ++k) {
        if (spec.mean_dyn.b_bar[k] == 0.0) {
          bad = "b_bar[" + std::to_string(k) + "] = 0";
          break;
        }
      }
    }
    add(kControllable, bad.empty(), bad);
  }

  {
    const NoiseKind want = required_noise_kind(spec.problem_class);
    const bool ok = spec.noise.kind() == want;
    add(kCompatibility, ok,
        ok ? "" : std::string("class ") + to_string(spec.problem_class) + " needs noise kind " +
                      to_string(want) + ", got " + to_string(spec.noise.kind()));
  }

  {
    std::string bad;
    if (c.p < 1) bad = "p = " + std::to_string(c.p);
    else if (c.o < 1) bad = "o = " + std::to_string(c.o);
    else if (spec.problem_class != ProblemClass::HigherMoment && c.o != 1)
      bad = "o must be 1 outside HigherMoment, got " + std::to_string(c.o);
    add(kPowers, bad.empty(), bad);
  }

  if (spec.problem_class != ProblemClass::HigherMoment) {
    const bool same = spec.dev_dyn.a == spec.mean_dyn.a_bar && spec.dev_dyn.b == spec.mean_dyn.b_bar;
    add(kSharedDynamics, same, same ? "" : "distinct (a, b) are only legal for HigherMoment");
  }

  if (stochastic && spec.noise.kind() != NoiseKind::None) {
    const int order = 2 * std::max(1, spec.moment_half_power());
    std::string bad;
    try {
      for (int ord = 2; ord <= order; ord += 2) {
        const double m = spec.noise.even_moment(ord);
        if (!std::isfinite(m) || m < 0.0) {
          bad = "m_" + std::to_string(ord) + " = " + std::to_string(m);
          break;
        }
      }
    } catch (const Error& e) {
      bad = e.what();
    }
    add(kNoiseMoments, bad.empty(), bad);
    const double mu = spec.noise.mean();
    add(kNoiseMean, std::fabs(mu) <= 1e-12,
        spec.noise.centered() ? "empirical samples were mean-centered" : "");
  }

  {
    std::string bad;
    if (!std::isfinite(spec.initial.mean)) {
      bad = "non-finite initial mean";
    } else if (const auto* g = std::get_if<GaussianLaw>(&spec.initial.law)) {
      if (!(g->variance >= 0.0) || !std::isfinite(g->variance)) bad = "Gaussian variance must be >= 0";
    } else if (const auto* e = std::get_if<EmpiricalLaw>(&spec.initial.law)) {
      if (e->samples.empty()) {
        bad = "empirical initial law is empty";
      } else {
        double sum = 0.0, scale = 1.0;
        for (double s : e->samples) {
          sum += s;
          scale = std::max(scale, std::fabs(s));
        }
        const double m = sum / static_cast<double>(e->samples.size());
        if (std::fabs(m - spec.initial.mean) > 1e-12 * scale) {
          bad = "sample mean " + std::to_string(m) + " differs from declared mean";
        }
      }
    }
    add(kInitial, bad.empty(), bad);
  }

  report.checks.push_back({kMeanDenominator, CheckStatus::Deferred, "depends on solved coefficients"});
  if (stochastic) {
    report.checks.push_back({kDevDenominator, CheckStatus::Deferred, "depends on solved coefficients"});
  }
  return report;
}

}  // namespace hocs
