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

// Domain types for scalar discrete-time control problems with power-2p mean
// costs and power-2o central-moment costs.

#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hocs/errors.hpp"

namespace hocs {

using Sequence = std::vector<double>;

/// Time indices run over k = 0..n_steps; controls exist for k < n_steps.
struct Horizon {
  std::size_t n_steps = 1;

  [[nodiscard]] std::size_t size() const noexcept { return n_steps; }
  friend bool operator==(const Horizon&, const Horizon&) = default;
};

enum class ProblemClass { Deterministic, Additive, MultState, HigherMoment };

constexpr const char* to_string(ProblemClass c) {
  switch (c) {
    case ProblemClass::Deterministic: return "Deterministic";
    case ProblemClass::Additive: return "Additive";
    case ProblemClass::MultState: return "MultState";
    case ProblemClass::HigherMoment: return "HigherMoment";
  }
  return "?";
}

inline bool is_stochastic(ProblemClass c) { return c != ProblemClass::Deterministic; }

/// Repeats a scalar over the horizon or passes a full-length sequence through.
inline Sequence broadcast(double value, Horizon horizon) {
  return Sequence(horizon.n_steps, value);
}

inline Sequence broadcast(const Sequence& values, Horizon horizon) {
  if (values.size() == horizon.n_steps) return values;
  if (values.size() == 1) return Sequence(horizon.n_steps, values.front());
  throw Error(ErrorCode::LengthMismatch,
              "sequence of length " + std::to_string(values.size()) +
                  " cannot be broadcast to horizon " +
                  std::to_string(horizon.n_steps));
}

/// Real odd root: sign(x) |x|^(1/n). `n` must be odd and positive.
inline double signed_root(double x, int n) {
  if (n < 1 || n % 2 == 0) {
    throw Error(ErrorCode::PreconditionViolated,
                "signed_root needs an odd positive degree, got " + std::to_string(n));
  }
  if (n == 1 || x == 0.0) return x;
  if (n == 3) return std::cbrt(x);
  const double r = std::pow(std::fabs(x), 1.0 / n);
  return std::signbit(x) ? -r : r;
}

/// x^n for a non-negative integer exponent by repeated squaring.
inline double ipow(double x, int n) {
  double result = 1.0;
  double base = x;
  for (unsigned e = static_cast<unsigned>(n); e != 0; e >>= 1) {
    if (e & 1U) result *= base;
    base *= base;
  }
  return result;
}

/// (2j-1)!! for j >= 0, with (-1)!! = 1.
inline double double_factorial_odd(int j) {
  double r = 1.0;
  for (int i = 2 * j - 1; i > 1; i -= 2) r *= i;
  return r;
}

struct MeanDynamics {
  Sequence a_bar;
  Sequence b_bar;
  friend bool operator==(const MeanDynamics&, const MeanDynamics&) = default;
};

struct DeviationDynamics {
  Sequence a;
  Sequence b;
  friend bool operator==(const DeviationDynamics&, const DeviationDynamics&) = default;
};

struct CostSpec {
  Sequence q;
  double q_terminal = 0.0;
  Sequence q_bar;
  double q_bar_terminal = 0.0;
  Sequence r;
  Sequence r_bar;
  int p = 1;
  int o = 1;
  friend bool operator==(const CostSpec&, const CostSpec&) = default;
};

enum class NoiseKind { None, Additive, MultState, MultMeanField };

constexpr const char* to_string(NoiseKind k) {
  switch (k) {
    case NoiseKind::None: return "None";
    case NoiseKind::Additive: return "Additive";
    case NoiseKind::MultState: return "MultState";
    case NoiseKind::MultMeanField: return "MultMeanField";
  }
  return "?";
}

struct GaussianNoise {
  double sigma = 1.0;
  friend bool operator==(const GaussianNoise&, const GaussianNoise&) = default;
};
struct RademacherNoise {
  double scale = 1.0;
  friend bool operator==(const RademacherNoise&, const RademacherNoise&) = default;
};
struct UniformSymmetricNoise {
  double halfwidth = 1.0;
  friend bool operator==(const UniformSymmetricNoise&, const UniformSymmetricNoise&) = default;
};
struct EmpiricalNoise {
  std::vector<double> samples;
  friend bool operator==(const EmpiricalNoise&, const EmpiricalNoise&) = default;
};

using NoiseDistribution =
    std::variant<GaussianNoise, RademacherNoise, UniformSymmetricNoise, EmpiricalNoise>;

/// Zero-mean i.i.d. noise. Even moments m_{2j} = E[eps^{2j}] are taken from
/// `moment_override` when present, otherwise from the distribution.
class NoiseSpec {
 public:
  NoiseSpec() = default;

  /// Empirical samples are kept as given (for serialization) and a
  /// mean-centered copy is used for sampling and moments; `centered()`
  /// reports whether centering shifted anything.
  NoiseSpec(NoiseKind kind, NoiseDistribution distribution, std::map<int, double> moment_override = {})
      : kind_(kind), distribution_(std::move(distribution)), moment_override_(std::move(moment_override)) {
    if (const auto* emp = std::get_if<EmpiricalNoise>(&distribution_)) {
      if (emp->samples.empty()) {
        throw Error(ErrorCode::InvalidSpec, "empirical noise needs at least one sample");
      }
      centered_samples_ = emp->samples;
      const double mean = std::accumulate(emp->samples.begin(), emp->samples.end(), 0.0) /
                          static_cast<double>(emp->samples.size());
      if (mean != 0.0) {
        for (double& s : centered_samples_) s -= mean;
        centered_ = true;
      }
    }
  }

  static NoiseSpec none() { return NoiseSpec(NoiseKind::None, GaussianNoise{0.0}); }

  [[nodiscard]] NoiseKind kind() const noexcept { return kind_; }
  [[nodiscard]] const NoiseDistribution& distribution() const noexcept { return distribution_; }
  [[nodiscard]] const std::map<int, double>& moment_override() const noexcept { return moment_override_; }
  [[nodiscard]] bool centered() const noexcept { return centered_; }
  /// Mean-centered empirical samples; empty for parametric distributions.
  [[nodiscard]] const std::vector<double>& empirical_samples() const noexcept { return centered_samples_; }

  /// E[eps^order] for even order >= 2. Zero for kind None.
  [[nodiscard]] double even_moment(int order) const {
    if (order < 2 || order % 2 != 0) {
      throw Error(ErrorCode::MissingMoment,
                  "only even moments of order >= 2 exist, asked for " + std::to_string(order));
    }
    if (kind_ == NoiseKind::None) return 0.0;
    if (auto it = moment_override_.find(order); it != moment_override_.end()) return it->second;
    const int j = order / 2;
    return std::visit(
        [&](const auto& d) -> double {
          using D = std::decay_t<decltype(d)>;
          if constexpr (std::is_same_v<D, GaussianNoise>) {
            return double_factorial_odd(j) * ipow(d.sigma, order);
          } else if constexpr (std::is_same_v<D, RademacherNoise>) {
            return ipow(d.scale, order);
          } else if constexpr (std::is_same_v<D, UniformSymmetricNoise>) {
            return ipow(d.halfwidth, order) / (order + 1);
          } else {
            double acc = 0.0;
            for (double s : centered_samples_) acc += ipow(s, order);
            return acc / static_cast<double>(centered_samples_.size());
          }
        },
        distribution_);
  }

  /// Mean of the distribution as sampled; nonzero only through rounding.
  [[nodiscard]] double mean() const {
    if (centered_samples_.empty()) return 0.0;
    return std::accumulate(centered_samples_.begin(), centered_samples_.end(), 0.0) /
           static_cast<double>(centered_samples_.size());
  }

  friend bool operator==(const NoiseSpec& l, const NoiseSpec& r) {
    return l.kind_ == r.kind_ && l.distribution_ == r.distribution_ && l.moment_override_ == r.moment_override_;
  }

 private:
  NoiseKind kind_ = NoiseKind::None;
  NoiseDistribution distribution_ = GaussianNoise{0.0};
  std::map<int, double> moment_override_;
  std::vector<double> centered_samples_;
  bool centered_ = false;
};

struct DiracLaw {
  friend bool operator==(const DiracLaw&, const DiracLaw&) = default;
};
struct GaussianLaw {
  double variance = 0.0;
  friend bool operator==(const GaussianLaw&, const GaussianLaw&) = default;
};
struct EmpiricalLaw {
  std::vector<double> samples;
  friend bool operator==(const EmpiricalLaw&, const EmpiricalLaw&) = default;
};

using InitialDistribution = std::variant<DiracLaw, GaussianLaw, EmpiricalLaw>;

/// Law of x_0. Empirical samples are drawn with equal weight; their sample
/// mean must agree with `mean`.
struct InitialLaw {
  double mean = 0.0;
  InitialDistribution law = DiracLaw{};

  static InitialLaw dirac(double x0) { return {x0, DiracLaw{}}; }
  static InitialLaw gaussian(double mean, double variance) { return {mean, GaussianLaw{variance}}; }
  static InitialLaw empirical(std::vector<double> samples) {
    if (samples.empty()) throw Error(ErrorCode::InvalidSpec, "empirical initial law is empty");
    const double m = std::accumulate(samples.begin(), samples.end(), 0.0) /
                     static_cast<double>(samples.size());
    return {m, EmpiricalLaw{std::move(samples)}};
  }

  /// E[(x_0 - mean)^order] for even order >= 2.
  [[nodiscard]] double central_moment(int order) const {
    if (order < 2 || order % 2 != 0) {
      throw Error(ErrorCode::MissingMoment,
                  "initial law has no central moment of order " + std::to_string(order));
    }
    return std::visit(
        [&](const auto& l) -> double {
          using L = std::decay_t<decltype(l)>;
          if constexpr (std::is_same_v<L, DiracLaw>) {
            return 0.0;
          } else if constexpr (std::is_same_v<L, GaussianLaw>) {
            return double_factorial_odd(order / 2) * ipow(std::sqrt(l.variance), order);
          } else {
            double acc = 0.0;
            for (double s : l.samples) acc += ipow(s - mean, order);
            return acc / static_cast<double>(l.samples.size());
          }
        },
        law);
  }

  [[nodiscard]] double variance() const { return central_moment(2); }

  friend bool operator==(const InitialLaw&, const InitialLaw&) = default;
};

struct ProblemSpec {
  ProblemClass problem_class = ProblemClass::Deterministic;
  Horizon horizon;
  MeanDynamics mean_dyn;
  DeviationDynamics dev_dyn;
  CostSpec cost;
  NoiseSpec noise;
  InitialLaw initial;

  [[nodiscard]] std::size_t n() const noexcept { return horizon.n_steps; }

  /// Power of the central-moment terms; the variance (o = 1) outside HigherMoment.
  [[nodiscard]] int moment_half_power() const noexcept {
    return problem_class == ProblemClass::HigherMoment ? cost.o : 1;
  }

  friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

inline NoiseKind required_noise_kind(ProblemClass c) {
  switch (c) {
    case ProblemClass::Deterministic: return NoiseKind::None;
    case ProblemClass::Additive: return NoiseKind::Additive;
    case ProblemClass::MultState: return NoiseKind::MultState;
    case ProblemClass::HigherMoment: return NoiseKind::MultMeanField;
  }
  return NoiseKind::None;
}

/// Scalar-parameter convenience builder. Every weight and dynamics entry is
/// constant over the horizon; deviation dynamics default to the mean pair.
struct ScalarProblem {
  ProblemClass problem_class = ProblemClass::Deterministic;
  std::size_t n_steps = 1;
  double a_bar = 1.0, b_bar = 1.0;
  std::optional<double> a, b;
  double q = 0.0, q_terminal = 0.0, q_bar = 1.0, q_bar_terminal = 1.0;
  double r = 0.0, r_bar = 1.0;
  int p = 1, o = 1;
  NoiseSpec noise = NoiseSpec::none();
  InitialLaw initial = InitialLaw::dirac(1.0);

  [[nodiscard]] ProblemSpec build() const {
    const Horizon h{n_steps};
    ProblemSpec s;
    s.problem_class = problem_class;
    s.horizon = h;
    s.mean_dyn = {broadcast(a_bar, h), broadcast(b_bar, h)};
    s.dev_dyn = {broadcast(a.value_or(a_bar), h), broadcast(b.value_or(b_bar), h)};
    s.cost = {broadcast(q, h), q_terminal, broadcast(q_bar, h), q_bar_terminal,
              broadcast(r, h), broadcast(r_bar, h), p, o};
    s.noise = noise;
    s.initial = initial;
    return s;
  }
};

}  // namespace hocs
