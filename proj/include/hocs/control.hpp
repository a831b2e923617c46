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

#include <concepts>
#include <cstddef>
#include <string>

#include "hocs/recursion.hpp"

namespace hocs {

struct ControlAction {
  double u = 0.0;      // realized control
  double u_bar = 0.0;  // mean control
  friend bool operator==(const ControlAction&, const ControlAction&) = default;
};

/// u = -K_dev_k (x - xbar) - K_mean_k xbar. Without a deviation channel the
/// deviation gain is zero.
inline ControlAction control_action(const GainSchedule& gains, std::size_t k, double x, double x_bar) {
  if (k >= gains.k_mean.size()) {
    throw Error(ErrorCode::IndexOutOfRange,
                "step " + std::to_string(k) + " outside [0, " + std::to_string(gains.k_mean.size()) + ")");
  }
  const double u_bar = -gains.k_mean[k] * x_bar;
  const double k_dev = gains.k_dev ? (*gains.k_dev)[k] : 0.0;
  return {u_bar - k_dev * (x - x_bar), u_bar};
}

enum class BaselineKind { SignController, LinearFeedback };

constexpr int sgn(double v) { return (v > 0.0) - (v < 0.0); }

/// Hand-tuned comparison controllers:
///   SignController:  u = -3 sgn(xbar - x) - 3 sgn(xbar), values in {-6,-3,0,3,6}
///   LinearFeedback:  u = -3 (xbar - x) - 3 xbar
inline double baseline_policy(BaselineKind kind, double x, double x_bar) {
  switch (kind) {
    case BaselineKind::SignController: return -3.0 * sgn(x_bar - x) - 3.0 * sgn(x_bar);
    case BaselineKind::LinearFeedback: return -3.0 * (x_bar - x) - 3.0 * x_bar;
  }
  return 0.0;
}

/// A closed-loop law evaluated per path. `mean_control` drives the mean
/// dynamics; `control` is the realized action on one path.
template <class P>
concept Policy = requires(const P& p, std::size_t k, double x, double x_bar) {
  { p.horizon() } -> std::convertible_to<std::size_t>;
  { p.mean_control(k, x_bar) } -> std::convertible_to<double>;
  { p.control(k, x, x_bar) } -> std::convertible_to<double>;
};

class FeedbackPolicy {
 public:
  explicit FeedbackPolicy(GainSchedule gains) : gains_(std::move(gains)) {}

  [[nodiscard]] std::size_t horizon() const noexcept { return gains_.size(); }
  [[nodiscard]] double mean_control(std::size_t k, double x_bar) const { return -gains_.k_mean[k] * x_bar; }
  [[nodiscard]] double control(std::size_t k, double x, double x_bar) const {
    return control_action(gains_, k, x, x_bar).u;
  }
  [[nodiscard]] const GainSchedule& gains() const noexcept { return gains_; }

 private:
  GainSchedule gains_;
};

/// Baseline applied on every path; the mean control is the baseline evaluated
/// at the mean (x = xbar), which is also its expectation for symmetric noise.
class BaselinePolicy {
 public:
  BaselinePolicy(BaselineKind kind, std::size_t horizon) : kind_(kind), horizon_(horizon) {}

  [[nodiscard]] std::size_t horizon() const noexcept { return horizon_; }
  [[nodiscard]] double mean_control(std::size_t, double x_bar) const {
    return baseline_policy(kind_, x_bar, x_bar);
  }
  [[nodiscard]] double control(std::size_t, double x, double x_bar) const {
    return baseline_policy(kind_, x, x_bar);
  }
  [[nodiscard]] BaselineKind kind() const noexcept { return kind_; }

 private:
  BaselineKind kind_;
  std::size_t horizon_;
};

static_assert(Policy<FeedbackPolicy>);
static_assert(Policy<BaselinePolicy>);

/// Copy of `gains` with one channel multiplied by `factor`.
enum class GainChannel { Mean, Deviation };

inline GainSchedule scale_gains(GainSchedule gains, GainChannel channel, double factor) {
  if (channel == GainChannel::Mean) {
    for (double& g : gains.k_mean) g *= factor;
  } else if (gains.k_dev) {
    for (double& g : *gains.k_dev) g *= factor;
  }
  return gains;
}

}  // namespace hocs
