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

// Small numerical helpers used as independent references in the tests.

#pragma once

#include <cmath>
#include <functional>
#include <numbers>

#include "hocs/hocs.hpp"

namespace hocs_test {

/// Composite Simpson rule with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double lo, double hi, int panels) {
  if (panels % 2) ++panels;
  const double h = (hi - lo) / panels;
  double acc = f(lo) + f(hi);
  for (int i = 1; i < panels; ++i) acc += f(lo + i * h) * (i % 2 ? 4.0 : 2.0);
  return acc * h / 3.0;
}

inline double normal_pdf(double x, double sigma) {
  return std::exp(-0.5 * x * x / (sigma * sigma)) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

/// Golden-section search for the minimizer of a unimodal function on [lo, hi].
inline double golden_min(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double c = b - inv_phi * (b - a), d = a + inv_phi * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol * std::max(1.0, std::fabs(a) + std::fabs(b))) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

inline double rel(double a, double b) { return std::fabs(a - b) / std::max(std::fabs(b), 1e-300); }

/// Scalar problem with random constants in [lo, hi] and the requested class.
inline hocs::ProblemSpec random_spec(std::mt19937_64& eng, hocs::ProblemClass cls, int p, int o = 1,
                                     double lo = 0.1, double hi = 5.0) {
  std::uniform_real_distribution<double> par(lo, hi);
  std::uniform_int_distribution<std::size_t> steps(1, 10);
  hocs::ScalarProblem s;
  s.problem_class = cls;
  s.n_steps = steps(eng);
  s.a_bar = par(eng);
  s.b_bar = par(eng);
  s.q_bar = par(eng);
  s.q_bar_terminal = par(eng);
  s.r_bar = par(eng);
  if (cls != hocs::ProblemClass::Deterministic) {
    s.q = par(eng);
    s.q_terminal = par(eng);
    s.r = par(eng);
  }
  if (cls == hocs::ProblemClass::HigherMoment) {
    s.a = par(eng);
    s.b = par(eng);
  }
  s.p = p;
  s.o = cls == hocs::ProblemClass::HigherMoment ? o : 1;
  s.noise = hocs::NoiseSpec(hocs::required_noise_kind(cls), hocs::GaussianNoise{par(eng) / 5.0});
  if (cls == hocs::ProblemClass::Deterministic) s.noise = hocs::NoiseSpec::none();
  s.initial = hocs::InitialLaw::dirac(par(eng));
  return s.build();
}

}  // namespace hocs_test
