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

#include <catch_amalgamated.hpp>

#include "support.hpp"

using namespace hocs;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using hocs_test::rel;

namespace {

/// min_u u^4 + (1 + u)^4 from x = 1 over one step.
ProblemSpec desk_quartic() {
  ScalarProblem s;
  s.n_steps = 1;
  s.q_bar = 0.0;
  s.q_bar_terminal = 1.0;
  s.r_bar = 1.0;
  s.p = 2;
  return s.build();
}

SolveOptions zero_weights_ok() {
  SolveOptions o;
  o.validation.allow_zero_weights = true;
  return o;
}

}  // namespace

TEST_CASE("deterministic quartic desk case", "[recursion]") {
  const Solution s = solve_deterministic(desk_quartic(), zero_weights_ok());
  CHECK_THAT(s.gains.k_mean[0], WithinRel(0.5, 1e-15));
  CHECK_THAT(s.coefficients.alpha_bar[0], WithinRel(0.125, 1e-15));
  CHECK(s.coefficients.alpha_bar[1] == 1.0);
  CHECK_FALSE(s.coefficients.alpha);
  CHECK_FALSE(s.gains.k_dev);

  // independent: minimize u^4 + (1+u)^4 directly
  const double u = hocs_test::golden_min([](double v) { return ipow(v, 4) + ipow(1 + v, 4); }, -2, 2);
  CHECK_THAT(u, WithinAbs(-0.5, 1e-6));
}

TEST_CASE("deterministic p = 1 one step", "[recursion]") {
  ScalarProblem s;
  s.n_steps = 1;
  const Solution sol = solve(s.build());
  CHECK_THAT(sol.coefficients.alpha_bar[0], WithinRel(1.5, 1e-15));
  CHECK_THAT(riccati_lqr(s.build()).alpha_bar[0], WithinRel(1.5, 1e-15));
}

TEST_CASE("zero initial mean gives the zero trajectory", "[recursion]") {
  for (int p = 1; p <= 3; ++p) {
    ProblemSpec spec = example1_config(p).problem;
    spec.initial = InitialLaw::dirac(0.0);
    const Solution sol = solve(spec);
    const Sequence xb = propagate_mean(spec, sol.gains);
    for (double v : xb) CHECK(v == 0.0);
    CHECK(predicted_cost(sol.coefficients, spec.initial) == 0.0);
  }
}

TEST_CASE("additive deviation gain", "[recursion]") {
  ScalarProblem s;
  s.problem_class = ProblemClass::Additive;
  s.n_steps = 1;
  s.q = 1.0;
  s.q_terminal = 1.0;
  s.r = 1.0;
  s.noise = NoiseSpec(NoiseKind::Additive, GaussianNoise{1.0});
  const Solution sol = solve_additive(s.build());
  CHECK_THAT((*sol.gains.k_dev)[0], WithinRel(0.5, 1e-15));
  CHECK((*sol.coefficients.gamma_bar)[1] == 0.0);
  CHECK_THAT((*sol.coefficients.gamma_bar)[0], WithinRel(1.0, 1e-15));
}

TEST_CASE("additive with zero noise has no offset", "[recursion]") {
  ProblemSpec spec = example2_config(2).problem;
  spec.noise = NoiseSpec(NoiseKind::Additive, GaussianNoise{0.0});
  const Solution sol = solve(spec);
  for (double g : *sol.coefficients.gamma_bar) CHECK(g == 0.0);
}

TEST_CASE("p = 1 with equal channel weights gives alpha = alpha_bar", "[recursion]") {
  auto eng = make_stream(5, StreamTag::Sampling);
  for (int i = 0; i < 50; ++i) {
    ProblemSpec spec = hocs_test::random_spec(eng, ProblemClass::Additive, 1);
    spec.cost.q = spec.cost.q_bar;
    spec.cost.q_terminal = spec.cost.q_bar_terminal;
    spec.cost.r = spec.cost.r_bar;
    const Solution sol = solve(spec);
    for (std::size_t k = 0; k <= spec.n(); ++k) {
      CHECK(rel((*sol.coefficients.alpha)[k], sol.coefficients.alpha_bar[k]) < 1e-12);
    }
  }
}

TEST_CASE("multiplicative state noise one step", "[recursion]") {
  ScalarProblem s;
  s.problem_class = ProblemClass::MultState;
  s.n_steps = 1;
  s.q = 0.7;
  s.q_terminal = 1.0;
  s.r = 1.0;
  s.noise = NoiseSpec(NoiseKind::MultState, GaussianNoise{1.0});
  const Solution sol = solve_mult_state(s.build());
  CHECK_THAT((*sol.gains.k_dev)[0], WithinRel(0.5, 1e-15));
  CHECK_THAT((*sol.coefficients.alpha)[0], WithinRel(0.7 + 1.5, 1e-15));
  CHECK_FALSE(sol.coefficients.gamma_bar);
}

TEST_CASE("vanishing noise: multiplicative equals additive", "[recursion]") {
  for (int p = 1; p <= 3; ++p) {
    ProblemSpec add = example2_config(p).problem;
    add.noise = NoiseSpec(NoiseKind::Additive, GaussianNoise{0.0});
    ProblemSpec mult = add;
    mult.problem_class = ProblemClass::MultState;
    mult.noise = NoiseSpec(NoiseKind::MultState, GaussianNoise{0.0});
    const Solution a = solve(add), m = solve(mult);
    CHECK(a.coefficients.alpha_bar == m.coefficients.alpha_bar);
    CHECK(*a.coefficients.alpha == *m.coefficients.alpha);
    CHECK(*a.gains.k_dev == *m.gains.k_dev);
    for (double g : *a.coefficients.gamma_bar) CHECK(g == 0.0);
  }
}

TEST_CASE("zero deviation weights leave the deviation uncontrolled", "[recursion]") {
  for (ProblemClass cls : {ProblemClass::MultState, ProblemClass::HigherMoment}) {
    ProblemSpec spec = cls == ProblemClass::MultState ? example3_config(1).problem : example4_config(2).problem;
    spec.cost.q.assign(spec.n(), 0.0);
    spec.cost.q_terminal = 0.0;
    const Solution sol = solve(spec, zero_weights_ok());
    for (double a : *sol.coefficients.alpha) CHECK(a == 0.0);
    for (double k : *sol.gains.k_dev) CHECK(k == 0.0);
  }
}

TEST_CASE("higher-moment o = 1 gain matches a one-step minimization", "[recursion]") {
  auto eng = make_stream(6, StreamTag::Sampling);
  for (int i = 0; i < 40; ++i) {
    const ProblemSpec spec = hocs_test::random_spec(eng, ProblemClass::HigherMoment, 1, 1);
    const Solution sol = solve(spec);
    const double m2 = spec.noise.even_moment(2);
    const auto& alpha = *sol.coefficients.alpha;
    for (std::size_t k = 0; k < spec.n(); ++k) {
      const double a = spec.dev_dyn.a[k], b = spec.dev_dyn.b[k], r = spec.cost.r[k];
      const double next = alpha[k + 1];
      const double c = next * b * m2 / r;
      const double closed = c * a / (1 + c * b);
      const double numeric = hocs_test::golden_min(
          [&](double g) { return r * g * g + next * m2 * (a - b * g) * (a - b * g); }, -100, 100);
      CHECK_THAT((*sol.gains.k_dev)[k], WithinRel(closed, 1e-12));
      CHECK_THAT((*sol.gains.k_dev)[k], WithinAbs(numeric, 1e-6 * std::max(1.0, std::fabs(numeric))));
    }
  }
}

TEST_CASE("higher-moment o = 2 one step with Gaussian noise", "[recursion]") {
  ScalarProblem s;
  s.problem_class = ProblemClass::HigherMoment;
  s.n_steps = 1;
  s.a = s.b = 1.0;
  s.q = s.q_terminal = s.r = 1.0;
  s.p = s.o = 2;
  s.noise = NoiseSpec(NoiseKind::MultMeanField, GaussianNoise{1.0});
  const Solution sol = solve(s.build());
  const double c = std::cbrt(3.0);
  CHECK_THAT((*sol.gains.k_dev)[0], WithinRel(c / (1 + c), 1e-14));
  const double numeric = hocs_test::golden_min([](double g) { return ipow(g, 4) + 3 * ipow(1 - g, 4); }, -2, 2);
  CHECK_THAT((*sol.gains.k_dev)[0], WithinAbs(numeric, 1e-6));
}

TEST_CASE("literal higher-moment recursion differs only when m != 1", "[recursion]") {
  SolveOptions literal;
  literal.literal_moment_recursion = true;
  const ProblemSpec o1 = example4_config(1).problem;
  CHECK(solve(o1, literal).coefficients == solve(o1).coefficients);

  const ProblemSpec o2 = example4_config(2).problem;
  const Solution lit = solve(o2, literal), inc = solve(o2);
  CHECK(lit.coefficients.alpha_bar == inc.coefficients.alpha_bar);
  CHECK((*lit.coefficients.alpha)[0] < (*inc.coefficients.alpha)[0]);
  // the gain uses the noise moment in both
  CHECK((*lit.gains.k_dev)[9] == (*inc.gains.k_dev)[9]);
}

TEST_CASE("first-order conditions hold for every solved gain", "[recursion]") {
  auto eng = make_stream(7, StreamTag::Sampling);
  std::uniform_int_distribution<int> power(1, 3);
  for (ProblemClass cls :
       {ProblemClass::Deterministic, ProblemClass::Additive, ProblemClass::MultState, ProblemClass::HigherMoment}) {
    for (int i = 0; i < 50; ++i) {
      const int p = power(eng);
      const int o = power(eng);
      const ProblemSpec spec = hocs_test::random_spec(eng, cls, p, o);
      const Solution sol = solve(spec);
      const int e = 2 * p - 1;
      for (std::size_t k = 0; k < spec.n(); ++k) {
        const double a = spec.mean_dyn.a_bar[k], b = spec.mean_dyn.b_bar[k];
        const double K = sol.gains.k_mean[k];
        const double lhs = spec.cost.r_bar[k] * ipow(K, e);
        const double rhs = sol.coefficients.alpha_bar[k + 1] * b * ipow(a - b * K, e);
        CHECK(rel(lhs, rhs) < 1e-10);
      }
      if (cls == ProblemClass::Deterministic) continue;
      const int h = cls == ProblemClass::HigherMoment ? o : 1;
      const double m = cls == ProblemClass::HigherMoment ? spec.noise.even_moment(2 * o) : 1.0;
      for (std::size_t k = 0; k < spec.n(); ++k) {
        const double a = spec.dev_dyn.a[k], b = spec.dev_dyn.b[k];
        const double K = (*sol.gains.k_dev)[k];
        const double lhs = spec.cost.r[k] * ipow(K, 2 * h - 1);
        const double rhs = (*sol.coefficients.alpha)[k + 1] * m * b * ipow(a - b * K, 2 * h - 1);
        CHECK(rel(lhs, rhs) < 1e-10);
      }
    }
  }
}

TEST_CASE("one-step optimality by grid scan", "[recursion]") {
  auto eng = make_stream(8, StreamTag::Sampling);
  std::uniform_real_distribution<double> par(0.1, 5.0);
  std::uniform_int_distribution<int> power(1, 3);
  for (int i = 0; i < 200; ++i) {
    ScalarProblem s;
    s.n_steps = 1;
    s.a_bar = par(eng) * (i % 3 == 0 ? -1.0 : 1.0);
    s.b_bar = par(eng) * (i % 5 == 0 ? -1.0 : 1.0);
    s.q_bar = par(eng);
    s.q_bar_terminal = par(eng);
    s.r_bar = par(eng);
    s.p = power(eng);
    const Solution sol = solve(s.build());
    const int e = 2 * s.p;
    auto step_cost = [&](double g) {
      return s.r_bar * ipow(g, e) + s.q_bar_terminal * ipow(s.a_bar - s.b_bar * g, e);
    };
    const double K = sol.gains.k_mean[0];
    const double best = step_cost(K);
    const double half = std::max(1.0, 2.0 * std::fabs(K));
    double grid_min = std::numeric_limits<double>::infinity();
    for (int j = 0; j <= 4000; ++j) grid_min = std::min(grid_min, step_cost(K - half + j * (2 * half / 4000)));
    INFO("instance " << i << ", p = " << s.p);
    CHECK(grid_min >= best * (1 - 1e-12));
    CHECK(rel(sol.coefficients.alpha_bar[0], s.q_bar + best) < 1e-12);
  }
}

TEST_CASE("coefficients are positive and gamma_bar grows backward", "[recursion]") {
  auto eng = make_stream(9, StreamTag::Sampling);
  for (ProblemClass cls : {ProblemClass::Additive, ProblemClass::MultState, ProblemClass::HigherMoment}) {
    for (int i = 0; i < 30; ++i) {
      const ProblemSpec spec = hocs_test::random_spec(eng, cls, 1 + i % 3, 1 + i % 3);
      const Solution sol = solve(spec);
      for (double a : sol.coefficients.alpha_bar) CHECK(a > 0.0);
      for (double a : *sol.coefficients.alpha) CHECK(a > 0.0);
      if (sol.coefficients.gamma_bar) {
        const auto& g = *sol.coefficients.gamma_bar;
        for (std::size_t k = 0; k + 1 < g.size(); ++k) CHECK(g[k] >= g[k + 1]);
        CHECK(g.back() == 0.0);
      }
      CHECK(sol.coefficients.alpha_bar.back() == spec.cost.q_bar_terminal);
      CHECK(sol.coefficients.alpha->back() == spec.cost.q_terminal);
    }
  }
}

TEST_CASE("riccati reduction", "[recursion]") {
  auto eng = make_stream(10, StreamTag::Sampling);
  for (int i = 0; i < 50; ++i) {
    const ProblemSpec spec = hocs_test::random_spec(eng, ProblemClass::Deterministic, 1);
    const auto a = solve(spec).coefficients.alpha_bar;
    const auto b = riccati_lqr(spec).alpha_bar;
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(rel(a[k], b[k]) < 1e-12);
  }
  ScalarProblem zero;
  zero.n_steps = 3;
  zero.q_bar = zero.q_bar_terminal = 0.0;
  ValidationOptions relaxed;
  relaxed.allow_zero_weights = true;
  for (double a : riccati_lqr(zero.build(), relaxed).alpha_bar) CHECK(a == 0.0);
  CHECK_THROWS_AS(riccati_lqr(example1_config(2).problem), Error);
}

TEST_CASE("uncontrollable steps", "[recursion]") {
  ProblemSpec spec = example1_config(2).problem;
  spec.mean_dyn.b_bar[2] = 0.0;
  spec.dev_dyn.b[2] = 0.0;
  SolveOptions opts;
  opts.validation.allow_uncontrollable_steps = true;
  const Solution sol = solve(spec, opts);
  CHECK(sol.gains.k_mean[2] == 0.0);
  CHECK(sol.coefficients.alpha_bar[2] ==
        spec.cost.q_bar[2] + sol.coefficients.alpha_bar[3] * ipow(spec.mean_dyn.a_bar[2], 4));
  CHECK_THROWS_AS(solve(spec), Error);
}

TEST_CASE("solver errors", "[recursion]") {
  SECTION("invalid spec") {
    ProblemSpec spec = example1_config(1).problem;
    spec.cost.r_bar[0] = -1.0;
    try {
      (void)solve(spec);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::InvalidSpec);
    }
  }
  SECTION("class mismatch") {
    CHECK_THROWS_AS(solve_additive(example1_config(1).problem), Error);
  }
  SECTION("denominator") {
    try {
      (void)detail::power_step(1.0, 1.0, 1.0, -1.0, 1.0, 1.0, 1.0, 2, 0, "mean");
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DenominatorNotPositive);
    }
    try {
      (void)detail::quadratic_step(1.0, 1.0, 1.0, -2.0, 1.0, 0.0, 0);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DenominatorNotPositive);
    }
  }
  SECTION("non-positive coefficient") {
    try {
      detail::require_coefficient(-1e-3, "alpha", 3, false);
      FAIL("no throw");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveCoefficient);
    }
  }
}

TEST_CASE("alpha and gamma_bar do not depend on p", "[recursion]") {
  const Solution a = solve(example2_config(1).problem), b = solve(example2_config(3).problem);
  CHECK(*a.coefficients.alpha == *b.coefficients.alpha);
  CHECK(*a.coefficients.gamma_bar == *b.coefficients.gamma_bar);
  const Solution c = solve(example3_config(1).problem), d = solve(example3_config(2).problem);
  CHECK(*c.coefficients.alpha == *d.coefficients.alpha);
}

TEST_CASE("example 1 alpha_bar decreases toward the terminal step", "[recursion]") {
  for (int p = 1; p <= 3; ++p) {
    const auto& ab = solve(example1_config(p).problem).coefficients.alpha_bar;
    for (std::size_t k = 0; k + 1 < ab.size(); ++k) CHECK(ab[k] >= ab[k + 1]);
  }
}
