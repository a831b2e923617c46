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
using Catch::Matchers::WithinRel;
using hocs_test::rel;

TEST_CASE("broadcast repeats scalars and passes sequences through", "[model]") {
  CHECK(broadcast(3.0, Horizon{6}) == Sequence{3, 3, 3, 3, 3, 3});
  CHECK(broadcast(Sequence{1, 2, 3}, Horizon{3}) == Sequence{1, 2, 3});
  CHECK(broadcast(Sequence{7}, Horizon{2}) == Sequence{7, 7});

  const Sequence s{0.5, -1.0, 2.0, 4.0};
  CHECK(broadcast(broadcast(s, Horizon{4}), Horizon{4}) == s);
}

TEST_CASE("broadcast rejects other lengths", "[model]") {
  try {
    (void)broadcast(Sequence{1, 2}, Horizon{3});
    FAIL("no throw");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::LengthMismatch);
  }
}

TEST_CASE("signed_root", "[model]") {
  CHECK(signed_root(8.0, 3) == 2.0);
  CHECK(signed_root(-27.0, 3) == -3.0);
  CHECK(signed_root(7.5, 1) == 7.5);
  const double r = signed_root(5.0, 5);
  CHECK_THAT(r, WithinRel(1.37973, 1e-5));
  CHECK(rel(ipow(r, 5), 5.0) < 1e-12);
  CHECK_THROWS_AS(signed_root(4.0, 2), Error);
  CHECK_THROWS_AS(signed_root(4.0, 0), Error);
}

TEST_CASE("signed_root inverts odd powers over twelve decades", "[model]") {
  auto eng = make_stream(11, StreamTag::Sampling);
  std::uniform_real_distribution<double> expo(-6.0, 6.0);
  std::uniform_int_distribution<int> deg(0, 4);
  for (int i = 0; i < 2000; ++i) {
    const double x = (i % 2 ? -1.0 : 1.0) * std::pow(10.0, expo(eng));
    const int n = 2 * deg(eng) + 1;
    const double r = signed_root(x, n);
    INFO("x = " << x << ", n = " << n);
    CHECK(rel(ipow(r, n), x) < 1e-12);
  }
}

TEST_CASE("ipow and double factorials", "[model]") {
  CHECK(ipow(2.0, 10) == 1024.0);
  CHECK(ipow(-3.0, 3) == -27.0);
  CHECK(ipow(5.0, 0) == 1.0);
  CHECK(double_factorial_odd(0) == 1.0);
  CHECK(double_factorial_odd(1) == 1.0);
  CHECK(double_factorial_odd(2) == 3.0);
  CHECK(double_factorial_odd(3) == 15.0);
  CHECK(double_factorial_odd(4) == 105.0);
}

TEST_CASE("Gaussian even moments match quadrature", "[model]") {
  for (double sigma : {0.3, 1.0, 2.5}) {
    const NoiseSpec noise(NoiseKind::Additive, GaussianNoise{sigma});
    for (int j = 1; j <= 4; ++j) {
      const int order = 2 * j;
      const double quad = hocs_test::simpson(
          [&](double x) { return ipow(x, order) * hocs_test::normal_pdf(x, sigma); }, -14 * sigma, 14 * sigma, 20000);
      INFO("sigma = " << sigma << ", order = " << order);
      CHECK(rel(noise.even_moment(order), quad) < 1e-8);
    }
  }
  const NoiseSpec unit(NoiseKind::MultMeanField, GaussianNoise{1.0});
  CHECK(unit.even_moment(2) == 1.0);
  CHECK(unit.even_moment(4) == 3.0);
  CHECK(unit.even_moment(6) == 15.0);
}

TEST_CASE("other noise families", "[model]") {
  const NoiseSpec rad(NoiseKind::Additive, RademacherNoise{2.0});
  CHECK(rad.even_moment(2) == 4.0);
  CHECK(rad.even_moment(4) == 16.0);

  const NoiseSpec uni(NoiseKind::Additive, UniformSymmetricNoise{3.0});
  const double quad = hocs_test::simpson([](double x) { return ipow(x, 4) / 6.0; }, -3.0, 3.0, 2000);
  CHECK(rel(uni.even_moment(4), quad) < 1e-12);

  const NoiseSpec none = NoiseSpec::none();
  CHECK(none.even_moment(2) == 0.0);
  CHECK_THROWS_AS(rad.even_moment(3), Error);

  const NoiseSpec over(NoiseKind::Additive, GaussianNoise{1.0}, {{4, 2.5}});
  CHECK(over.even_moment(2) == 1.0);
  CHECK(over.even_moment(4) == 2.5);
}

TEST_CASE("empirical noise is centered and flagged", "[model]") {
  const NoiseSpec already(NoiseKind::Additive, EmpiricalNoise{{-1.0, 1.0}});
  CHECK_FALSE(already.centered());
  CHECK(already.even_moment(2) == 1.0);

  const NoiseSpec shifted(NoiseKind::Additive, EmpiricalNoise{{1.0, 2.0, 3.0, 6.0}});
  CHECK(shifted.centered());
  CHECK(std::fabs(shifted.mean()) < 1e-12);
  // centered samples -2, -1, 0, 3
  CHECK_THAT(shifted.even_moment(2), WithinRel(14.0 / 4.0, 1e-15));
  // the raw samples are what gets serialized
  CHECK(std::get<EmpiricalNoise>(shifted.distribution()).samples == std::vector<double>{1, 2, 3, 6});

  CHECK_THROWS_AS(NoiseSpec(NoiseKind::Additive, EmpiricalNoise{{}}), Error);
}

TEST_CASE("initial law central moments", "[model]") {
  CHECK(InitialLaw::dirac(3.0).central_moment(2) == 0.0);
  CHECK(InitialLaw::dirac(3.0).central_moment(6) == 0.0);
  const InitialLaw g = InitialLaw::gaussian(1.0, 4.0);
  CHECK(g.variance() == 4.0);
  CHECK_THAT(g.central_moment(4), WithinRel(48.0, 1e-15));
  const InitialLaw e = InitialLaw::empirical({15.0, 15.6});
  CHECK_THAT(e.mean, WithinRel(15.3, 1e-15));
  CHECK_THAT(e.variance(), WithinRel(0.09, 1e-12));
  CHECK_THROWS_AS(g.central_moment(3), Error);
}

TEST_CASE("ScalarProblem builds full-length sequences", "[model]") {
  ScalarProblem s;
  s.n_steps = 4;
  s.a_bar = 2.0;
  s.b = 0.5;
  const ProblemSpec spec = s.build();
  CHECK(spec.mean_dyn.a_bar == Sequence(4, 2.0));
  CHECK(spec.dev_dyn.a == Sequence(4, 2.0));
  CHECK(spec.dev_dyn.b == Sequence(4, 0.5));
  CHECK(spec.cost.q.size() == 4);
}

namespace {

ProblemSpec example1() { return example1_config(2).problem; }

CheckStatus status_of(const ValidationReport& r, const char* name) {
  const CheckResult* c = r.find(name);
  REQUIRE(c != nullptr);
  return c->status;
}

}  // namespace

TEST_CASE("validate passes the deterministic example", "[model]") {
  const ValidationReport r = validate(example1());
  CHECK(r.ok());
  for (const auto& c : r.checks) {
    INFO(c.name << ": " << c.detail);
    CHECK(c.status != CheckStatus::Fail);
  }
  CHECK(status_of(r, check_names::kMeanDenominator) == CheckStatus::Deferred);
  CHECK(r.find(check_names::kDevDenominator) == nullptr);

  const ValidationReport additive = validate(example2_config(1).problem);
  CHECK(status_of(additive, check_names::kDevDenominator) == CheckStatus::Deferred);
}

TEST_CASE("validate reports failures without throwing", "[model]") {
  SECTION("zero control weight") {
    ProblemSpec s = example1();
    s.cost.r_bar[2] = 0.0;
    const ValidationReport r = validate(s);
    CHECK_FALSE(r.ok());
    CHECK(status_of(r, check_names::kWeights) == CheckStatus::Fail);
    ValidationOptions relaxed;
    relaxed.allow_zero_weights = true;
    CHECK(validate(s, relaxed).ok());
  }
  SECTION("negative weight is never accepted") {
    ProblemSpec s = example1();
    s.cost.q_bar[0] = -1.0;
    ValidationOptions relaxed;
    relaxed.allow_zero_weights = true;
    CHECK(status_of(validate(s, relaxed), check_names::kWeights) == CheckStatus::Fail);
  }
  SECTION("class and noise disagree") {
    ProblemSpec s = example2_config(1).problem;
    s.noise = NoiseSpec::none();
    CHECK(status_of(validate(s), check_names::kCompatibility) == CheckStatus::Fail);
  }
  SECTION("length mismatch") {
    ProblemSpec s = example1();
    s.cost.q_bar.pop_back();
    CHECK(status_of(validate(s), check_names::kLengths) == CheckStatus::Fail);
  }
  SECTION("non-finite dynamics") {
    ProblemSpec s = example1();
    s.mean_dyn.a_bar[1] = std::numeric_limits<double>::infinity();
    CHECK(status_of(validate(s), check_names::kDynamics) == CheckStatus::Fail);
  }
  SECTION("zero b_bar needs the uncontrollable-step mode") {
    ProblemSpec s = example1();
    s.mean_dyn.b_bar[3] = 0.0;
    s.dev_dyn.b[3] = 0.0;
    CHECK(status_of(validate(s), check_names::kControllable) == CheckStatus::Fail);
    ValidationOptions relaxed;
    relaxed.allow_uncontrollable_steps = true;
    CHECK(validate(s, relaxed).ok());
  }
  SECTION("moment power other than the variance outside the higher-moment class") {
    ProblemSpec s = example3_config(1).problem;
    s.cost.o = 2;
    CHECK(status_of(validate(s), check_names::kPowers) == CheckStatus::Fail);
  }
  SECTION("distinct deviation dynamics outside the higher-moment class") {
    ProblemSpec s = example2_config(1).problem;
    s.dev_dyn.a[0] = 0.5;
    CHECK(status_of(validate(s), check_names::kSharedDynamics) == CheckStatus::Fail);
    CHECK(validate(example4_config(2).problem).ok());
  }
  SECTION("inconsistent initial law") {
    ProblemSpec s = example3_config(1).problem;
    s.initial.mean = 15.0;
    CHECK(status_of(validate(s), check_names::kInitial) == CheckStatus::Fail);
  }
  SECTION("stochastic classes need positive deviation weights") {
    ProblemSpec s = example2_config(1).problem;
    s.cost.r[4] = 0.0;
    CHECK(status_of(validate(s), check_names::kWeights) == CheckStatus::Fail);
  }
}

TEST_CASE("validate is pure", "[model]") {
  for (int id = 1; id <= 4; ++id) {
    const ProblemSpec s = example_configs(id).front().config.problem;
    CHECK(validate(s) == validate(s));
    CHECK(validate(s).ok());
  }
}

TEST_CASE("validate flags centered empirical noise", "[model]") {
  ProblemSpec s = example2_config(1).problem;
  s.noise = NoiseSpec(NoiseKind::Additive, EmpiricalNoise{{0.0, 1.0}});
  const ValidationReport r = validate(s);
  CHECK(r.noise_centered);
  CHECK(r.ok());
}
