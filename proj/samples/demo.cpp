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

// Solves the quartic-cost deterministic example, prints the schedules, then
// compares the simulated cost of the mean-field example with its prediction.

#include <cstdio>

#include "hocs/hocs.hpp"

int main() {
  using namespace hocs;

  const RunConfig ex1 = example1_config(2);
  const Solution det = solve(ex1.problem);
  const Sequence x_bar = propagate_mean(ex1.problem, det.gains);
  std::printf(" k  alpha_bar         K_mean            x_bar\n");
  for (std::size_t k = 0; k <= ex1.problem.n(); ++k) {
    std::printf("%2zu  %-16.10g  %-16.10g  %.10g\n", k, det.coefficients.alpha_bar[k],
                k < det.gains.size() ? det.gains.k_mean[k] : 0.0, x_bar[k]);
  }
  std::printf("predicted cost %.17g\n\n", predicted_cost(det.coefficients, ex1.problem.initial));

  const RunConfig ex4 = example4_config(2);
  const Solution mf = solve(ex4.problem);
  const auto ens = simulate_ensemble(ex4.problem, FeedbackPolicy(mf.gains), 20000, 7);
  const CostReport cost = realized_cost(ex4.problem, ens, mf.coefficients);
  std::printf("mean-field example, p = o = 2\n");
  std::printf("  predicted %.10g\n  realized  %.10g +- %.3g\n", cost.predicted, cost.realized_mean,
              cost.realized_stderr);
  return 0;
}
