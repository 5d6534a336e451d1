// Copyright 2026 The ddtest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Two bivariate normal samples that differ in scale, tested three ways.
#include <cstdio>

#include "ddtest/ddtest.hpp"

int main() {
  using namespace ddtest;

  ScenarioSpec spec;
  spec.scenario = Scenario::scale_shift;
  spec.seed = 7;
  const auto groups = sample_scenario(spec, 200, 0);
  const SampleSet& x = groups[0];
  const SampleSet& y = groups[1];

  const auto q = quality(x, y, DepthKind::mahalanobis());
  std::printf("Q(F,G) = %.4f  Q(G,F) = %.4f\n", q.q_fg, q.q_gf);

  CalibrationSpec cal;
  cal.replications = 499;
  cal.seed = 11;
  const auto outcomes =
      permutation_test(groups, {Statistic::min, Statistic::product, Statistic::sum, Statistic::dbr},
                       DepthKind::mahalanobis(), cal);
  for (const auto& o : outcomes) {
    std::printf("%-8s statistic %10.5f  permutation p %.4f\n", o.statistic_name.c_str(), o.statistic, *o.p_value);
  }
  std::printf("min      half-normal p %.4f\n", half_normal_pvalue(outcomes[0].statistic));

  const auto wilks = manova(x, y, ManovaTest::wilks);
  std::printf("wilks    statistic %10.5f  F p %.4f\n", wilks.statistic, *wilks.p_value);

  const auto curve = scale_curve(x, {0.1, 0.3, 0.5, 0.7, 0.9}, DepthKind::mahalanobis());
  for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
    std::printf("alpha %.1f  trimmed-region area %.4f\n", curve.alphas[i], curve.volumes[i]);
  }
}
