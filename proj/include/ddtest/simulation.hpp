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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddtest/calibration.hpp"
#include "ddtest/depth.hpp"
#include "ddtest/error.hpp"
#include "ddtest/multi_sample.hpp"
#include "ddtest/parallel.hpp"
#include "ddtest/random.hpp"
#include "ddtest/sample_set.hpp"
#include "ddtest/special_functions.hpp"
#include "ddtest/statistic.hpp"

namespace ddtest {

enum class Scenario { null, scale_shift, mean_shift, both_shift, three_group_a, three_group_b };

enum class SizeRule { equal, half };

inline std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::null: return "null";
    case Scenario::scale_shift: return "scale_shift";
    case Scenario::mean_shift: return "mean_shift";
    case Scenario::both_shift: return "both_shift";
    case Scenario::three_group_a: return "three_group_a";
    case Scenario::three_group_b: return "three_group_b";
  }
  return "?";
}

inline Scenario parse_scenario(const std::string& name) {
  for (auto s : {Scenario::null, Scenario::scale_shift, Scenario::mean_shift, Scenario::both_shift,
                 Scenario::three_group_a, Scenario::three_group_b}) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::invalid_argument, "unknown scenario '" + name + "'");
}

inline std::string to_string(SizeRule r) { return r == SizeRule::equal ? "equal" : "half"; }

inline SizeRule parse_size_rule(const std::string& name) {
  if (name == "equal") return SizeRule::equal;
  if (name == "half") return SizeRule::half;
  throw Error(ErrorCode::invalid_argument, "unknown size rule '" + name + "'");
}

struct ScenarioSpec {
  Scenario scenario = Scenario::null;
  std::vector<std::size_t> m_grid = {100, 200, 300, 400, 500};
  SizeRule size_rule = SizeRule::equal;
  DepthKind depth = DepthKind::mahalanobis();
  std::uint64_t replications = 500;
  double alpha_level = 0.05;
  std::uint64_t seed = 0;
  unsigned threads = 0;
  /// Normal draws behind the asymptotic k-sample critical value.
  std::uint64_t asymptotic_draws = 200000;

  void validate() const {
    if (m_grid.empty()) throw Error(ErrorCode::invalid_argument, "m grid is empty");
    for (auto m : m_grid) {
      if (m < 4) throw Error(ErrorCode::invalid_argument, "grid sizes must be at least 4");
    }
    if (!(alpha_level > 0.0 && alpha_level < 1.0)) throw Error(ErrorCode::invalid_argument, "alpha level must lie in (0,1)");
    if (replications < 1) throw Error(ErrorCode::invalid_argument, "replications must be at least 1");
  }
};

/// A bivariate normal N(mean, cov) stored through its lower Cholesky factor.
struct BivariateNormal {
  Eigen::Vector2d mean = Eigen::Vector2d::Zero();
  Eigen::Matrix2d factor = Eigen::Matrix2d::Identity();

  static BivariateNormal with(double mean_shift, double correlation) {
    BivariateNormal g;
    g.mean = Eigen::Vector2d::Constant(mean_shift);
    Eigen::Matrix2d cov;
    cov << 1.0, correlation, correlation, 1.0;
    g.factor = cov.llt().matrixL();
    return g;
  }
};

/// Group distributions: the first group is always N(0, I); off-diagonal
/// entries shift the covariance to I + c * [[0,1],[1,0]].
inline std::vector<BivariateNormal> scenario_distributions(Scenario s) {
  const auto standard = BivariateNormal::with(0.0, 0.0);
  switch (s) {
    case Scenario::null: return {standard, standard};
    case Scenario::scale_shift: return {standard, BivariateNormal::with(0.0, 0.5)};
    case Scenario::mean_shift: return {standard, BivariateNormal::with(0.3, 0.0)};
    case Scenario::both_shift: return {standard, BivariateNormal::with(0.2, 0.4)};
    case Scenario::three_group_a: return {standard, standard, BivariateNormal::with(0.0, 0.5)};
    case Scenario::three_group_b: return {standard, BivariateNormal::with(0.3, 0.0), BivariateNormal::with(0.0, 0.5)};
  }
  throw Error(ErrorCode::invalid_argument, "unknown scenario");
}

/// Group sizes for grid point m: (m, m[, m]) or (m, m/2[, m/2]).
inline std::vector<std::size_t> scenario_sizes(Scenario s, SizeRule rule, std::size_t m) {
  const std::size_t groups = scenario_distributions(s).size();
  const std::size_t other = rule == SizeRule::equal ? m : m / 2;
  std::vector<std::size_t> sizes(groups, other);
  sizes[0] = m;
  return sizes;
}

namespace stream_tag {
inline constexpr std::uint64_t scenario = 0x616c74ull;
inline constexpr std::uint64_t null_calibration = 0x6e756c6cull;
}  // namespace stream_tag

namespace detail {

inline std::vector<SampleSet> draw_groups(const std::vector<BivariateNormal>& dists, const std::vector<std::size_t>& sizes,
                                          std::uint64_t seed, std::uint64_t stream) {
  RandomStream rng(seed, stream);
  std::vector<SampleSet> groups;
  groups.reserve(dists.size());
  for (std::size_t g = 0; g < dists.size(); ++g) {
    Matrix data(static_cast<Eigen::Index>(sizes[g]), 2);
    for (std::size_t i = 0; i < sizes[g]; ++i) {
      Eigen::Vector2d z;
      z(0) = rng.normal();
      z(1) = rng.normal();
      data.row(static_cast<Eigen::Index>(i)) = (dists[g].mean + dists[g].factor * z).transpose();
    }
    groups.emplace_back(std::move(data));
  }
  return groups;
}

}  // namespace detail

/// One replication of the scenario at grid point m; a pure function of
/// (seed, m, replication).
inline std::vector<SampleSet> sample_scenario(const ScenarioSpec& spec, std::size_t m, std::uint64_t replication) {
  return detail::draw_groups(scenario_distributions(spec.scenario), scenario_sizes(spec.scenario, spec.size_rule, m),
                             spec.seed, stream_id({stream_tag::scenario, m, replication}));
}

/// The matching null draw (every group N(0, I), same sizes) from a stream
/// disjoint from sample_scenario's.
inline std::vector<SampleSet> sample_null(const ScenarioSpec& spec, std::size_t m, std::uint64_t replication) {
  const auto sizes = scenario_sizes(spec.scenario, spec.size_rule, m);
  const std::vector<BivariateNormal> dists(sizes.size(), BivariateNormal::with(0.0, 0.0));
  return detail::draw_groups(dists, sizes, spec.seed, stream_id({stream_tag::null_calibration, m, replication}));
}

struct Type1Row {
  std::size_t m = 0;
  std::size_t n = 0;
  double quantile = 0.0;        // empirical (1 - alpha) quantile of the minimum statistic
  double reference = 0.0;       // half-normal (1 - alpha) quantile, 1.96 at alpha = 0.05
  double rejection_rate = 0.0;  // fraction of replications above the reference
};

/// Empirical upper quantiles of the minimum statistic under the null.
inline std::vector<Type1Row> type1_quantiles(const ScenarioSpec& spec) {
  spec.validate();
  if (spec.scenario != Scenario::null) throw Error(ErrorCode::invalid_argument, "type-I quantiles need the null scenario");
  const double reference = normal_quantile(1.0 - spec.alpha_level / 2.0);
  const StatisticEvaluator evaluate({Statistic::min}, spec.depth, 2);
  std::vector<Type1Row> rows;
  for (auto m : spec.m_grid) {
    std::vector<double> values(spec.replications);
    parallel_for(values.size(), spec.threads, [&](std::size_t r) { values[r] = evaluate(sample_scenario(spec, m, r))[0]; });
    Type1Row row;
    row.m = m;
    row.n = scenario_sizes(spec.scenario, spec.size_rule, m)[1];
    row.reference = reference;
    row.quantile = empirical_quantile(values, 1.0 - spec.alpha_level);
    std::size_t above = 0;
    for (double v : values) above += v > reference ? 1 : 0;
    row.rejection_rate = static_cast<double>(above) / static_cast<double>(values.size());
    rows.push_back(row);
  }
  return rows;
}

struct PowerRow {
  std::string statistic;
  std::size_t m = 0;
  std::size_t n = 0;
  double rate = 0.0;
  double critical_value = 0.0;
  Tail tail = Tail::upper;
};

struct PowerTable {
  std::vector<PowerRow> rows;
  ScenarioSpec spec;

  const PowerRow& at(const std::string& statistic, std::size_t m) const {
    for (const auto& r : rows) {
      if (r.statistic == statistic && r.m == m) return r;
    }
    throw Error(ErrorCode::invalid_argument, "no power row for " + statistic);
  }
};

/// Rejection rates under the scenario with critical values taken from a
/// fresh null run of the same sizes: upper (1 - alpha) quantile, or lower
/// alpha quantile for product and sum. The minimum statistic also gets a
/// "min_asymptotic" row that uses its limiting-law cutoff.
inline PowerTable power_table(const ScenarioSpec& spec, const std::vector<Statistic>& statistics) {
  spec.validate();
  const StatisticEvaluator evaluate(statistics, spec.depth, 2);
  const std::size_t k = scenario_distributions(spec.scenario).size();
  evaluate.check_applicable(k, 2);
  PowerTable table;
  table.spec = spec;
  const std::size_t reps = spec.replications;
  for (auto m : spec.m_grid) {
    const auto sizes = scenario_sizes(spec.scenario, spec.size_rule, m);
    std::vector<std::vector<double>> null_values(statistics.size(), std::vector<double>(reps));
    std::vector<std::vector<double>> alt_values(statistics.size(), std::vector<double>(reps));
    parallel_for(2 * reps, spec.threads, [&](std::size_t job) {
      const bool is_null = job < reps;
      const std::size_t r = is_null ? job : job - reps;
      const auto values = evaluate(is_null ? sample_null(spec, m, r) : sample_scenario(spec, m, r));
      auto& target = is_null ? null_values : alt_values;
      for (std::size_t s = 0; s < values.size(); ++s) target[s][r] = values[s];
    });
    for (std::size_t s = 0; s < statistics.size(); ++s) {
      PowerRow row;
      row.statistic = to_string(statistics[s]);
      row.m = m;
      row.n = sizes[1];
      row.tail = natural_tail(statistics[s]);
      const bool upper = row.tail == Tail::upper;
      row.critical_value = empirical_quantile(null_values[s], upper ? 1.0 - spec.alpha_level : spec.alpha_level);
      std::size_t rejected = 0;
      for (double v : alt_values[s]) rejected += (upper ? v > row.critical_value : v < row.critical_value) ? 1 : 0;
      row.rate = static_cast<double>(rejected) / static_cast<double>(reps);
      table.rows.push_back(row);
      if (statistics[s] == Statistic::min) {
        PowerRow asym = row;
        asym.statistic = "min_asymptotic";
        asym.critical_value = k == 2 ? normal_quantile(1.0 - spec.alpha_level / 2.0)
                                     : mc_asymptotic_min_quantile(1.0 - spec.alpha_level, sizes,
                                                                  {CalibrationMethod::monte_carlo, spec.asymptotic_draws,
                                                                   spec.seed, std::nullopt, spec.threads});
        rejected = 0;
        for (double v : alt_values[s]) rejected += v > asym.critical_value ? 1 : 0;
        asym.rate = static_cast<double>(rejected) / static_cast<double>(reps);
        table.rows.push_back(asym);
      }
    }
  }
  return table;
}

}  // namespace ddtest
