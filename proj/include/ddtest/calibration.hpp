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

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <vector>

#include "ddtest/error.hpp"
#include "ddtest/parallel.hpp"
#include "ddtest/random.hpp"
#include "ddtest/sample_set.hpp"
#include "ddtest/special_functions.hpp"
#include "ddtest/statistic.hpp"
#include "ddtest/two_sample.hpp"

namespace ddtest {

/// How a statistic is turned into a p-value. `tail` overrides the
/// statistic's natural rejection tail; `threads` = 0 uses every core and never
/// changes the result.
struct CalibrationSpec {
  CalibrationMethod method = CalibrationMethod::permutation;
  std::uint64_t replications = 999;
  std::uint64_t seed = 0;
  std::optional<Tail> tail;
  unsigned threads = 0;
};

/// 1-based rank ceil(level * count) of the empirical `level` quantile, kept
/// within [1, count] and immune to round-off in the product.
inline std::size_t quantile_rank(double level, std::size_t count) {
  const double scaled = level * static_cast<double>(count);
  const auto rank = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
  return std::clamp<std::size_t>(rank, 1, count);
}

/// Empirical `level` quantile as the order statistic at quantile_rank.
inline double empirical_quantile(std::vector<double> values, double level) {
  if (values.empty()) throw Error(ErrorCode::invalid_argument, "quantile of an empty sample");
  const std::size_t idx = quantile_rank(level, values.size()) - 1;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(idx), values.end());
  return values[idx];
}

namespace stream_tag {
inline constexpr std::uint64_t permutation = 0x7065726dull;
inline constexpr std::uint64_t asymptotic_min = 0x61736d6eull;
}  // namespace stream_tag

/// Weights of the limiting pair combinations c_ij Z_i + c~_ij Z_j, i < j.
struct PairCoefficients {
  std::size_t k = 0;
  std::vector<double> c;        // k*k, row-major, upper triangle used
  std::vector<double> c_tilde;  // k*k, row-major, upper triangle used

  static PairCoefficients from_sizes(const std::vector<std::size_t>& sizes) {
    if (sizes.size() < 2) throw Error(ErrorCode::domain_error, "need at least two group sizes");
    for (auto s : sizes) {
      if (s == 0) throw Error(ErrorCode::domain_error, "group sizes must be positive");
    }
    PairCoefficients pc;
    pc.k = sizes.size();
    pc.c.assign(pc.k * pc.k, 0.0);
    pc.c_tilde.assign(pc.k * pc.k, 0.0);
    for (std::size_t i = 0; i < pc.k; ++i) {
      for (std::size_t j = i + 1; j < pc.k; ++j) {
        const double ni = static_cast<double>(sizes[i]);
        const double nj = static_cast<double>(sizes[j]);
        const double norm = std::sqrt(1.0 / ni + 1.0 / nj);
        pc.c[i * pc.k + j] = 1.0 / (std::sqrt(ni) * norm);
        pc.c_tilde[i * pc.k + j] = 1.0 / (std::sqrt(nj) * norm);
      }
    }
    return pc;
  }

  double combination(std::size_t i, std::size_t j, const std::vector<double>& z) const {
    return c[i * k + j] * z[i] + c_tilde[i * k + j] * z[j];
  }
};

/// P(|N(0,1)| > x).
inline double half_normal_pvalue(double x) {
  if (!std::isfinite(x)) throw Error(ErrorCode::domain_error, "half-normal p-value needs a finite statistic");
  return std::min(1.0, 2.0 * normal_sf(std::max(x, 0.0)));
}

/// P(chi^2_1 > x).
inline double chi2_1_pvalue(double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::domain_error, "chi-square statistic must be non-negative");
  return std::min(1.0, std::erfc(std::sqrt(x / 2.0)));
}

/// Add-one permutation p-value from the permuted statistic values.
inline double permutation_p(double observed, const std::vector<double>& permuted, Tail tail) {
  // Ties up to round-off count as "at least as extreme".
  const double tol = 1e-12 * std::max(1.0, std::abs(observed));
  std::uint64_t extreme = 0;
  for (double v : permuted) {
    if (tail == Tail::upper ? v >= observed - tol : v <= observed + tol) ++extreme;
  }
  return (1.0 + static_cast<double>(extreme)) / (static_cast<double>(permuted.size()) + 1.0);
}

/// The r-th uniformly random re-partition of the pooled rows into groups of
/// the original sizes.
inline std::vector<SampleSet> permuted_groups(const Matrix& pooled, const std::vector<std::size_t>& sizes,
                                              std::uint64_t seed, std::uint64_t replication) {
  std::vector<Eigen::Index> order(static_cast<std::size_t>(pooled.rows()));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  RandomStream rng(seed, stream_id({stream_tag::permutation, replication}));
  for (std::size_t i = order.size(); i > 1; --i) {
    std::swap(order[i - 1], order[rng.below(i)]);
  }
  std::vector<SampleSet> groups;
  groups.reserve(sizes.size());
  std::size_t offset = 0;
  for (auto size : sizes) {
    Matrix block(static_cast<Eigen::Index>(size), pooled.cols());
    for (std::size_t r = 0; r < size; ++r) block.row(static_cast<Eigen::Index>(r)) = pooled.row(order[offset + r]);
    groups.emplace_back(std::move(block));
    offset += size;
  }
  return groups;
}

/// Permutation calibration of several statistics over the same B
/// re-partitions. One TestOutcome per statistic, in input order.
inline std::vector<TestOutcome> permutation_test(const std::vector<SampleSet>& groups,
                                                 const std::vector<Statistic>& statistics, const DepthKind& kind,
                                                 const CalibrationSpec& spec) {
  if (groups.size() < 2) throw Error(ErrorCode::invalid_argument, "permutation test needs at least two groups");
  if (spec.replications < 1) throw Error(ErrorCode::invalid_argument, "replications must be at least 1");
  for (const auto& g : groups) require_same_dim(groups.front(), g);
  const StatisticEvaluator evaluate(statistics, kind, groups.front().dim());
  const std::vector<double> observed = evaluate(groups);
  const Matrix pooled = pool(groups);
  const auto sizes = sizes_of(groups);
  const std::size_t b = spec.replications;
  std::vector<std::vector<double>> permuted(statistics.size(), std::vector<double>(b));
  parallel_for(b, spec.threads, [&](std::size_t r) {
    const auto values = evaluate(permuted_groups(pooled, sizes, spec.seed, r));
    for (std::size_t s = 0; s < values.size(); ++s) permuted[s][r] = values[s];
  });
  std::vector<TestOutcome> outcomes;
  for (std::size_t s = 0; s < statistics.size(); ++s) {
    TestOutcome out;
    out.statistic = observed[s];
    out.statistic_name = to_string(statistics[s]);
    out.method = CalibrationMethod::permutation;
    out.p_value = permutation_p(observed[s], permuted[s], spec.tail.value_or(natural_tail(statistics[s])));
    if (uses_depth(statistics[s])) out.depth_kind = kind;
    out.sizes = sizes;
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

inline TestOutcome permutation_pvalue(const std::vector<SampleSet>& groups, Statistic statistic, const DepthKind& kind,
                                      const CalibrationSpec& spec) {
  return permutation_test(groups, {statistic}, kind, spec).front();
}

namespace detail {

/// max over i<j of |c_ij Z_i + c~_ij Z_j| for the r-th normal draw.
inline double pair_combination_max(const PairCoefficients& pc, std::uint64_t seed, std::uint64_t r,
                                   std::vector<double>& z) {
  RandomStream rng(seed, stream_id({stream_tag::asymptotic_min, pc.k, r}));
  for (auto& v : z) v = rng.normal();
  double worst = 0.0;
  for (std::size_t i = 0; i < pc.k; ++i) {
    for (std::size_t j = i + 1; j < pc.k; ++j) worst = std::max(worst, std::abs(pc.combination(i, j, z)));
  }
  return worst;
}

inline constexpr std::size_t kDrawChunk = 4096;

}  // namespace detail

/// Monte-Carlo evaluation of the limiting law of the k-sample minimum
/// statistic: 1 - P(-x <= c_ij Z_i + c~_ij Z_j <= x for all i < j).
inline double mc_asymptotic_min_pvalue(double x, const std::vector<std::size_t>& sizes, const CalibrationSpec& spec) {
  if (!std::isfinite(x)) throw Error(ErrorCode::domain_error, "statistic must be finite");
  const auto pc = PairCoefficients::from_sizes(sizes);
  if (spec.replications < 1) throw Error(ErrorCode::invalid_argument, "replications must be at least 1");
  const std::size_t draws = spec.replications;
  const std::size_t chunks = (draws + detail::kDrawChunk - 1) / detail::kDrawChunk;
  std::vector<std::uint64_t> inside(chunks, 0);
  parallel_for(chunks, spec.threads, [&](std::size_t c) {
    std::vector<double> z(pc.k);
    const std::size_t end = std::min(draws, (c + 1) * detail::kDrawChunk);
    std::uint64_t count = 0;
    for (std::size_t r = c * detail::kDrawChunk; r < end; ++r) {
      if (detail::pair_combination_max(pc, spec.seed, r, z) <= x) ++count;
    }
    inside[c] = count;
  });
  const auto total = std::accumulate(inside.begin(), inside.end(), std::uint64_t{0});
  return 1.0 - static_cast<double>(total) / static_cast<double>(draws);
}

/// The `level` quantile of the same limiting law (order statistic
/// ceil(level * draws)); used as an asymptotic critical value.
inline double mc_asymptotic_min_quantile(double level, const std::vector<std::size_t>& sizes,
                                         const CalibrationSpec& spec) {
  if (!(level > 0.0 && level < 1.0)) throw Error(ErrorCode::domain_error, "quantile level must lie in (0,1)");
  const auto pc = PairCoefficients::from_sizes(sizes);
  std::vector<double> values(spec.replications);
  const std::size_t chunks = (values.size() + detail::kDrawChunk - 1) / detail::kDrawChunk;
  parallel_for(chunks, spec.threads, [&](std::size_t c) {
    std::vector<double> z(pc.k);
    const std::size_t end = std::min(values.size(), (c + 1) * detail::kDrawChunk);
    for (std::size_t r = c * detail::kDrawChunk; r < end; ++r) values[r] = detail::pair_combination_max(pc, spec.seed, r, z);
  });
  return empirical_quantile(std::move(values), level);
}

}  // namespace ddtest
