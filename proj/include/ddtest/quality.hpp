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
#include <cstdint>
#include <span>
#include <vector>

#include "ddtest/depth.hpp"
#include "ddtest/error.hpp"
#include "ddtest/sample_set.hpp"

namespace ddtest {

/// The two directed quality indices Q(F_m, G_n) and Q(G_n, F_m). Each is
/// stored as an exact integer count over m*n comparisons as well.
struct QualityPair {
  double q_fg = 0.0;
  double q_gf = 0.0;
  std::size_t m = 0;
  std::size_t n = 0;
  std::uint64_t count_fg = 0;
  std::uint64_t count_gf = 0;

  bool operator==(const QualityPair&) const = default;
};

/// Sum over targets t of #{r in reference : r <= t}.
inline std::uint64_t count_at_most(std::span<const double> reference, std::span<const double> targets) {
  std::vector<double> sorted(reference.begin(), reference.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t total = 0;
  for (double t : targets) {
    total += static_cast<std::uint64_t>(std::upper_bound(sorted.begin(), sorted.end(), t) - sorted.begin());
  }
  return total;
}

/// Depths of every group measured against every group taken as reference:
/// depths(i, j) holds D(group_j rows; F^(i)).
class DepthTable {
 public:
  DepthTable(const std::vector<SampleSet>& groups, const DepthKind& kind)
      : DepthTable(groups, DepthFitter(kind, groups.empty() ? 1 : groups.front().dim())) {}

  DepthTable(const std::vector<SampleSet>& groups, const DepthFitter& fitter) : k_(groups.size()) {
    if (groups.empty()) throw Error(ErrorCode::invalid_argument, "no groups");
    for (const auto& g : groups) require_same_dim(groups.front(), g);
    sizes_ = sizes_of(groups);
    table_.resize(k_ * k_);
    for (std::size_t i = 0; i < k_; ++i) {
      const DepthFunction f = fitter.fit(groups[i]);
      for (std::size_t j = 0; j < k_; ++j) f.evaluate_into(groups[j], table_[i * k_ + j]);
    }
  }

  std::size_t group_count() const { return k_; }
  const std::vector<std::size_t>& sizes() const { return sizes_; }
  const std::vector<double>& depths(std::size_t reference, std::size_t target) const {
    return table_[reference * k_ + target];
  }

  /// Count behind Q(F^(i), F^(j)).
  std::uint64_t quality_count(std::size_t reference, std::size_t target) const {
    return count_at_most(depths(reference, reference), depths(reference, target));
  }

 private:
  std::size_t k_;
  std::vector<std::size_t> sizes_;
  std::vector<std::vector<double>> table_;
};

inline QualityPair make_quality_pair(std::uint64_t count_fg, std::uint64_t count_gf, std::size_t m, std::size_t n) {
  const double denom = static_cast<double>(m) * static_cast<double>(n);
  return {static_cast<double>(count_fg) / denom, static_cast<double>(count_gf) / denom, m, n, count_fg, count_gf};
}

/// Q(F_m, G_n) = (1/n) sum_i #{j : D(x_j; F_m) <= D(y_i; F_m)} / m, and the
/// same with the roles of the samples swapped.
inline QualityPair quality(const SampleSet& x, const SampleSet& y, const DepthKind& kind) {
  const DepthTable table({x, y}, kind);
  return make_quality_pair(table.quality_count(0, 1), table.quality_count(1, 0), x.size(), y.size());
}

/// Plain double loop over all (reference, target) pairs. Only meant as a
/// check on quality().
inline QualityPair quality_brute_oracle(const SampleSet& x, const SampleSet& y, const DepthKind& kind) {
  constexpr std::size_t kCap = 64;
  if (x.size() > kCap || y.size() > kCap) {
    throw Error(ErrorCode::size_limit, "brute-force oracle is capped at 64 rows per sample");
  }
  require_same_dim(x, y);
  auto directed = [&](const SampleSet& ref, const SampleSet& target) {
    const auto ref_depth = depth(ref, ref, kind).values;
    const auto target_depth = depth(target, ref, kind).values;
    std::uint64_t count = 0;
    for (double t : target_depth) {
      for (double r : ref_depth) {
        if (r <= t) ++count;
      }
    }
    return count;
  };
  return make_quality_pair(directed(x, y), directed(y, x), x.size(), y.size());
}

}  // namespace ddtest
