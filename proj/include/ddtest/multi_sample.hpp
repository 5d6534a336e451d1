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

#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "ddtest/depth.hpp"
#include "ddtest/error.hpp"
#include "ddtest/quality.hpp"
#include "ddtest/sample_set.hpp"
#include "ddtest/two_sample.hpp"

namespace ddtest {

/// All k(k-1) directed quality indices; q(i, j) = Q(F^(i), F^(j)) with group
/// i as reference. The diagonal is unused.
struct QualityMatrix {
  std::size_t k = 0;
  std::vector<std::size_t> sizes;
  std::vector<std::uint64_t> counts;  // k*k, row-major

  double q(std::size_t i, std::size_t j) const {
    return static_cast<double>(counts[i * k + j]) /
           (static_cast<double>(sizes[i]) * static_cast<double>(sizes[j]));
  }

  template <class Fn>
  void for_each_pair(Fn&& fn) const {
    for (std::size_t i = 0; i < k; ++i) {
      for (std::size_t j = 0; j < k; ++j) {
        if (i != j) fn(i, j, q(i, j));
      }
    }
  }

  QualityPair pair(std::size_t i, std::size_t j) const {
    return make_quality_pair(counts[i * k + j], counts[j * k + i], sizes[i], sizes[j]);
  }
};

inline QualityMatrix quality_matrix(const DepthTable& table) {
  QualityMatrix qm;
  qm.k = table.group_count();
  qm.sizes = table.sizes();
  qm.counts.assign(qm.k * qm.k, 0);
  for (std::size_t i = 0; i < qm.k; ++i) {
    for (std::size_t j = 0; j < qm.k; ++j) {
      if (i != j) qm.counts[i * qm.k + j] = table.quality_count(i, j);
    }
  }
  return qm;
}

inline QualityMatrix quality_matrix(const std::vector<SampleSet>& groups, const DepthKind& kind) {
  if (groups.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two groups");
  return quality_matrix(DepthTable(groups, kind));
}

/// k-sample minimum statistic: the largest standardized (1/2 - Q) over all
/// ordered pairs.
inline double min_statistic_k(const QualityMatrix& qm) {
  double best = -std::numeric_limits<double>::infinity();
  qm.for_each_pair([&](std::size_t i, std::size_t j, double q) {
    best = std::max(best, (0.5 - q) / std::sqrt(quality_scale(qm.sizes[i], qm.sizes[j])));
  });
  return best;
}

inline double product_statistic_k(const QualityMatrix& qm) {
  double prod = 1.0;
  qm.for_each_pair([&](std::size_t, std::size_t, double q) { prod *= q; });
  return prod;
}

inline double sum_statistic_k(const QualityMatrix& qm) {
  double sum = 0.0;
  qm.for_each_pair([&](std::size_t, std::size_t, double q) { sum += q; });
  return sum;
}

/// DbR with every group as a reference (t = k). Only the two-group form is
/// standard; larger k is an extension.
inline double dbr_statistic_k(const std::vector<SampleSet>& groups, const DepthKind& kind) {
  if (groups.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two groups");
  return dbr_statistic(DepthTable(groups, kind));
}

}  // namespace ddtest
