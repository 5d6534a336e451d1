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
#include <map>
#include <vector>

#include "ddtest/convex_hull.hpp"
#include "ddtest/depth.hpp"
#include "ddtest/error.hpp"
#include "ddtest/sample_set.hpp"

namespace ddtest {

struct ScaleCurve {
  std::vector<double> alphas;
  std::vector<double> volumes;
  DepthKind depth_kind;
};

/// 0.01, 0.02, ..., 0.99.
inline std::vector<double> default_alpha_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
  return grid;
}

namespace detail {

inline Matrix rows_with_depth_at_least(const SampleSet& sample, const std::vector<double>& depths, double alpha) {
  std::vector<Eigen::Index> keep;
  for (std::size_t i = 0; i < depths.size(); ++i) {
    if (depths[i] >= alpha) keep.push_back(static_cast<Eigen::Index>(i));
  }
  Matrix out(static_cast<Eigen::Index>(keep.size()), static_cast<Eigen::Index>(sample.dim()));
  for (std::size_t r = 0; r < keep.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = sample.matrix().row(keep[r]);
  return out;
}

inline void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error(ErrorCode::invalid_argument, "alpha must lie in (0, 1]");
}

}  // namespace detail

/// Rows whose depth with respect to the full sample is at least alpha. The
/// result may be empty, so it is returned as a plain matrix.
inline Matrix trimmed_region_points(const SampleSet& sample, double alpha, const DepthKind& kind) {
  detail::check_alpha(alpha);
  return detail::rows_with_depth_at_least(sample, depth(sample, sample, kind).values, alpha);
}

/// Hull volume of the alpha-trimmed sample for each alpha.
inline ScaleCurve scale_curve(const SampleSet& sample, const std::vector<double>& alphas, const DepthKind& kind,
                              const HullVolumeOptions& hull_options = {}) {
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    detail::check_alpha(alphas[i]);
    if (i > 0 && !(alphas[i] > alphas[i - 1])) throw Error(ErrorCode::invalid_argument, "alphas must be strictly increasing");
  }
  const auto depths = depth(sample, sample, kind).values;
  ScaleCurve curve;
  curve.alphas = alphas;
  curve.depth_kind = kind;
  // Trimmed sets only change when alpha crosses a sample depth; reuse volumes
  // keyed by the number of surviving rows.
  std::map<std::size_t, double> by_count;
  HullVolumeOptions options = hull_options;
  if (options.box_lo.size() == 0) {
    options.box_lo = sample.matrix().colwise().minCoeff().transpose();
    options.box_hi = sample.matrix().colwise().maxCoeff().transpose();
  }
  for (double alpha : alphas) {
    const Matrix kept = detail::rows_with_depth_at_least(sample, depths, alpha);
    const auto count = static_cast<std::size_t>(kept.rows());
    auto it = by_count.find(count);
    if (it == by_count.end()) it = by_count.emplace(count, hull_volume(kept, options)).first;
    curve.volumes.push_back(it->second);
  }
  return curve;
}

}  // namespace ddtest
