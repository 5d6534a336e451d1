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
#include <optional>
#include <string>

#include <Eigen/Dense>

#include "ddtest/error.hpp"

namespace ddtest {

/// Lower Cholesky factor of a symmetric matrix, or nullopt when a pivot falls
/// to or below `relative_floor` times the largest diagonal entry.
inline std::optional<Eigen::MatrixXd> cholesky_lower(const Eigen::MatrixXd& a, double relative_floor = 1e-12) {
  const Eigen::Index n = a.rows();
  const double scale = a.diagonal().maxCoeff();
  if (!(scale > 0.0)) return std::nullopt;
  const double floor = relative_floor * scale;
  Eigen::MatrixXd l = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
    if (!(pivot > floor)) return std::nullopt;
    l(j, j) = std::sqrt(pivot);
    for (Eigen::Index i = j + 1; i < n; ++i) {
      l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / l(j, j);
    }
  }
  return l;
}

/// Sample covariance with denominator rows - 1; rows are observations.
template <class Derived>
Eigen::MatrixXd sample_covariance(const Eigen::MatrixBase<Derived>& x, const Eigen::VectorXd& mean) {
  const Eigen::MatrixXd centered = x.rowwise() - mean.transpose();
  return (centered.transpose() * centered) / static_cast<double>(x.rows() - 1);
}

}  // namespace ddtest
