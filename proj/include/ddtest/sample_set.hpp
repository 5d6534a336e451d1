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
#include <cstddef>
#include <initializer_list>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddtest/error.hpp"

namespace ddtest {

using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;

/// An n x d block of finite observations, one row per observation.
class SampleSet {
 public:
  SampleSet() = default;

  explicit SampleSet(Matrix data) : data_(std::move(data)) { validate(); }

  static SampleSet from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error(ErrorCode::invalid_argument, "sample has no rows");
    const std::size_t d = rows.front().size();
    Matrix data(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != d) {
        throw Error(ErrorCode::dimension_mismatch,
                    "row " + std::to_string(i) + " has " + std::to_string(rows[i].size()) +
                        " values, expected " + std::to_string(d));
      }
      for (std::size_t j = 0; j < d; ++j) {
        data(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
      }
    }
    return SampleSet(std::move(data));
  }

  /// Univariate convenience constructor.
  static SampleSet from_values(std::initializer_list<double> values) {
    return from_values(std::vector<double>(values));
  }

  static SampleSet from_values(const std::vector<double>& values) {
    Matrix data(static_cast<Eigen::Index>(values.size()), 1);
    for (std::size_t i = 0; i < values.size(); ++i) data(static_cast<Eigen::Index>(i), 0) = values[i];
    return SampleSet(std::move(data));
  }

  std::size_t size() const { return static_cast<std::size_t>(data_.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(data_.cols()); }
  const Matrix& matrix() const { return data_; }
  auto row(std::size_t i) const { return data_.row(static_cast<Eigen::Index>(i)); }

  bool operator==(const SampleSet& other) const {
    return data_.rows() == other.data_.rows() && data_.cols() == other.data_.cols() &&
           data_ == other.data_;
  }

 private:
  void validate() const {
    if (data_.rows() < 1 || data_.cols() < 1) {
      throw Error(ErrorCode::invalid_argument, "sample must have at least one row and one column");
    }
    if (!data_.allFinite()) throw Error(ErrorCode::invalid_argument, "sample contains non-finite values");
  }

  Matrix data_;
};

inline void require_same_dim(const SampleSet& a, const SampleSet& b) {
  if (a.dim() != b.dim()) {
    throw Error(ErrorCode::dimension_mismatch,
                "samples have " + std::to_string(a.dim()) + " and " + std::to_string(b.dim()) +
                    " columns");
  }
}

/// Stacks the rows of all groups in order.
inline Matrix pool(const std::vector<SampleSet>& groups) {
  Eigen::Index total = 0;
  for (const auto& g : groups) total += static_cast<Eigen::Index>(g.size());
  Matrix pooled(total, static_cast<Eigen::Index>(groups.front().dim()));
  Eigen::Index offset = 0;
  for (const auto& g : groups) {
    pooled.middleRows(offset, g.matrix().rows()) = g.matrix();
    offset += g.matrix().rows();
  }
  return pooled;
}

inline std::vector<std::size_t> sizes_of(const std::vector<SampleSet>& groups) {
  std::vector<std::size_t> sizes;
  sizes.reserve(groups.size());
  for (const auto& g : groups) sizes.push_back(g.size());
  return sizes;
}

}  // namespace ddtest
