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
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "ddtest/error.hpp"
#include "ddtest/linalg.hpp"
#include "ddtest/random.hpp"
#include "ddtest/sample_set.hpp"

namespace ddtest {

enum class DepthType { mahalanobis, spatial, projection };

/// Which depth function to use, plus the Monte-Carlo settings that only the
/// projection depth reads.
struct DepthKind {
  DepthType type = DepthType::mahalanobis;
  int direction_count = 500;
  std::uint64_t direction_seed = 0;

  static DepthKind mahalanobis() { return {DepthType::mahalanobis}; }
  static DepthKind spatial() { return {DepthType::spatial}; }
  static DepthKind projection(int directions = 500, std::uint64_t seed = 0) {
    return {DepthType::projection, directions, seed};
  }

  bool operator==(const DepthKind&) const = default;
};

inline std::string to_string(DepthType t) {
  switch (t) {
    case DepthType::mahalanobis: return "mahalanobis";
    case DepthType::spatial: return "spatial";
    case DepthType::projection: return "projection";
  }
  return "?";
}

inline DepthType parse_depth_type(const std::string& name) {
  if (name == "mahalanobis") return DepthType::mahalanobis;
  if (name == "spatial") return DepthType::spatial;
  if (name == "projection") return DepthType::projection;
  throw Error(ErrorCode::invalid_argument, "unknown depth '" + name + "'");
}

struct DepthVector {
  std::vector<double> values;
  std::size_t reference_size = 0;
};

namespace detail {

/// Median of a scratch buffer; even lengths average the two central values.
inline double median_inplace(std::vector<double>& v) {
  const std::size_t n = v.size();
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(v.begin(), mid, v.end());
  const double upper = *mid;
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), mid);
  return 0.5 * (lower + upper);
}

inline double clamp_unit(double v) { return std::clamp(v, 0.0, 1.0); }

class MahalanobisModel {
 public:
  explicit MahalanobisModel(const SampleSet& ref) {
    const auto& x = ref.matrix();
    const auto d = x.cols();
    if (x.rows() < d + 1) {
      throw Error(ErrorCode::singular_covariance,
                  "mahalanobis depth needs at least d+1 = " + std::to_string(d + 1) + " reference rows, got " +
                      std::to_string(x.rows()));
    }
    mean_ = x.colwise().mean().transpose();
    auto chol = cholesky_lower(sample_covariance(x, mean_));
    if (!chol) throw Error(ErrorCode::singular_covariance, "reference sample covariance is not invertible");
    chol_ = std::move(*chol);
  }

  void evaluate(const Matrix& query, std::vector<double>& out) const {
    Eigen::MatrixXd centered = (query.rowwise() - mean_.transpose()).transpose();
    chol_.triangularView<Eigen::Lower>().solveInPlace(centered);
    const Eigen::VectorXd quad = centered.colwise().squaredNorm().transpose();
    out.resize(static_cast<std::size_t>(query.rows()));
    for (Eigen::Index i = 0; i < query.rows(); ++i) out[static_cast<std::size_t>(i)] = 1.0 / (1.0 + quad(i));
  }

 private:
  Eigen::VectorXd mean_;
  Eigen::MatrixXd chol_;
};

class SpatialModel {
 public:
  explicit SpatialModel(const SampleSet& ref) : ref_(ref.matrix()) {}

  void evaluate(const Matrix& query, std::vector<double>& out) const {
    const Eigen::Index m = ref_.rows();
    const Eigen::Index d = ref_.cols();
    out.resize(static_cast<std::size_t>(query.rows()));
    Eigen::VectorXd sum(d);
    for (Eigen::Index q = 0; q < query.rows(); ++q) {
      sum.setZero();
      for (Eigen::Index j = 0; j < m; ++j) {
        const Eigen::VectorXd diff = (query.row(q) - ref_.row(j)).transpose();
        const double norm = diff.norm();
        if (norm > 0.0) sum += diff / norm;
      }
      out[static_cast<std::size_t>(q)] = clamp_unit(1.0 - sum.norm() / static_cast<double>(m));
    }
  }

 private:
  Matrix ref_;
};

class ProjectionModel {
 public:
  ProjectionModel(const SampleSet& ref, const Eigen::MatrixXd& directions) {
    const Eigen::MatrixXd proj = ref.matrix() * directions.transpose();  // m x K
    std::vector<double> scratch(static_cast<std::size_t>(proj.rows()));
    std::vector<Eigen::Index> kept;
    std::vector<double> medians;
    std::vector<double> mads;
    for (Eigen::Index k = 0; k < proj.cols(); ++k) {
      for (Eigen::Index i = 0; i < proj.rows(); ++i) scratch[static_cast<std::size_t>(i)] = proj(i, k);
      const double med = median_inplace(scratch);
      for (Eigen::Index i = 0; i < proj.rows(); ++i) scratch[static_cast<std::size_t>(i)] = std::abs(proj(i, k) - med);
      const double mad = median_inplace(scratch);
      if (mad > 0.0) {
        kept.push_back(k);
        medians.push_back(med);
        mads.push_back(mad);
      }
    }
    if (kept.empty()) {
      throw Error(ErrorCode::degenerate_sample, "median absolute deviation is zero along every projection direction");
    }
    directions_.resize(static_cast<Eigen::Index>(kept.size()), directions.cols());
    for (std::size_t k = 0; k < kept.size(); ++k) directions_.row(static_cast<Eigen::Index>(k)) = directions.row(kept[k]);
    medians_ = Eigen::Map<Eigen::VectorXd>(medians.data(), static_cast<Eigen::Index>(medians.size()));
    inv_mads_ = Eigen::Map<Eigen::VectorXd>(mads.data(), static_cast<Eigen::Index>(mads.size())).cwiseInverse();
  }

  void evaluate(const Matrix& query, std::vector<double>& out) const {
    const Eigen::MatrixXd proj = query * directions_.transpose();  // n x K'
    out.resize(static_cast<std::size_t>(query.rows()));
    for (Eigen::Index i = 0; i < proj.rows(); ++i) {
      const double outlyingness =
          ((proj.row(i).transpose() - medians_).cwiseAbs().cwiseProduct(inv_mads_)).maxCoeff();
      out[static_cast<std::size_t>(i)] = 1.0 / (1.0 + outlyingness);
    }
  }

 private:
  Eigen::MatrixXd directions_;
  Eigen::VectorXd medians_;
  Eigen::VectorXd inv_mads_;
};

}  // namespace detail

/// Random unit directions for the projection depth: normalized standard
/// normal vectors drawn from the direction seed.
inline Eigen::MatrixXd projection_directions(std::size_t dim, int count, std::uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::invalid_argument, "projection depth needs at least one direction");
  RandomStream rng(seed, stream_id({0x70726f6aull, dim}));
  Eigen::MatrixXd dirs(count, static_cast<Eigen::Index>(dim));
  for (int k = 0; k < count; ++k) {
    double norm = 0.0;
    do {
      for (Eigen::Index j = 0; j < dirs.cols(); ++j) dirs(k, j) = rng.normal();
      norm = dirs.row(k).norm();
    } while (norm == 0.0);
    dirs.row(k) /= norm;
  }
  return dirs;
}

/// Empirical depth D(. ; F_m) fitted once on a reference sample and then
/// evaluated on any number of query sets.
class DepthFunction {
 public:
  DepthFunction(const SampleSet& reference, const DepthKind& kind, const Eigen::MatrixXd* directions = nullptr)
      : reference_size_(reference.size()), dim_(reference.dim()), model_(make_model(reference, kind, directions)) {}

  void evaluate_into(const SampleSet& query, std::vector<double>& out) const {
    if (query.dim() != dim_) {
      throw Error(ErrorCode::dimension_mismatch, "query has " + std::to_string(query.dim()) +
                                                     " columns, reference has " + std::to_string(dim_));
    }
    std::visit([&](const auto& m) { m.evaluate(query.matrix(), out); }, model_);
  }

  DepthVector evaluate(const SampleSet& query) const {
    DepthVector result;
    result.reference_size = reference_size_;
    evaluate_into(query, result.values);
    return result;
  }

  std::size_t reference_size() const { return reference_size_; }

 private:
  using Model = std::variant<detail::MahalanobisModel, detail::SpatialModel, detail::ProjectionModel>;

  static Model make_model(const SampleSet& ref, const DepthKind& kind, const Eigen::MatrixXd* directions) {
    switch (kind.type) {
      case DepthType::mahalanobis: return detail::MahalanobisModel(ref);
      case DepthType::spatial: return detail::SpatialModel(ref);
      case DepthType::projection:
        if (directions != nullptr) return detail::ProjectionModel(ref, *directions);
        return detail::ProjectionModel(ref, projection_directions(ref.dim(), kind.direction_count, kind.direction_seed));
    }
    throw Error(ErrorCode::invalid_argument, "unknown depth type");
  }

  std::size_t reference_size_;
  std::size_t dim_;
  Model model_;
};

/// Builds DepthFunctions of one kind for one dimension, generating the
/// projection directions once and sharing them across references.
class DepthFitter {
 public:
  DepthFitter(const DepthKind& kind, std::size_t dim) : kind_(kind) {
    if (kind.type == DepthType::projection) directions_ = projection_directions(dim, kind.direction_count, kind.direction_seed);
  }

  DepthFunction fit(const SampleSet& reference) const {
    return DepthFunction(reference, kind_, kind_.type == DepthType::projection ? &directions_ : nullptr);
  }

  const DepthKind& kind() const { return kind_; }

 private:
  DepthKind kind_;
  Eigen::MatrixXd directions_;
};

/// D(x; F_m) for every row x of `query`, with F_m the empirical
/// distribution of `reference`.
inline DepthVector depth(const SampleSet& query, const SampleSet& reference, const DepthKind& kind) {
  require_same_dim(query, reference);
  return DepthFunction(reference, kind).evaluate(query);
}

}  // namespace ddtest
