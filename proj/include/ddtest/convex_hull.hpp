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
#include <map>
#include <numeric>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "ddtest/error.hpp"
#include "ddtest/parallel.hpp"
#include "ddtest/random.hpp"
#include "ddtest/sample_set.hpp"

namespace ddtest {

/// Convex hull of planar points in counter-clockwise order (Andrew's
/// monotone chain). Collinear boundary points are dropped.
inline std::vector<Eigen::Vector2d> convex_hull_2d(const Matrix& points) {
  std::vector<Eigen::Vector2d> pts;
  pts.reserve(static_cast<std::size_t>(points.rows()));
  for (Eigen::Index i = 0; i < points.rows(); ++i) pts.emplace_back(points(i, 0), points(i, 1));
  std::sort(pts.begin(), pts.end(), [](const auto& a, const auto& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  auto cross = [](const Eigen::Vector2d& o, const Eigen::Vector2d& a, const Eigen::Vector2d& b) {
    return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
  };
  std::vector<Eigen::Vector2d> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

/// Shoelace area of a simple polygon given in boundary order.
inline double polygon_area(const std::vector<Eigen::Vector2d>& polygon) {
  double twice = 0.0;
  for (std::size_t i = 0; i < polygon.size(); ++i) {
    const auto& a = polygon[i];
    const auto& b = polygon[(i + 1) % polygon.size()];
    twice += a.x() * b.y() - b.x() * a.y();
  }
  return std::abs(twice) / 2.0;
}

/// Convex hull in any dimension d >= 2 by incremental insertion with
/// simplicial facets. Points within `tolerance` of a facet plane count as
/// inside, so coplanar input is absorbed rather than split into slivers.
class ConvexHull {
 public:
  struct Facet {
    std::vector<int> vertices;
    Eigen::VectorXd normal;  // unit, outward
    double offset = 0.0;     // normal . x <= offset inside
  };

  explicit ConvexHull(const Matrix& points) : points_(points), dim_(points.cols()) {
    if (dim_ < 2) throw Error(ErrorCode::invalid_argument, "ConvexHull needs d >= 2");
    if (points_.rows() == 0) return;
    const Eigen::VectorXd extent = points_.colwise().maxCoeff() - points_.colwise().minCoeff();
    tolerance_ = 1e-10 * std::max(extent.norm(), 1e-300);
    build();
  }

  /// True when the points span a full-dimensional region.
  bool full_dimensional() const { return !facets_.empty(); }
  const std::vector<Facet>& facets() const { return facets_; }

  bool contains(const Eigen::VectorXd& x) const {
    if (facets_.empty()) return false;
    for (const auto& f : facets_) {
      if (f.normal.dot(x) - f.offset > tolerance_) return false;
    }
    return true;
  }

  /// Exact volume as a sum of cones from an interior point over the facets.
  double volume() const {
    if (facets_.empty()) return 0.0;
    double factorial = 1.0;
    for (Eigen::Index i = 2; i <= dim_; ++i) factorial *= static_cast<double>(i);
    double total = 0.0;
    Eigen::MatrixXd edges(dim_, dim_);
    for (const auto& f : facets_) {
      for (Eigen::Index c = 0; c < dim_; ++c) {
        edges.col(c) = points_.row(f.vertices[static_cast<std::size_t>(c)]).transpose() - interior_;
      }
      total += std::abs(edges.partialPivLu().determinant());
    }
    return total / factorial;
  }

 private:
  Eigen::VectorXd point(int i) const { return points_.row(i).transpose(); }

  /// Greedy initial simplex: repeatedly add the point farthest from the
  /// affine span of those already chosen.
  std::optional<std::vector<int>> initial_simplex() const {
    const auto n = static_cast<int>(points_.rows());
    std::vector<int> chosen{0};
    for (int i = 1; i < n; ++i) {
      if (points_(i, 0) < points_(chosen[0], 0)) chosen[0] = i;
    }
    std::vector<Eigen::VectorXd> basis;
    const Eigen::VectorXd origin = point(chosen[0]);
    while (static_cast<Eigen::Index>(chosen.size()) < dim_ + 1) {
      double best = -1.0;
      int best_idx = -1;
      Eigen::VectorXd best_residual;
      for (int i = 0; i < n; ++i) {
        Eigen::VectorXd r = point(i) - origin;
        for (const auto& b : basis) r -= b.dot(r) * b;
        const double dist = r.norm();
        if (dist > best) {
          best = dist;
          best_idx = i;
          best_residual = r;
        }
      }
      if (best <= tolerance_) return std::nullopt;
      basis.push_back(best_residual / best);
      chosen.push_back(best_idx);
    }
    return chosen;
  }

  std::optional<Facet> make_facet(std::vector<int> vertices) const {
    Eigen::MatrixXd spans(dim_, dim_ - 1);
    const Eigen::VectorXd base = point(vertices[0]);
    for (Eigen::Index c = 1; c < dim_; ++c) spans.col(c - 1) = point(vertices[static_cast<std::size_t>(c)]) - base;
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(spans);
    const Eigen::MatrixXd q = qr.householderQ();
    Facet f;
    f.normal = q.col(dim_ - 1);
    f.offset = f.normal.dot(base);
    const double side = f.normal.dot(interior_) - f.offset;
    if (std::abs(side) <= tolerance_) return std::nullopt;
    if (side > 0.0) {
      f.normal = -f.normal;
      f.offset = -f.offset;
    }
    f.vertices = std::move(vertices);
    return f;
  }

  void build() {
    const auto simplex = initial_simplex();
    if (!simplex) return;
    interior_ = Eigen::VectorXd::Zero(dim_);
    for (int v : *simplex) interior_ += point(v);
    interior_ /= static_cast<double>(simplex->size());
    std::vector<Facet> facets;
    for (std::size_t skip = 0; skip < simplex->size(); ++skip) {
      std::vector<int> verts;
      for (std::size_t i = 0; i < simplex->size(); ++i) {
        if (i != skip) verts.push_back((*simplex)[i]);
      }
      auto f = make_facet(std::move(verts));
      if (!f) return;
      facets.push_back(std::move(*f));
    }
    std::vector<char> in_simplex(static_cast<std::size_t>(points_.rows()), 0);
    for (int v : *simplex) in_simplex[static_cast<std::size_t>(v)] = 1;

    for (int p = 0; p < static_cast<int>(points_.rows()); ++p) {
      if (in_simplex[static_cast<std::size_t>(p)]) continue;
      const Eigen::VectorXd x = point(p);
      std::vector<std::size_t> visible;
      for (std::size_t fi = 0; fi < facets.size(); ++fi) {
        if (facets[fi].normal.dot(x) - facets[fi].offset > tolerance_) visible.push_back(fi);
      }
      if (visible.empty()) continue;
      std::map<std::vector<int>, int> ridges;
      for (std::size_t fi : visible) {
        const auto& verts = facets[fi].vertices;
        for (std::size_t skip = 0; skip < verts.size(); ++skip) {
          std::vector<int> ridge;
          for (std::size_t i = 0; i < verts.size(); ++i) {
            if (i != skip) ridge.push_back(verts[i]);
          }
          std::sort(ridge.begin(), ridge.end());
          ++ridges[ridge];
        }
      }
      std::vector<char> drop(facets.size(), 0);
      for (std::size_t fi : visible) drop[fi] = 1;
      std::vector<Facet> next;
      next.reserve(facets.size());
      for (std::size_t fi = 0; fi < facets.size(); ++fi) {
        if (!drop[fi]) next.push_back(std::move(facets[fi]));
      }
      for (const auto& [ridge, count] : ridges) {
        if (count != 1) continue;
        std::vector<int> verts = ridge;
        verts.push_back(p);
        if (auto f = make_facet(std::move(verts))) next.push_back(std::move(*f));
      }
      facets = std::move(next);
    }
    facets_ = std::move(facets);
  }

  Matrix points_;
  Eigen::Index dim_;
  double tolerance_ = 0.0;
  Eigen::VectorXd interior_;
  std::vector<Facet> facets_;
};

struct HullVolumeOptions {
  /// Hit-or-miss draws for d >= 4 (ignored when exact_high_dim is set).
  std::size_t mc_draws = 200000;
  std::uint64_t seed = 0;
  bool exact_high_dim = false;
  unsigned threads = 0;
  /// Sampling box for the hit-or-miss estimate; empty means the bounding box
  /// of the points. Sharing one box (and seed) across nested point sets makes
  /// the estimates nested as well.
  Eigen::VectorXd box_lo;
  Eigen::VectorXd box_hi;
};

/// Hit-or-miss estimate of the hull volume inside the bounding box.
inline double hull_volume_monte_carlo(const ConvexHull& hull, const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                                      std::size_t draws, std::uint64_t seed, unsigned threads = 0) {
  if (!hull.full_dimensional() || draws == 0) return 0.0;
  const Eigen::VectorXd width = hi - lo;
  constexpr std::size_t kChunk = 4096;
  const std::size_t chunks = (draws + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> hits(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    RandomStream rng(seed, stream_id({0x68756c6cull, c}));
    Eigen::VectorXd x(lo.size());
    const std::size_t count = std::min(kChunk, draws - c * kChunk);
    std::uint64_t h = 0;
    for (std::size_t r = 0; r < count; ++r) {
      for (Eigen::Index j = 0; j < x.size(); ++j) x(j) = lo(j) + width(j) * rng.uniform();
      if (hull.contains(x)) ++h;
    }
    hits[c] = h;
  });
  const double box = width.prod();
  return box * static_cast<double>(std::accumulate(hits.begin(), hits.end(), std::uint64_t{0})) /
         static_cast<double>(draws);
}

/// Volume of the convex hull of the rows of `points`: exact for d <= 3,
/// Monte-Carlo for d >= 4 unless exact_high_dim. Zero with fewer than d+1
/// points or a flat configuration.
inline double hull_volume(const Matrix& points, const HullVolumeOptions& options = {}) {
  const auto d = points.cols();
  if (points.rows() < d + 1) return 0.0;
  if (d == 1) return points.col(0).maxCoeff() - points.col(0).minCoeff();
  if (d == 2) return polygon_area(convex_hull_2d(points));
  const ConvexHull hull(points);
  if (d == 3 || options.exact_high_dim) return hull.volume();
  if (options.box_lo.size() == d && options.box_hi.size() == d) {
    return hull_volume_monte_carlo(hull, options.box_lo, options.box_hi, options.mc_draws, options.seed, options.threads);
  }
  return hull_volume_monte_carlo(hull, points.colwise().minCoeff().transpose(), points.colwise().maxCoeff().transpose(),
                                 options.mc_draws, options.seed, options.threads);
}

}  // namespace ddtest
