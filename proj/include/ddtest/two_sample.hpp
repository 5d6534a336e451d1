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
#include <numeric>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "ddtest/depth.hpp"
#include "ddtest/error.hpp"
#include "ddtest/linalg.hpp"
#include "ddtest/quality.hpp"
#include "ddtest/sample_set.hpp"
#include "ddtest/special_functions.hpp"

namespace ddtest {

enum class CalibrationMethod { asymptotic, permutation, monte_carlo, none };

inline std::string to_string(CalibrationMethod m) {
  switch (m) {
    case CalibrationMethod::asymptotic: return "asymptotic";
    case CalibrationMethod::permutation: return "permutation";
    case CalibrationMethod::monte_carlo: return "monte_carlo";
    case CalibrationMethod::none: return "none";
  }
  return "?";
}

struct TestOutcome {
  double statistic = 0.0;
  std::optional<double> p_value;
  CalibrationMethod method = CalibrationMethod::none;
  std::string statistic_name;
  std::optional<DepthKind> depth_kind;
  std::vector<std::size_t> sizes;
};

// ---------------------------------------------------------------------------
// Statistics built from the directed quality pair.

inline double quality_scale(std::size_t m, std::size_t n) {
  return (1.0 / 12.0) * (1.0 / static_cast<double>(m) + 1.0 / static_cast<double>(n));
}

/// Maximum statistic: scaled larger squared deviation of the two indices from 1/2.
inline double max_statistic(const QualityPair& q) {
  const double a = q.q_fg - 0.5;
  const double b = q.q_gf - 0.5;
  return std::max(a * a, b * b) / quality_scale(q.m, q.n);
}

/// Minimum statistic; asymptotically half-normal under the null.
inline double min_statistic(const QualityPair& q) {
  return (0.5 - std::min(q.q_fg, q.q_gf)) / std::sqrt(quality_scale(q.m, q.n));
}

inline double product_statistic(const QualityPair& q) { return q.q_fg * q.q_gf; }

inline double sum_statistic(const QualityPair& q) { return q.q_fg + q.q_gf; }

// ---------------------------------------------------------------------------
// Depth ranks.

/// R_i = #{l : D_l >= D_i}; the deepest observation gets rank 1 and tied
/// depths share the largest rank of their block.
inline std::vector<double> depth_ranks(std::span<const double> depths) {
  std::vector<double> sorted(depths.begin(), depths.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> ranks(depths.size());
  for (std::size_t i = 0; i < depths.size(); ++i) {
    const auto below = std::lower_bound(sorted.begin(), sorted.end(), depths[i]) - sorted.begin();
    ranks[i] = static_cast<double>(static_cast<std::ptrdiff_t>(sorted.size()) - below);
  }
  return ranks;
}

/// Ranks 1..N by decreasing depth, ties broken by original index.
inline std::vector<double> tie_broken_depth_ranks(std::span<const double> depths) {
  std::vector<std::size_t> order(depths.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return depths[a] > depths[b]; });
  std::vector<double> ranks(depths.size());
  for (std::size_t pos = 0; pos < order.size(); ++pos) ranks[order[pos]] = static_cast<double>(pos + 1);
  return ranks;
}

namespace detail {

inline std::vector<double> pooled_depths(const DepthTable& table, std::size_t reference) {
  std::vector<double> pooled;
  for (std::size_t j = 0; j < table.group_count(); ++j) {
    const auto& d = table.depths(reference, j);
    pooled.insert(pooled.end(), d.begin(), d.end());
  }
  return pooled;
}

/// (1/s) sum_j (r_(j) - E r_(j))^2 / Var r_(j) for the ascending ranks of
/// the `s` selected observations among N, the other sample having size o.
inline double standardized_order_rank_sum(std::vector<double> ranks, std::size_t other) {
  std::sort(ranks.begin(), ranks.end());
  const double s = static_cast<double>(ranks.size());
  const double o = static_cast<double>(other);
  const double total = s + o;
  double acc = 0.0;
  for (std::size_t idx = 0; idx < ranks.size(); ++idx) {
    const double j = static_cast<double>(idx + 1);
    const double frac = j / (s + 1.0);
    const double mean = (total + 1.0) * frac;
    const double var = frac * (1.0 - frac) * o * (total + 1.0) / (s + 2.0);
    const double dev = ranks[idx] - mean;
    acc += dev * dev / var;
  }
  return acc / s;
}

}  // namespace detail

/// Depth-based rank statistic averaged over every group used as reference:
/// H = 12/(N(N+1)t) sum_k sum_j R_.j(k)^2 / n_j - 3(N+1), t = group count.
inline double dbr_statistic(const DepthTable& table) {
  const std::size_t t = table.group_count();
  const auto& sizes = table.sizes();
  const double n_total = static_cast<double>(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}));
  double acc = 0.0;
  for (std::size_t k = 0; k < t; ++k) {
    const auto ranks = depth_ranks(detail::pooled_depths(table, k));
    std::size_t offset = 0;
    for (std::size_t j = 0; j < t; ++j) {
      double rank_sum = 0.0;
      for (std::size_t i = 0; i < sizes[j]; ++i) rank_sum += ranks[offset + i];
      acc += rank_sum * rank_sum / static_cast<double>(sizes[j]);
      offset += sizes[j];
    }
  }
  return 12.0 / (n_total * (n_total + 1.0) * static_cast<double>(t)) * acc - 3.0 * (n_total + 1.0);
}

inline double dbr_statistic(const SampleSet& x, const SampleSet& y, const DepthKind& kind) {
  return dbr_statistic(DepthTable({x, y}, kind));
}

/// Modified depth-based rank statistic B = max(B^F1, B^F2) on a two-group table.
inline double bdbr_statistic(const DepthTable& table) {
  if (table.group_count() != 2) throw Error(ErrorCode::invalid_argument, "modified DbR needs exactly two groups");
  const std::size_t n1 = table.sizes()[0];
  const std::size_t n2 = table.sizes()[1];
  const auto ranks_f1 = tie_broken_depth_ranks(detail::pooled_depths(table, 0));
  const auto ranks_f2 = tie_broken_depth_ranks(detail::pooled_depths(table, 1));
  const std::vector<double> second_under_f1(ranks_f1.begin() + static_cast<std::ptrdiff_t>(n1), ranks_f1.end());
  const std::vector<double> first_under_f2(ranks_f2.begin(), ranks_f2.begin() + static_cast<std::ptrdiff_t>(n1));
  return std::max(detail::standardized_order_rank_sum(second_under_f1, n1),
                  detail::standardized_order_rank_sum(first_under_f2, n2));
}

inline double bdbr_multivariate(const SampleSet& x, const SampleSet& y, const DepthKind& kind) {
  return bdbr_statistic(DepthTable({x, y}, kind));
}

/// Univariate modified rank statistic B* = (B*_1 + B*_2) / 2 on pooled
/// value ranks (1 = smallest).
inline double bdbr_univariate(const SampleSet& x, const SampleSet& y) {
  if (x.dim() != 1 || y.dim() != 1) throw Error(ErrorCode::invalid_argument, "bdbr_univariate needs 1-D samples");
  const std::size_t n = x.size();
  const std::size_t m = y.size();
  std::vector<std::pair<double, std::size_t>> pooled;
  pooled.reserve(n + m);
  for (std::size_t i = 0; i < n; ++i) pooled.emplace_back(x.matrix()(static_cast<Eigen::Index>(i), 0), i);
  for (std::size_t j = 0; j < m; ++j) pooled.emplace_back(y.matrix()(static_cast<Eigen::Index>(j), 0), n + j);
  std::sort(pooled.begin(), pooled.end());
  for (std::size_t i = 1; i < pooled.size(); ++i) {
    if (pooled[i].first == pooled[i - 1].first) {
      throw Error(ErrorCode::tied_ranks, "pooled values contain ties; order-statistic moments need distinct ranks");
    }
  }
  std::vector<double> rx;
  std::vector<double> ry;
  for (std::size_t pos = 0; pos < pooled.size(); ++pos) {
    (pooled[pos].second < n ? rx : ry).push_back(static_cast<double>(pos + 1));
  }
  return 0.5 * (detail::standardized_order_rank_sum(rx, m) + detail::standardized_order_rank_sum(ry, n));
}

// ---------------------------------------------------------------------------
// Classical baselines.

struct EigenSummary {
  std::vector<double> eigenvalues;
  std::size_t p = 0;
  std::size_t n1 = 0;
  std::size_t n2 = 0;
  Eigen::MatrixXd total_scatter;
  Eigen::MatrixXd between_scatter;
  Eigen::MatrixXd within_scatter;
};

/// Eigenvalues of S_W^{-1} S_B for the two-group one-way MANOVA.
inline EigenSummary manova_eigen(const SampleSet& x, const SampleSet& y) {
  require_same_dim(x, y);
  const std::size_t p = x.dim();
  const std::size_t n1 = x.size();
  const std::size_t n2 = y.size();
  if (n1 + n2 <= p + 1) {
    throw Error(ErrorCode::singular_scatter, "MANOVA needs n1 + n2 > p + 1");
  }
  const Eigen::VectorXd mean1 = x.matrix().colwise().mean().transpose();
  const Eigen::VectorXd mean2 = y.matrix().colwise().mean().transpose();
  const Eigen::MatrixXd c1 = x.matrix().rowwise() - mean1.transpose();
  const Eigen::MatrixXd c2 = y.matrix().rowwise() - mean2.transpose();
  EigenSummary s;
  s.p = p;
  s.n1 = n1;
  s.n2 = n2;
  s.within_scatter = c1.transpose() * c1 + c2.transpose() * c2;
  // sum_i n_i (mean_i - mean)(mean_i - mean)' collapses to this for two groups.
  const Eigen::VectorXd diff = mean1 - mean2;
  const double n = static_cast<double>(n1 + n2);
  s.between_scatter = (static_cast<double>(n1) * static_cast<double>(n2) / n) * diff * diff.transpose();
  s.total_scatter = s.between_scatter + s.within_scatter;
  if (!cholesky_lower(s.within_scatter)) throw Error(ErrorCode::singular_scatter, "within-group scatter is singular");
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(s.between_scatter, s.within_scatter);
  if (solver.info() != Eigen::Success) throw Error(ErrorCode::singular_scatter, "generalized eigenproblem failed");
  const Eigen::VectorXd ev = solver.eigenvalues();
  s.eigenvalues.assign(ev.data(), ev.data() + ev.size());
  std::sort(s.eigenvalues.rbegin(), s.eigenvalues.rend());
  return s;
}

enum class ManovaTest { wilks, hotelling, pillai };

inline std::string to_string(ManovaTest t) {
  switch (t) {
    case ManovaTest::wilks: return "wilks";
    case ManovaTest::hotelling: return "hotelling";
    case ManovaTest::pillai: return "pillai";
  }
  return "?";
}

/// MANOVA statistic with its F-transform p-value on (p, n1+n2-p-1) degrees
/// of freedom. Pillai's trace sums over the p eigenvalues.
inline TestOutcome manova(const SampleSet& x, const SampleSet& y, ManovaTest which) {
  const EigenSummary es = manova_eigen(x, y);
  const double p = static_cast<double>(es.p);
  const double df2 = static_cast<double>(es.n1 + es.n2) - p - 1.0;
  double wilks = 1.0;
  double hotelling = 0.0;
  double pillai = 0.0;
  for (double raw : es.eigenvalues) {
    const double lambda = std::max(raw, 0.0);
    wilks *= 1.0 / (1.0 + lambda);
    hotelling += lambda;
    pillai += lambda / (1.0 + lambda);
  }
  TestOutcome out;
  out.method = CalibrationMethod::asymptotic;
  out.statistic_name = to_string(which);
  out.sizes = {es.n1, es.n2};
  double f = 0.0;
  switch (which) {
    case ManovaTest::wilks:
      out.statistic = wilks;
      f = (1.0 - wilks) / wilks * df2 / p;
      break;
    case ManovaTest::hotelling:
      out.statistic = hotelling;
      f = df2 / p * hotelling;
      break;
    case ManovaTest::pillai:
      out.statistic = pillai;
      f = pillai >= 1.0 ? std::numeric_limits<double>::infinity() : df2 / p * pillai / (1.0 - pillai);
      break;
  }
  out.p_value = f_sf(f, p, df2);
  return out;
}

/// Univariate Cramér statistic (mn/(m+n)) * integral (F_x - F_y)^2 dH, with
/// H the pooled empirical distribution, so the integral is a mean over the
/// pooled observations.
inline double cramer_univariate(const SampleSet& x, const SampleSet& y) {
  if (x.dim() != 1 || y.dim() != 1) throw Error(ErrorCode::invalid_argument, "Cramér test is univariate");
  std::vector<double> xs(x.matrix().data(), x.matrix().data() + x.size());
  std::vector<double> ys(y.matrix().data(), y.matrix().data() + y.size());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  const double n = static_cast<double>(xs.size());
  const double m = static_cast<double>(ys.size());
  auto ecdf_gap = [&](double t) {
    const auto cx = std::upper_bound(xs.begin(), xs.end(), t) - xs.begin();
    const auto cy = std::upper_bound(ys.begin(), ys.end(), t) - ys.begin();
    const double gap = static_cast<double>(cx) / n - static_cast<double>(cy) / m;
    return gap * gap;
  };
  double integral = 0.0;
  for (double t : xs) integral += ecdf_gap(t);
  for (double t : ys) integral += ecdf_gap(t);
  integral /= (n + m);
  return m * n / (m + n) * integral;
}

struct EnergyStatistic {
  double statistic = 0.0;        // (nm/(n+m)) * energy distance
  double energy_distance = 0.0;  // 2E|X-Y| - E|X-X'| - E|Y-Y'|
  double normalized = 0.0;       // energy distance / (2E|X-Y|), in [0,1]
};

/// Energy statistic with V-statistic plug-in means (diagonal zeros kept).
inline EnergyStatistic energy_statistic(const SampleSet& x, const SampleSet& y) {
  require_same_dim(x, y);
  auto mean_distance = [](const Matrix& a, const Matrix& b) {
    double acc = 0.0;
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      double row_acc = 0.0;
      for (Eigen::Index j = 0; j < b.rows(); ++j) row_acc += (a.row(i) - b.row(j)).norm();
      acc += row_acc;
    }
    return acc / (static_cast<double>(a.rows()) * static_cast<double>(b.rows()));
  };
  const double xy = mean_distance(x.matrix(), y.matrix());
  const double xx = mean_distance(x.matrix(), x.matrix());
  const double yy = mean_distance(y.matrix(), y.matrix());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  EnergyStatistic e;
  e.energy_distance = 2.0 * xy - xx - yy;
  e.statistic = n * m / (n + m) * e.energy_distance;
  e.normalized = xy > 0.0 ? std::clamp(e.energy_distance / (2.0 * xy), 0.0, 1.0) : 0.0;
  return e;
}

}  // namespace ddtest
