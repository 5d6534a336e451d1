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

#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ddtest/depth.hpp"
#include "ddtest/error.hpp"
#include "ddtest/multi_sample.hpp"
#include "ddtest/quality.hpp"
#include "ddtest/two_sample.hpp"

namespace ddtest {

enum class Statistic { max, min, product, sum, dbr, bdbr, energy, cramer, wilks, hotelling, pillai };

enum class Tail { upper, lower };

inline constexpr Statistic kAllStatistics[] = {Statistic::max,    Statistic::min,    Statistic::product,
                                               Statistic::sum,    Statistic::dbr,    Statistic::bdbr,
                                               Statistic::energy, Statistic::cramer, Statistic::wilks,
                                               Statistic::hotelling, Statistic::pillai};

inline std::string to_string(Statistic s) {
  switch (s) {
    case Statistic::max: return "max";
    case Statistic::min: return "min";
    case Statistic::product: return "product";
    case Statistic::sum: return "sum";
    case Statistic::dbr: return "dbr";
    case Statistic::bdbr: return "bdbr";
    case Statistic::energy: return "energy";
    case Statistic::cramer: return "cramer";
    case Statistic::wilks: return "wilks";
    case Statistic::hotelling: return "hotelling";
    case Statistic::pillai: return "pillai";
  }
  return "?";
}

inline std::string to_string(Tail t) { return t == Tail::upper ? "upper" : "lower"; }

inline Statistic parse_statistic(const std::string& name) {
  for (Statistic s : kAllStatistics) {
    if (to_string(s) == name) return s;
  }
  throw Error(ErrorCode::unknown_statistic, "unknown statistic '" + name + "'");
}

inline std::vector<Statistic> parse_statistics(const std::string& list) {
  std::vector<Statistic> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_statistic(item));
  }
  if (out.empty()) throw Error(ErrorCode::invalid_argument, "statistic list is empty");
  return out;
}

/// Small values of product, sum and Wilks' lambda speak against the null;
/// everything else rejects on large values.
inline Tail natural_tail(Statistic s) {
  switch (s) {
    case Statistic::product:
    case Statistic::sum:
    case Statistic::wilks: return Tail::lower;
    default: return Tail::upper;
  }
}

inline bool uses_depth(Statistic s) {
  switch (s) {
    case Statistic::max:
    case Statistic::min:
    case Statistic::product:
    case Statistic::sum:
    case Statistic::dbr:
    case Statistic::bdbr: return true;
    default: return false;
  }
}

inline bool needs_quality(Statistic s) {
  return s == Statistic::max || s == Statistic::min || s == Statistic::product || s == Statistic::sum;
}

inline bool two_groups_only(Statistic s) { return !(s == Statistic::min || s == Statistic::product || s == Statistic::sum || s == Statistic::dbr); }

/// Evaluates a fixed list of statistics on a grouping, sharing one depth
/// table between all depth-based statistics.
class StatisticEvaluator {
 public:
  StatisticEvaluator(std::vector<Statistic> statistics, const DepthKind& kind, std::size_t dim)
      : statistics_(std::move(statistics)), kind_(kind), fitter_(kind, dim) {}

  const std::vector<Statistic>& statistics() const { return statistics_; }
  const DepthKind& kind() const { return kind_; }

  void check_applicable(std::size_t groups, std::size_t dim) const {
    if (groups < 2) throw Error(ErrorCode::invalid_argument, "need at least two groups");
    for (Statistic s : statistics_) {
      if (groups != 2 && two_groups_only(s)) {
        throw Error(ErrorCode::invalid_argument, "statistic '" + to_string(s) + "' is defined for two groups only");
      }
      if (s == Statistic::cramer && dim != 1) {
        throw Error(ErrorCode::invalid_argument, "statistic 'cramer' needs univariate data");
      }
    }
  }

  std::vector<double> operator()(const std::vector<SampleSet>& groups) const {
    check_applicable(groups.size(), groups.front().dim());
    std::optional<DepthTable> table;
    std::optional<QualityMatrix> qm;
    std::vector<double> values;
    values.reserve(statistics_.size());
    for (Statistic s : statistics_) {
      if (uses_depth(s) && !table) table.emplace(groups, fitter_);
      if (needs_quality(s) && !qm) qm = quality_matrix(*table);
      values.push_back(evaluate_one(s, groups, table, qm));
    }
    return values;
  }

 private:
  static double evaluate_one(Statistic s, const std::vector<SampleSet>& groups, const std::optional<DepthTable>& table,
                             const std::optional<QualityMatrix>& qm) {
    const bool two = groups.size() == 2;
    switch (s) {
      case Statistic::max: return max_statistic(qm->pair(0, 1));
      case Statistic::min: return two ? min_statistic(qm->pair(0, 1)) : min_statistic_k(*qm);
      case Statistic::product: return two ? product_statistic(qm->pair(0, 1)) : product_statistic_k(*qm);
      case Statistic::sum: return two ? sum_statistic(qm->pair(0, 1)) : sum_statistic_k(*qm);
      case Statistic::dbr: return dbr_statistic(*table);
      case Statistic::bdbr: return bdbr_statistic(*table);
      case Statistic::energy: return energy_statistic(groups[0], groups[1]).statistic;
      case Statistic::cramer: return cramer_univariate(groups[0], groups[1]);
      case Statistic::wilks: return manova(groups[0], groups[1], ManovaTest::wilks).statistic;
      case Statistic::hotelling: return manova(groups[0], groups[1], ManovaTest::hotelling).statistic;
      case Statistic::pillai: return manova(groups[0], groups[1], ManovaTest::pillai).statistic;
    }
    throw Error(ErrorCode::unknown_statistic, "unhandled statistic");
  }

  std::vector<Statistic> statistics_;
  DepthKind kind_;
  DepthFitter fitter_;
};

}  // namespace ddtest
