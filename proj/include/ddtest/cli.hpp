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

#include <cstdint>
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddtest/calibration.hpp"
#include "ddtest/csv.hpp"
#include "ddtest/depth.hpp"
#include "ddtest/error.hpp"
#include "ddtest/multi_sample.hpp"
#include "ddtest/scale_curve.hpp"
#include "ddtest/simulation.hpp"
#include "ddtest/statistic.hpp"
#include "ddtest/two_sample.hpp"

namespace ddtest {

enum class OutputFormat { json, csv };

struct RunConfig {
  std::string command;
  std::optional<std::string> input_path;
  std::string group_column = "group";
  bool has_header = true;
  std::vector<std::string> levels;
  DepthKind depth = DepthKind::mahalanobis();
  std::vector<Statistic> statistics = {Statistic::min, Statistic::product, Statistic::sum, Statistic::dbr};
  CalibrationSpec calibration;
  bool asymptotic = false;
  std::uint64_t asymptotic_draws = 1000000;
  OutputFormat output_format = OutputFormat::json;
  std::optional<std::string> output_path;
  // power / type1
  ScenarioSpec scenario;
  // scale-curve
  std::vector<double> alphas = default_alpha_grid();
  std::size_t hull_draws = 200000;
};

/// Raised for bad command lines; maps to exit status 2.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Carries the help text when --help is given.
class HelpRequested : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

/// FNV-1a 64 of a file's bytes, printed as hex.
inline std::string file_hash(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (std::istreambuf_iterator<char> it(in), end; it != end; ++it) {
    h ^= static_cast<unsigned char>(*it);
    h *= 0x100000001b3ull;
  }
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return std::string("fnv1a64:") + buf;
}

inline std::string format_number(double v, int significant) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.*g", significant, v);
  return buf;
}

/// Rounds to `significant` digits so the JSON carries the printed precision.
inline double rounded(double v, int significant) { return std::strtod(format_number(v, significant).c_str(), nullptr); }

inline constexpr int kStatisticDigits = 9;
inline constexpr int kPValueDigits = 6;

template <class T>
std::vector<T> split_list(const std::string& text, T (*parse)(const std::string&)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse(item));
  }
  return out;
}

inline double parse_double(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != s.size()) throw UsageError("'" + s + "' is not a number");
  return v;
}

inline std::size_t parse_size(const std::string& s) {
  const double v = parse_double(s);
  if (v < 0 || v != static_cast<double>(static_cast<std::size_t>(v))) throw UsageError("'" + s + "' is not a size");
  return static_cast<std::size_t>(v);
}

inline std::string join_sizes(const std::vector<std::size_t>& sizes) {
  std::string out;
  for (std::size_t i = 0; i < sizes.size(); ++i) out += (i ? ";" : "") + std::to_string(sizes[i]);
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) out += c == '"' ? std::string("\"\"") : std::string(1, c);
  return out + "\"";
}

}  // namespace detail

/// A finished report: the JSON document plus its CSV rendering.
struct Report {
  nlohmann::ordered_json json;
  std::string csv;
};

namespace detail {

inline nlohmann::ordered_json config_json(const RunConfig& c) {
  nlohmann::ordered_json j;
  j["command"] = c.command;
  if (c.input_path) j["input"] = *c.input_path;
  j["depth"] = to_string(c.depth.type);
  if (c.depth.type == DepthType::projection) j["directions"] = c.depth.direction_count;
  j["seed"] = c.calibration.seed;
  if (c.command == "two-sample" || c.command == "k-sample") {
    j["group"] = c.group_column;
    j["levels"] = c.levels;
    std::vector<std::string> names;
    for (auto s : c.statistics) names.push_back(to_string(s));
    j["stats"] = names;
    j["perms"] = c.calibration.replications;
    j["asymptotic"] = c.asymptotic;
    if (c.asymptotic) j["asymptotic_draws"] = c.asymptotic_draws;
  } else if (c.command == "power" || c.command == "type1") {
    j["scenario"] = to_string(c.scenario.scenario);
    j["m_grid"] = c.scenario.m_grid;
    j["size_rule"] = to_string(c.scenario.size_rule);
    j["reps"] = c.scenario.replications;
    j["alpha"] = c.scenario.alpha_level;
    if (c.command == "power") {
      std::vector<std::string> names;
      for (auto s : c.statistics) names.push_back(to_string(s));
      j["stats"] = names;
    }
  } else if (c.command == "scale-curve") {
    j["group"] = c.group_column;
    j["levels"] = c.levels;
    j["alphas"] = c.alphas;
    j["hull_draws"] = c.hull_draws;
  }
  return j;
}

inline std::vector<std::string> selected_labels(const LabeledDataset& ds, const std::vector<std::string>& levels) {
  if (levels.empty()) return ds.labels();
  std::vector<std::string> out;
  for (const auto& label : ds.labels()) {
    if (std::find(levels.begin(), levels.end(), label) != levels.end()) out.push_back(label);
  }
  for (const auto& l : levels) {
    if (!ds.groups.count(l)) throw Error(ErrorCode::invalid_argument, "no group labelled '" + l + "'");
  }
  return out;
}

inline nlohmann::ordered_json outcome_json(const TestOutcome& o, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["statistic_name"] = o.statistic_name;
  j["statistic"] = rounded(o.statistic, kStatisticDigits);
  if (o.p_value) {
    j["p_value"] = rounded(*o.p_value, kPValueDigits);
  } else {
    j["p_value"] = nullptr;
  }
  j["method"] = to_string(o.method);
  j["depth"] = o.depth_kind ? nlohmann::ordered_json(to_string(o.depth_kind->type)) : nlohmann::ordered_json(nullptr);
  j["sizes"] = o.sizes;
  j["seed"] = seed;
  return j;
}

inline Report run_tests(const RunConfig& config) {
  if (!config.input_path) throw UsageError(config.command + " needs --input");
  const auto ds = load_csv(*config.input_path, config.group_column, config.has_header);
  const auto labels = selected_labels(ds, config.levels);
  std::vector<SampleSet> groups;
  for (const auto& l : labels) groups.push_back(ds.group(l));
  if (config.command == "two-sample" && groups.size() != 2) {
    throw Error(ErrorCode::invalid_argument, "two-sample needs exactly two groups, found " + std::to_string(groups.size()));
  }
  if (groups.size() < 2) throw Error(ErrorCode::invalid_argument, "need at least two groups");

  std::vector<Statistic> permuted;
  std::vector<TestOutcome> outcomes;
  std::vector<TestOutcome> manova_outcomes;
  for (auto s : config.statistics) {
    if (s == Statistic::wilks || s == Statistic::hotelling || s == Statistic::pillai) {
      if (groups.size() != 2) throw Error(ErrorCode::invalid_argument, to_string(s) + " is defined for two groups only");
      manova_outcomes.push_back(manova(groups[0], groups[1],
                                       s == Statistic::wilks       ? ManovaTest::wilks
                                       : s == Statistic::hotelling ? ManovaTest::hotelling
                                                                   : ManovaTest::pillai));
    } else {
      permuted.push_back(s);
    }
  }
  if (!permuted.empty()) {
    if (config.calibration.replications > 0) {
      outcomes = permutation_test(groups, permuted, config.depth, config.calibration);
    } else {
      const StatisticEvaluator evaluate(permuted, config.depth, groups.front().dim());
      const auto values = evaluate(groups);
      for (std::size_t i = 0; i < permuted.size(); ++i) {
        TestOutcome o;
        o.statistic = values[i];
        o.statistic_name = to_string(permuted[i]);
        if (uses_depth(permuted[i])) o.depth_kind = config.depth;
        o.sizes = sizes_of(groups);
        outcomes.push_back(o);
      }
    }
  }
  outcomes.insert(outcomes.end(), manova_outcomes.begin(), manova_outcomes.end());

  if (config.asymptotic) {
    std::vector<TestOutcome> extra;
    for (const auto& o : outcomes) {
      if (o.statistic_name == "min") {
        TestOutcome a = o;
        if (groups.size() == 2) {
          a.method = CalibrationMethod::asymptotic;
          a.p_value = half_normal_pvalue(o.statistic);
        } else {
          a.method = CalibrationMethod::monte_carlo;
          CalibrationSpec spec = config.calibration;
          spec.method = CalibrationMethod::monte_carlo;
          spec.replications = config.asymptotic_draws;
          a.p_value = mc_asymptotic_min_pvalue(o.statistic, a.sizes, spec);
        }
        extra.push_back(a);
      } else if (o.statistic_name == "max") {
        TestOutcome a = o;
        a.method = CalibrationMethod::asymptotic;
        a.p_value = chi2_1_pvalue(o.statistic);
        extra.push_back(a);
      }
    }
    outcomes.insert(outcomes.end(), extra.begin(), extra.end());
  }

  Report report;
  report.json["config"] = config_json(config);
  report.json["groups"] = labels;
  report.json["results"] = nlohmann::ordered_json::array();
  for (const auto& o : outcomes) report.json["results"].push_back(outcome_json(o, config.calibration.seed));

  const bool any_quality = std::any_of(permuted.begin(), permuted.end(), needs_quality);
  if (any_quality) {
    const auto qm = quality_matrix(groups, config.depth);
    auto& qj = report.json["quality"] = nlohmann::ordered_json::array();
    qm.for_each_pair([&](std::size_t i, std::size_t j, double q) {
      qj.push_back({{"reference", labels[i]}, {"target", labels[j]}, {"q", rounded(q, kStatisticDigits)}});
    });
  }
  report.json["fixture_hashes"] = {{*config.input_path, file_hash(*config.input_path)}};

  std::ostringstream csv;
  csv << "statistic_name,statistic,p_value,method,depth,sizes,seed\n";
  for (const auto& o : outcomes) {
    csv << o.statistic_name << ',' << format_number(o.statistic, kStatisticDigits) << ','
        << (o.p_value ? format_number(*o.p_value, kPValueDigits) : std::string()) << ',' << to_string(o.method) << ','
        << (o.depth_kind ? to_string(o.depth_kind->type) : std::string()) << ',' << join_sizes(o.sizes) << ','
        << config.calibration.seed << '\n';
  }
  report.csv = csv.str();
  return report;
}

inline Report run_simulation(const RunConfig& config) {
  Report report;
  report.json["config"] = config_json(config);
  auto& results = report.json["results"] = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv << "statistic,m,n,depth,value\n";
  const std::string depth = to_string(config.scenario.depth.type);
  auto emit = [&](const std::string& name, std::size_t m, std::size_t n, double value,
                  std::optional<double> critical = std::nullopt, std::optional<Tail> tail = std::nullopt) {
    nlohmann::ordered_json row;
    row["statistic"] = name;
    row["m"] = m;
    row["n"] = n;
    row["depth"] = depth;
    row["value"] = rounded(value, kStatisticDigits);
    if (critical) row["critical_value"] = rounded(*critical, kStatisticDigits);
    if (tail) row["tail"] = to_string(*tail);
    results.push_back(row);
    csv << name << ',' << m << ',' << n << ',' << depth << ',' << format_number(value, kStatisticDigits) << '\n';
  };
  if (config.command == "type1") {
    for (const auto& row : type1_quantiles(config.scenario)) {
      emit("min_quantile", row.m, row.n, row.quantile);
      emit("reference_quantile", row.m, row.n, row.reference);
      emit("min_rejection_rate", row.m, row.n, row.rejection_rate);
    }
  } else {
    for (const auto& row : power_table(config.scenario, config.statistics).rows) {
      emit(row.statistic, row.m, row.n, row.rate, row.critical_value, row.tail);
    }
  }
  report.json["fixture_hashes"] = nlohmann::ordered_json::object();
  report.csv = csv.str();
  return report;
}

inline Report run_scale_curve(const RunConfig& config) {
  if (!config.input_path) throw UsageError("scale-curve needs --input");
  const auto ds = load_csv(*config.input_path, config.group_column, config.has_header);
  Report report;
  report.json["config"] = config_json(config);
  auto& results = report.json["results"] = nlohmann::ordered_json::array();
  std::ostringstream csv;
  csv << "group,alpha,volume\n";
  HullVolumeOptions hull;
  hull.mc_draws = config.hull_draws;
  hull.seed = config.calibration.seed;
  hull.threads = config.calibration.threads;
  for (const auto& label : selected_labels(ds, config.levels)) {
    const auto curve = scale_curve(ds.group(label), config.alphas, config.depth, hull);
    for (std::size_t i = 0; i < curve.alphas.size(); ++i) {
      results.push_back({{"group", label},
                         {"depth", to_string(config.depth.type)},
                         {"alpha", curve.alphas[i]},
                         {"volume", rounded(curve.volumes[i], kStatisticDigits)}});
      csv << csv_escape(label) << ',' << format_number(curve.alphas[i], kStatisticDigits) << ','
          << format_number(curve.volumes[i], kStatisticDigits) << '\n';
    }
  }
  report.json["fixture_hashes"] = {{*config.input_path, file_hash(*config.input_path)}};
  report.csv = csv.str();
  return report;
}

}  // namespace detail

/// Executes one configured command and returns its report.
inline Report run(const RunConfig& config) {
  if (config.command == "two-sample" || config.command == "k-sample") return detail::run_tests(config);
  if (config.command == "power" || config.command == "type1") return detail::run_simulation(config);
  if (config.command == "scale-curve") return detail::run_scale_curve(config);
  throw UsageError("unknown command '" + config.command + "'");
}

inline std::string render(const Report& report, OutputFormat format) {
  return format == OutputFormat::json ? report.json.dump(2) + "\n" : report.csv;
}

/// Parses a command line into a RunConfig. CLI11 errors propagate as
/// CLI::ParseError; semantic problems become UsageError.
inline RunConfig parse_command_line(int argc, const char* const* argv) {
  CLI::App app{"Depth-based multivariate homogeneity tests"};
  app.require_subcommand(1);

  struct Raw {
    std::string input, group = "group", levels, depth = "mahalanobis", stats, format = "json", output;
    std::string scenario = "null", m_grid, size_rule = "equal", alphas;
    int directions = 500;
    std::uint64_t perms = 999, seed = 1, reps = 0, asymptotic_draws = 1000000, hull_draws = 200000;
    unsigned threads = 0;
    double alpha = 0.05;
    bool asymptotic = false, no_header = false, full_scale = false;
  } raw;

  auto common = [&](CLI::App* sub) {
    sub->add_option("--depth", raw.depth, "mahalanobis | spatial | projection")
        ->check(CLI::IsMember({"mahalanobis", "spatial", "projection"}));
    sub->add_option("--directions", raw.directions, "projection depth direction count")->check(CLI::PositiveNumber);
    sub->add_option("--seed", raw.seed, "seed for every random draw");
    sub->add_option("--threads", raw.threads, "worker threads (0 = all cores); never changes results");
    sub->add_option("--format", raw.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));
    sub->add_option("--output", raw.output, "write the report here instead of stdout");
  };
  auto data = [&](CLI::App* sub) {
    sub->add_option("--input", raw.input, "CSV file")->required();
    sub->add_option("--group", raw.group, "label column name or 0-based index");
    sub->add_option("--levels", raw.levels, "comma-separated labels to keep (default: all)");
    sub->add_flag("--no-header", raw.no_header, "first line is data");
  };

  std::vector<CLI::App*> subs;
  for (const char* name : {"two-sample", "k-sample"}) {
    auto* sub = app.add_subcommand(name, std::string(name) + " homogeneity test");
    common(sub);
    data(sub);
    sub->add_option("--stats", raw.stats, "comma-separated statistics");
    sub->add_option("--perms", raw.perms, "permutations (0 = statistics only)");
    sub->add_flag("--asymptotic", raw.asymptotic, "add asymptotic p-values for min / max");
    sub->add_option("--asymptotic-draws", raw.asymptotic_draws, "normal draws for the k-sample limiting law");
    subs.push_back(sub);
  }
  for (const char* name : {"power", "type1"}) {
    auto* sub = app.add_subcommand(name, std::string(name) + " simulation");
    common(sub);
    sub->add_option("--scenario", raw.scenario, "null | scale_shift | mean_shift | both_shift | three_group_a | three_group_b");
    sub->add_option("--m-grid", raw.m_grid, "comma-separated first-group sizes");
    sub->add_option("--size-rule", raw.size_rule, "equal | half")->check(CLI::IsMember({"equal", "half"}));
    sub->add_option("--reps", raw.reps, "replications per grid point");
    sub->add_option("--alpha", raw.alpha, "significance level");
    sub->add_flag("--full-scale", raw.full_scale, "grid 100..1000 with 10000 (type1) or 1000 (power) replications");
    if (std::string(name) == "power") sub->add_option("--stats", raw.stats, "comma-separated statistics");
    subs.push_back(sub);
  }
  {
    auto* sub = app.add_subcommand("scale-curve", "scale curves per group");
    common(sub);
    data(sub);
    sub->add_option("--alphas", raw.alphas, "comma-separated increasing depth levels in (0,1]");
    sub->add_option("--hull-draws", raw.hull_draws, "hit-or-miss draws for hull volumes in d >= 4");
    subs.push_back(sub);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    std::ostringstream text;
    app.exit(e, text, text);
    throw HelpRequested(text.str());
  }

  RunConfig c;
  for (auto* sub : subs) {
    if (sub->parsed()) c.command = sub->get_name();
  }
  try {
    c.depth.type = parse_depth_type(raw.depth);
    c.depth.direction_count = raw.directions;
    c.depth.direction_seed = raw.seed;
    c.calibration.seed = raw.seed;
    c.calibration.threads = raw.threads;
    c.calibration.replications = raw.perms;
    c.output_format = raw.format == "csv" ? OutputFormat::csv : OutputFormat::json;
    if (!raw.output.empty()) c.output_path = raw.output;
    if (!raw.input.empty()) c.input_path = raw.input;
    c.group_column = raw.group;
    c.has_header = !raw.no_header;
    c.levels = detail::split_list<std::string>(raw.levels, [](const std::string& s) { return s; });
    c.asymptotic = raw.asymptotic;
    c.asymptotic_draws = raw.asymptotic_draws;
    c.hull_draws = raw.hull_draws;
    if (!raw.stats.empty()) c.statistics = parse_statistics(raw.stats);

    if (c.command == "power" || c.command == "type1") {
      auto& s = c.scenario;
      s.scenario = parse_scenario(raw.scenario);
      s.size_rule = parse_size_rule(raw.size_rule);
      s.depth = c.depth;
      s.seed = raw.seed;
      s.threads = raw.threads;
      s.alpha_level = raw.alpha;
      if (raw.full_scale) {
        s.m_grid = {100, 200, 300, 400, 500, 600, 700, 800, 900, 1000};
        s.replications = c.command == "type1" ? 10000 : 1000;
      }
      if (!raw.m_grid.empty()) s.m_grid = detail::split_list<std::size_t>(raw.m_grid, detail::parse_size);
      if (raw.reps > 0) s.replications = raw.reps;
      if (c.command == "power" && raw.stats.empty()) {
        c.statistics = {Statistic::max, Statistic::min, Statistic::product, Statistic::sum, Statistic::dbr};
        if (s.scenario == Scenario::null || scenario_distributions(s.scenario).size() == 2) {
          c.statistics.push_back(Statistic::bdbr);
        } else {
          c.statistics.erase(c.statistics.begin());
        }
      }
      s.validate();
    }
    if (c.command == "scale-curve" && !raw.alphas.empty()) {
      c.alphas = detail::split_list<double>(raw.alphas, detail::parse_double);
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  return c;
}

/// Full CLI entry point. Exit status: 0 success, 1 data or numeric error,
/// 2 usage error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  RunConfig config;
  try {
    config = parse_command_line(argc, argv);
  } catch (const HelpRequested& h) {
    out << h.what();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  }
  try {
    const std::string text = render(run(config), config.output_format);
    if (config.output_path) {
      std::ofstream file(*config.output_path, std::ios::binary);
      if (!file) throw Error(ErrorCode::invalid_argument, "cannot write '" + *config.output_path + "'");
      file << text;
    } else {
      out << text;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace ddtest
