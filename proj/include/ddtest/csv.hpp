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
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "ddtest/error.hpp"
#include "ddtest/sample_set.hpp"

namespace ddtest {

/// Observations partitioned by a label column. std::map keeps labels in
/// lexicographic order, which fixes the group order of every test.
struct LabeledDataset {
  std::map<std::string, SampleSet> groups;
  std::vector<std::string> variable_names;

  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (const auto& [label, _] : groups) out.push_back(label);
    return out;
  }

  const SampleSet& group(const std::string& label) const {
    const auto it = groups.find(label);
    if (it == groups.end()) throw Error(ErrorCode::invalid_argument, "no group labelled '" + label + "'");
    return it->second;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  if (s.size() >= 2 && s.front() == '"' && s.back() == '"') s = s.substr(1, s.size() - 2);
  return s;
}

inline std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    fields.emplace_back(trim(std::string_view(line).substr(start, comma == std::string::npos ? std::string::npos : comma - start)));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

inline bool is_blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\t' || c == '\r'; });
}

inline std::string location(std::size_t line, std::size_t column) {
  return "line " + std::to_string(line) + ", column " + std::to_string(column + 1);
}

}  // namespace detail

/// Reads a comma-separated file with one label column and numeric
/// remaining columns. `group_column` is a header name or a 0-based index.
inline LabeledDataset load_csv(std::istream& in, const std::string& group_column, bool has_header = true) {
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!detail::is_blank(line)) lines.push_back(line);
  }
  if (lines.empty()) throw Error(ErrorCode::parse_error, "input is empty");

  std::vector<std::string> header;
  std::size_t first_data = 0;
  if (has_header) {
    header = detail::split_fields(lines[0]);
    first_data = 1;
  }
  const std::size_t width = has_header ? header.size() : detail::split_fields(lines[0]).size();
  if (width < 2) throw Error(ErrorCode::parse_error, "need a label column and at least one numeric column");

  std::size_t group_idx = width;
  if (has_header) {
    const auto it = std::find(header.begin(), header.end(), group_column);
    if (it != header.end()) group_idx = static_cast<std::size_t>(it - header.begin());
  }
  if (group_idx == width) {
    std::size_t parsed = 0;
    const auto* end = group_column.data() + group_column.size();
    const auto res = std::from_chars(group_column.data(), end, parsed);
    if (res.ec == std::errc() && res.ptr == end && parsed < width) {
      group_idx = parsed;
    } else {
      throw Error(ErrorCode::missing_group_column, "group column '" + group_column + "' not found");
    }
  }

  LabeledDataset ds;
  for (std::size_t c = 0; c < width; ++c) {
    if (c != group_idx) ds.variable_names.push_back(has_header ? header[c] : "x" + std::to_string(ds.variable_names.size() + 1));
  }

  std::map<std::string, std::vector<std::vector<double>>> rows;
  for (std::size_t li = first_data; li < lines.size(); ++li) {
    const auto fields = detail::split_fields(lines[li]);
    if (fields.size() != width) {
      throw Error(ErrorCode::parse_error, detail::location(li + 1, 0) + ": expected " + std::to_string(width) +
                                              " fields, found " + std::to_string(fields.size()));
    }
    std::vector<double> values;
    values.reserve(width - 1);
    for (std::size_t c = 0; c < width; ++c) {
      if (c == group_idx) continue;
      double v = 0.0;
      const auto& f = fields[c];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (f.empty() || res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::non_numeric_cell, detail::location(li + 1, c) + ": '" + f + "' is not a finite number");
      }
      values.push_back(v);
    }
    rows[fields[group_idx]].push_back(std::move(values));
  }
  if (rows.empty()) throw Error(ErrorCode::parse_error, "no data rows");
  for (auto& [label, r] : rows) ds.groups.emplace(label, SampleSet::from_rows(r));
  return ds;
}

inline LabeledDataset load_csv(const std::string& path, const std::string& group_column, bool has_header = true) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::parse_error, "cannot open '" + path + "'");
  return load_csv(in, group_column, has_header);
}

/// Writes the dataset back in the layout load_csv reads (values to full
/// double precision, label column last).
inline void write_csv(const LabeledDataset& ds, std::ostream& out, const std::string& group_column = "group") {
  for (const auto& name : ds.variable_names) out << name << ',';
  out << group_column << '\n';
  char buf[32];
  for (const auto& [label, sample] : ds.groups) {
    for (std::size_t i = 0; i < sample.size(); ++i) {
      for (std::size_t j = 0; j < sample.dim(); ++j) {
        std::snprintf(buf, sizeof buf, "%.17g", sample.matrix()(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        out << buf << ',';
      }
      out << label << '\n';
    }
  }
}

}  // namespace ddtest
