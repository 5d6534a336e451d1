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

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddtest {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  singular_covariance,
  degenerate_sample,
  size_limit,
  tied_ranks,
  singular_scatter,
  domain_error,
  unknown_statistic,
  parse_error,
  missing_group_column,
  non_numeric_cell,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "InvalidArgument";
    case ErrorCode::dimension_mismatch: return "DimensionMismatch";
    case ErrorCode::singular_covariance: return "SingularCovariance";
    case ErrorCode::degenerate_sample: return "DegenerateSample";
    case ErrorCode::size_limit: return "SizeLimit";
    case ErrorCode::tied_ranks: return "TiedRanks";
    case ErrorCode::singular_scatter: return "SingularScatter";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::unknown_statistic: return "UnknownStatistic";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::missing_group_column: return "MissingGroupColumn";
    case ErrorCode::non_numeric_cell: return "NonNumericCell";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (and the CLI) can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ddtest
