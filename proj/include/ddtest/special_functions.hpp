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

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>

#include "ddtest/error.hpp"

namespace ddtest {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

/// Upper tail 1 - Phi(x), computed directly so it stays accurate far out.
inline double normal_sf(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

inline double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorCode::domain_error, "normal quantile needs p in (0,1)");
  return -std::sqrt(2.0) * boost::math::erfc_inv(2.0 * p);
}

/// P(F > x) for the F distribution with (d1, d2) degrees of freedom.
inline double f_sf(double x, double d1, double d2) {
  if (!(d1 > 0.0 && d2 > 0.0)) throw Error(ErrorCode::domain_error, "F degrees of freedom must be positive");
  if (x <= 0.0) return 1.0;
  if (std::isinf(x)) return 0.0;
  return boost::math::ibetac(d1 / 2.0, d2 / 2.0, d1 * x / (d1 * x + d2));
}

}  // namespace ddtest
