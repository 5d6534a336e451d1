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

#include "ddtest/calibration.hpp"
#include "ddtest/convex_hull.hpp"
#include "ddtest/csv.hpp"
#include "ddtest/depth.hpp"
#include "ddtest/error.hpp"
#include "ddtest/multi_sample.hpp"
#include "ddtest/quality.hpp"
#include "ddtest/random.hpp"
#include "ddtest/sample_set.hpp"
#include "ddtest/scale_curve.hpp"
#include "ddtest/simulation.hpp"
#include "ddtest/statistic.hpp"
#include "ddtest/two_sample.hpp"
