/* Copyright 2026 The civic Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *   http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "civic/dataplane/tables.hpp"
#include "civic/trace.hpp"
#include "civic/validator.hpp"

namespace civic::calibration {

using SlopeList = std::vector<std::int32_t>;
using ClassSlopes = std::array<SlopeList, 3>;  // indexed by class_index()

struct ClassBaseline {
  double mean = 0.0;
  std::int32_t baseline = 0;  // mean rounded to the nearest integer
  std::size_t count = 0;
  double stddev = 0.0;
  std::int32_t min = 0;
  std::int32_t max = 0;

  std::uint32_t key() const { return validator::key_from_slope(baseline); }
};

struct BaselineSlopes {
  std::array<ClassBaseline, 3> classes;

  const ClassBaseline& operator[](Severity s) const { return classes[class_index(s)]; }
};

/// Endpoint-difference slopes of every decision point in a trace, computed
/// with the data-plane arithmetic. Throws CalibrationError naming the run
/// when none qualify.
SlopeList extract_decision_windows(const trace::Trace& trace, const validator::ValidatorSpec& spec);

/// Per-class arithmetic mean. Throws CalibrationError if a class is empty or
/// the rounded baselines are not strictly monotone Normal -> Warning -> Error.
BaselineSlopes fit_baselines(const ClassSlopes& slopes);

/// Ranges split at the midpoints of adjacent biased baselines, computed as
/// lo + ((hi - lo + 1) >> 1) so that every key goes to its nearest baseline
/// and an exact midpoint goes to the upper range.
dp::RangeTable build_ranges(const BaselineSlopes& baselines);

/// Ranges split at explicit boundaries (manual override), actions assigned
/// in the key order of the baselines.
dp::RangeTable build_ranges(const BaselineSlopes& baselines,
                            const std::vector<std::uint32_t>& boundaries);

struct CalibrationResult {
  BaselineSlopes baselines;
  dp::RangeTable table;
  ClassSlopes training_slopes;
  // [truth][predicted] over training decision windows.
  std::array<std::array<std::size_t, 3>, 3> training_confusion{};
  bool overridden = false;

  bool training_perfect() const;
  std::string report_text() const;
};

/// Pools all decision windows of all training runs per class, fits the
/// baselines and builds the table.
CalibrationResult calibrate(const std::vector<trace::Trace>& training,
                            const validator::ValidatorSpec& spec,
                            const std::optional<std::vector<std::uint32_t>>& boundary_override = {});

}  // namespace civic::calibration
