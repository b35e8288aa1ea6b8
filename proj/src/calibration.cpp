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

#include "civic/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <iomanip>
#include <numeric>
#include <sstream>

#include "civic/error.hpp"

namespace civic::calibration {

SlopeList extract_decision_windows(const trace::Trace& trace, const validator::ValidatorSpec& spec) {
  spec.validate();
  SlopeList slopes;
  std::deque<std::uint32_t> window;
  std::uint64_t seen = 0;
  for (const trace::TraceRecord& r : trace.records) {
    window.push_back(static_cast<std::uint32_t>(validator::field_value(r.message, spec.monitored_field)));
    if (window.size() > spec.window) window.pop_front();
    ++seen;
    if (window.size() < spec.window) continue;
    if (spec.mode == validator::WindowMode::Tumbling && seen % spec.window != 0) continue;
    if (!validator::gate_holds(spec.gate, r.message)) continue;
    slopes.push_back(validator::slope_from_key(validator::slope_key(window.front(), window.back())));
  }
  if (slopes.empty()) {
    throw CalibrationError("run '" + trace.header.run_id + "' has no qualifying decision windows");
  }
  return slopes;
}

BaselineSlopes fit_baselines(const ClassSlopes& slopes) {
  BaselineSlopes out;
  for (Severity s : kSeverityClasses) {
    const SlopeList& list = slopes[class_index(s)];
    if (list.empty()) {
      throw CalibrationError("no training windows for class " + std::string(to_string(s)));
    }
    ClassBaseline& c = out.classes[class_index(s)];
    c.count = list.size();
    const double sum = std::accumulate(list.begin(), list.end(), 0.0);
    c.mean = sum / static_cast<double>(c.count);
    double sq = 0.0;
    for (std::int32_t v : list) sq += (v - c.mean) * (v - c.mean);
    c.stddev = c.count > 1 ? std::sqrt(sq / static_cast<double>(c.count - 1)) : 0.0;
    c.baseline = static_cast<std::int32_t>(std::lround(c.mean));
    const auto [mn, mx] = std::minmax_element(list.begin(), list.end());
    c.min = *mn;
    c.max = *mx;
  }
  const std::int32_t n = out[Severity::Normal].baseline;
  const std::int32_t w = out[Severity::Warning].baseline;
  const std::int32_t e = out[Severity::Error].baseline;
  if (!((n < w && w < e) || (n > w && w > e))) {
    throw CalibrationError("class baselines not strictly ordered (normal " + std::to_string(n) +
                           ", warning " + std::to_string(w) + ", error " + std::to_string(e) +
                           "); retune plant or controller");
  }
  return out;
}

namespace {

std::array<Severity, 3> key_order(const BaselineSlopes& b) {
  std::array<Severity, 3> order = kSeverityClasses;
  std::sort(order.begin(), order.end(),
            [&](Severity x, Severity y) { return b[x].key() < b[y].key(); });
  return order;
}

}  // namespace

dp::RangeTable build_ranges(const BaselineSlopes& baselines) {
  const auto order = key_order(baselines);
  std::vector<std::uint32_t> bounds;
  for (std::size_t i = 0; i + 1 < order.size(); ++i) {
    const std::uint32_t lo = baselines[order[i]].key();
    const std::uint32_t hi = baselines[order[i + 1]].key();
    bounds.push_back(lo + ((hi - lo + 1) >> 1));
  }
  return build_ranges(baselines, bounds);
}

dp::RangeTable build_ranges(const BaselineSlopes& baselines,
                            const std::vector<std::uint32_t>& boundaries) {
  if (boundaries.size() != 2 || !(boundaries[0] < boundaries[1])) {
    throw CalibrationError("range boundaries must be two ascending keys");
  }
  const auto order = key_order(baselines);
  std::vector<std::uint32_t> actions;
  for (Severity s : order) actions.push_back(static_cast<std::uint32_t>(s));
  return dp::RangeTable::from_boundaries(boundaries, actions);
}

bool CalibrationResult::training_perfect() const {
  for (std::size_t t = 0; t < 3; ++t) {
    for (std::size_t p = 0; p < 3; ++p) {
      if (t != p && training_confusion[t][p] != 0) return false;
    }
  }
  return true;
}

std::string CalibrationResult::report_text() const {
  std::ostringstream out;
  out << "calibration" << (overridden ? " (manual boundaries)" : "") << '\n';
  out << std::left << std::setw(10) << "class" << std::right << std::setw(8) << "windows"
      << std::setw(12) << "mean" << std::setw(10) << "stddev" << std::setw(10) << "min"
      << std::setw(10) << "max" << std::setw(12) << "baseline" << std::setw(14) << "key" << '\n';
  for (Severity s : kSeverityClasses) {
    const ClassBaseline& c = baselines[s];
    out << std::left << std::setw(10) << to_string(s) << std::right << std::setw(8) << c.count
        << std::setw(12) << std::fixed << std::setprecision(2) << c.mean << std::setw(10)
        << c.stddev << std::setw(10) << c.min << std::setw(10) << c.max << std::setw(12)
        << c.baseline << std::setw(14) << c.key() << '\n';
  }
  out << "ranges:\n";
  for (const dp::RangeEntry& e : table.entries()) {
    out << "  [" << e.lo << ", " << e.hi << ") -> "
        << to_string(static_cast<Severity>(e.action)) << "  (slope "
        << validator::slope_from_key(static_cast<std::uint32_t>(e.lo)) << " .. "
        << (e.hi == dp::kKeySpaceEnd ? std::string("max")
                                     : std::to_string(static_cast<std::int64_t>(e.hi) -
                                                      validator::kSlopeBias))
        << ")\n";
  }
  out << "training fit: " << (training_perfect() ? "perfect" : "imperfect") << '\n';
  return out.str();
}

CalibrationResult calibrate(const std::vector<trace::Trace>& training,
                            const validator::ValidatorSpec& spec,
                            const std::optional<std::vector<std::uint32_t>>& boundary_override) {
  CalibrationResult result;
  for (const trace::Trace& t : training) {
    if (t.header.scenario != spec.scenario) {
      throw CalibrationError("run '" + t.header.run_id + "' belongs to another scenario");
    }
    SlopeList s = extract_decision_windows(t, spec);
    SlopeList& pool = result.training_slopes[class_index(t.header.severity)];
    pool.insert(pool.end(), s.begin(), s.end());
  }
  result.baselines = fit_baselines(result.training_slopes);
  const auto& manual = boundary_override ? boundary_override : spec.manual_boundaries;
  if (manual) {
    result.table = build_ranges(result.baselines, *manual);
    result.overridden = true;
  } else {
    result.table = build_ranges(result.baselines);
  }
  for (Severity truth : kSeverityClasses) {
    for (std::int32_t slope : result.training_slopes[class_index(truth)]) {
      const Severity p = validator::classify(validator::key_from_slope(slope), result.table);
      ++result.training_confusion[class_index(truth)][class_index(p)];
    }
  }
  return result;
}

}  // namespace civic::calibration
