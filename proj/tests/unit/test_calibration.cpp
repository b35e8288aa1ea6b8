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
#include <cstdlib>

#include "civic/calibration.hpp"
#include "civic/error.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace civic;
using namespace civic::calibration;
using validator::key_from_slope;

namespace {

BaselineSlopes baselines(std::int32_t n, std::int32_t w, std::int32_t e) {
  ClassSlopes s;
  s[0] = {n};
  s[1] = {w};
  s[2] = {e};
  return fit_baselines(s);
}

/// Clogged-pipe trace: gate open throughout, L3 falling by `step` mL per
/// sample, so every tumbling window has slope 19 * step.
trace::Trace ramp_trace(const std::string& id, Severity truth, std::int32_t step, std::size_t n) {
  trace::Trace t;
  t.header.run_id = id;
  t.header.scenario = Scenario::CloggedPipe;
  t.header.severity = truth;
  for (std::size_t i = 0; i < n; ++i) {
    trace::TraceRecord r;
    r.message.seq = static_cast<std::uint32_t>(i);
    r.message.levels_mL[2] = static_cast<std::uint32_t>(9000 + step * static_cast<std::int32_t>(i));
    r.message.valve2_permille = 1000;
    r.truth = truth;
    t.records.push_back(r);
  }
  return t;
}

}  // namespace

TEST_CASE("calibration: midpoint boundaries") {
  const dp::RangeTable t = build_ranges(baselines(-400, -250, -100));
  CHECK(t.boundaries() == std::vector<std::uint32_t>{0x80000000U - 325U, 0x80000000U - 175U});
  CHECK(t.lookup(key_from_slope(-326)) == 0);
  CHECK(t.lookup(key_from_slope(-325)) == 1);  // equidistant: upper key range
  CHECK(t.lookup(key_from_slope(-176)) == 1);
  CHECK(t.lookup(key_from_slope(-175)) == 2);
}

TEST_CASE("calibration: reversed orientation maps the largest key to normal") {
  const dp::RangeTable t = build_ranges(baselines(2900, 2260, 1630));
  CHECK(t.lookup(key_from_slope(3000)) == 0);
  CHECK(t.lookup(key_from_slope(2300)) == 1);
  CHECK(t.lookup(key_from_slope(1000)) == 2);
}

TEST_CASE("calibration: ranges classify to the nearest baseline (randomized)") {
  auto g = oracle::rng(17);
  std::uniform_int_distribution<std::int32_t> b(-5000, 5000), off(-8000, 8000);
  int checked = 0;
  while (checked < 2000) {
    std::array<std::int32_t, 3> v{b(g), b(g), b(g)};
    std::sort(v.begin(), v.end());
    if (v[0] == v[1] || v[1] == v[2]) continue;
    const bool reversed = g() & 1;
    const BaselineSlopes bs = reversed ? baselines(v[2], v[1], v[0]) : baselines(v[0], v[1], v[2]);
    const dp::RangeTable t = build_ranges(bs);
    for (int k = 0; k < 20; ++k) {
      const std::int32_t s = off(g);
      // Nearest baseline, ties to the larger slope.
      std::size_t best = 0;
      for (std::size_t i = 1; i < 3; ++i) {
        const auto di = std::llabs(std::int64_t{s} - v[i]), db = std::llabs(std::int64_t{s} - v[best]);
        if (di <= db) best = i;
      }
      const std::uint32_t expect = reversed ? static_cast<std::uint32_t>(2 - best) : static_cast<std::uint32_t>(best);
      CHECK(t.lookup(key_from_slope(s)) == expect);
    }
    ++checked;
  }
}

TEST_CASE("calibration: fit statistics") {
  ClassSlopes s;
  s[0] = {-500, -480, -501};
  s[1] = {-361, -360};
  s[2] = {-270};
  const BaselineSlopes b = fit_baselines(s);
  CHECK(b[Severity::Normal].mean == doctest::Approx(-493.6667).epsilon(1e-6));
  CHECK(b[Severity::Normal].baseline == -494);
  CHECK(b[Severity::Warning].baseline == -361);  // -360.5 rounds away from zero
  CHECK(b[Severity::Normal].min == -501);
  CHECK(b[Severity::Normal].max == -480);
  CHECK(b[Severity::Error].stddev == 0.0);
  CHECK(b[Severity::Warning].count == 2);
}

TEST_CASE("calibration: errors") {
  ClassSlopes s;
  s[0] = {-400};
  s[2] = {-100};
  CHECK_THROWS_AS(fit_baselines(s), CalibrationError);
  CHECK_THROWS_AS(baselines(-400, -100, -250), CalibrationError);
  CHECK_THROWS_AS(baselines(-400, -400, -100), CalibrationError);
  CHECK_THROWS_AS(build_ranges(baselines(-400, -250, -100), {5, 5}), CalibrationError);
  const trace::Trace flat = ramp_trace("quiet-run", Severity::Normal, 0, 10);
  try {
    extract_decision_windows(flat, validator::default_spec(Scenario::CloggedPipe));
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    CHECK(std::string(e.what()).find("quiet-run") != std::string::npos);
  }
}

TEST_CASE("calibration: end to end on synthetic ramps") {
  const auto spec = validator::default_spec(Scenario::CloggedPipe, validator::WindowMode::Tumbling);
  std::vector<trace::Trace> training;
  for (int r = 0; r < 5; ++r) {
    training.push_back(ramp_trace("n" + std::to_string(r), Severity::Normal, -26 + r % 2, 100));
    training.push_back(ramp_trace("w" + std::to_string(r), Severity::Warning, -19, 100));
    training.push_back(ramp_trace("e" + std::to_string(r), Severity::Error, -14, 100));
  }
  const CalibrationResult c = calibrate(training, spec);
  CHECK(c.training_perfect());
  CHECK(c.training_slopes[1].size() == 25);
  CHECK(c.baselines[Severity::Warning].baseline == -361);
  CHECK(c.baselines[Severity::Error].baseline == -266);
  CHECK_FALSE(c.overridden);
  CHECK(c.report_text().find("training fit: perfect") != std::string::npos);

  const std::vector<std::uint32_t> manual{key_from_slope(-420), key_from_slope(-300)};
  const CalibrationResult m = calibrate(training, spec, manual);
  CHECK(m.overridden);
  CHECK(m.table.boundaries() == manual);
  auto with_spec = spec;
  with_spec.manual_boundaries = manual;
  CHECK(calibrate(training, with_spec).table == m.table);
}

TEST_CASE("calibration: tumbling windows are every n-th sample") {
  const auto spec = validator::default_spec(Scenario::CloggedPipe, validator::WindowMode::Tumbling);
  CHECK(extract_decision_windows(ramp_trace("t", Severity::Normal, -10, 100), spec).size() == 5);
  const auto sliding = validator::default_spec(Scenario::CloggedPipe, validator::WindowMode::Sliding);
  CHECK(extract_decision_windows(ramp_trace("t", Severity::Normal, -10, 100), sliding).size() == 81);
}
