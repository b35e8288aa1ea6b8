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
#include <filesystem>
#include <set>

#include "civic/error.hpp"
#include "civic/experiment.hpp"
#include "doctest.h"

using namespace civic;
using namespace civic::experiment;

namespace {

RunSpec first_run(const ExperimentPlan& plan, Split split, Severity s) {
  for (const RunSpec& r : plan_runs(plan)) {
    if (r.split == split && r.severity == s) return r;
  }
  throw Error("no such run");
}

trace::Trace fixture(Scenario sc, Severity s) {
  const ExperimentPlan plan = default_plan(sc);
  return simulate_run(plan, first_run(plan, Split::Test, s)).trace;
}

validator::ValidatorSpec calibrated(Scenario sc) {
  const ExperimentPlan plan = default_plan(sc);
  validator::ValidatorSpec spec = plan.validator;
  spec.table = calibration::calibrate(simulate_split(plan, Split::Training), spec).table;
  return spec;
}

}  // namespace

TEST_CASE("experiment: run layout and seeds") {
  const ExperimentPlan plan = default_plan(Scenario::CloggedPipe);
  const auto runs = plan_runs(plan);
  CHECK(runs.size() == 45);
  std::set<std::uint64_t> seeds;
  std::set<std::string> ids;
  for (const RunSpec& r : runs) {
    seeds.insert(r.seed);
    ids.insert(r.id);
  }
  CHECK(seeds.size() == 45);
  CHECK(ids.size() == 45);
  CHECK(runs.front().id == "clogged_pipe-train-normal-00");
  CHECK(runs.back().id == "clogged_pipe-test-error-09");
  CHECK(default_plan(Scenario::CloggedPipe, true).test_initial_L[2] == 6.5);
  CHECK(default_plan(Scenario::CloggedPipe, true).training_initial_L[2] == 7.5);
}

TEST_CASE("experiment: zero-length run gives an empty trace") {
  ExperimentPlan plan = default_plan(Scenario::CloggedPipe);
  plan.schedule = {{0.0, Eigen::Vector3d::Zero()}};
  const SimulatedRun r = simulate_run(plan, plan_runs(plan).front());
  CHECK(r.trace.records.empty());
  CHECK_FALSE(r.diverged);
}

TEST_CASE("experiment: fixed seed reproduces the trace byte for byte") {
  const ExperimentPlan plan = default_plan(Scenario::FailingPump);
  const RunSpec run = first_run(plan, Split::Training, Severity::Warning);
  CHECK(trace::to_text(simulate_run(plan, run).trace) == trace::to_text(simulate_run(plan, run).trace));
  RunSpec other = run;
  other.seed += 1;
  CHECK(trace::to_text(simulate_run(plan, other).trace) != trace::to_text(simulate_run(plan, run).trace));
}

TEST_CASE("experiment: a nominal clogged-pipe run holds the gate for a full window") {
  const trace::Trace t = fixture(Scenario::CloggedPipe, Severity::Normal);
  CHECK(t.records.size() == 100);
  int run = 0, longest = 0;
  for (const auto& r : t.records) {
    run = r.message.levels_mL[2] > 3000 && r.message.valve2_permille >= 800 ? run + 1 : 0;
    longest = std::max(longest, run);
  }
  CHECK(longest >= 20);
  for (const auto& r : t.records) CHECK(r.truth == Severity::Normal);
}

TEST_CASE("experiment: the pump runs at full power while L1 rises through the gate") {
  const trace::Trace t = fixture(Scenario::FailingPump, Severity::Normal);
  for (const auto& r : t.records) {
    if (r.message.seq > 0 && r.message.levels_mL[0] < 8000) CHECK(r.message.pump_permille > 990);
  }
}

TEST_CASE("replay: socket and in-process labels are identical") {
  const auto spec = calibrated(Scenario::CloggedPipe);
  for (Severity s : kSeverityClasses) {
    const trace::Trace t = fixture(Scenario::CloggedPipe, s);
    replay::SocketOptions fast;
    fast.fast = true;
    const trace::Trace a = replay::replay(t, spec, replay::Mode::InProcess);
    const trace::Trace b = replay::replay(t, spec, replay::Mode::Socket, fast);
    CHECK(a == b);
    for (const auto& r : a.records) CHECK(r.label.has_value());
  }
}

TEST_CASE("replay: fresh validators give identical labels; empty traces stay empty") {
  const auto spec = calibrated(Scenario::CloggedPipe);
  const trace::Trace t = fixture(Scenario::CloggedPipe, Severity::Warning);
  CHECK(replay::replay(t, spec, replay::Mode::InProcess) == replay::replay(t, spec, replay::Mode::InProcess));
  trace::Trace empty;
  CHECK(replay::replay(empty, spec, replay::Mode::InProcess).records.empty());
  replay::SocketOptions fast;
  fast.fast = true;
  CHECK(replay::replay(empty, spec, replay::Mode::Socket, fast).records.empty());
}

TEST_CASE("replay: scenario mismatch is rejected") {
  const auto spec = validator::default_spec(Scenario::FailingPump);
  CHECK_THROWS_AS(replay::replay(fixture(Scenario::CloggedPipe, Severity::Normal), spec, replay::Mode::InProcess),
                  ReplayError);
  CHECK(replay::parse_mode("socket-replay") == replay::Mode::Socket);
  CHECK_THROWS_AS(replay::parse_mode("carrier-pigeon"), ConfigError);
}

TEST_CASE("experiment: plan validation") {
  ExperimentPlan p = default_plan(Scenario::CloggedPipe);
  p.training_runs = 0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = default_plan(Scenario::CloggedPipe);
  p.severities = {Severity::Normal, Severity::Normal};
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = default_plan(Scenario::CloggedPipe);
  p.validator = validator::default_spec(Scenario::FailingPump);
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = default_plan(Scenario::CloggedPipe);
  p.schedule[0].duration_s = -1.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
  p = default_plan(Scenario::CloggedPipe);
  p.test_initial_L[2] = 12.0;
  CHECK_THROWS_AS(p.validate(), ConfigError);
}

TEST_CASE("experiment: end to end is deterministic and writes its bundle") {
  ExperimentPlan plan = default_plan(Scenario::CloggedPipe);
  plan.training_runs = 2;
  plan.test_runs = 2;
  const ReportBundle a = run_experiment(plan);
  const ReportBundle b = run_experiment(plan);
  CHECK(a.text() == b.text());
  auto ja = a.to_json(), jb = b.to_json();
  ja.erase("generated_at");
  jb.erase("generated_at");
  CHECK(ja.dump() == jb.dump());
  CHECK(a.test.size() == 6);
  CHECK(a.test == b.test);

  const auto dir = std::filesystem::temp_directory_path() / "civic_bundle_test";
  std::filesystem::remove_all(dir);
  a.write(dir);
  for (const char* f : {"report.txt", "report.json", "plan.json", "validator.json"}) {
    CHECK(std::filesystem::exists(dir / f));
  }
  CHECK(trace::read_trace(dir / "traces" / "test" / "clogged_pipe-test-error-01.trace") == a.test.back());
  std::filesystem::remove_all(dir);
}

TEST_CASE("experiment: calibration errors name the run") {
  ExperimentPlan plan = default_plan(Scenario::CloggedPipe);
  plan.training_initial_L = {0.0, 0.0, 2.0, 0.0};  // never above the 3 L gate
  try {
    run_experiment(plan);
    FAIL("expected CalibrationError");
  } catch (const CalibrationError& e) {
    CHECK(std::string(e.what()).find("clogged_pipe-train-") != std::string::npos);
  }
}
