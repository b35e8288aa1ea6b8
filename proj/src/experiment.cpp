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
#include "civic/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include "civic/config_json.hpp"
#include "civic/error.hpp"
#include "civic/wire.hpp"

namespace civic::experiment {
namespace {

using nlohmann::json;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t run_seed(std::uint64_t base, Split split, Severity s, int index) {
  const std::uint64_t tag = (split == Split::Training ? 0U : 1U) << 24 |
                            std::uint64_t{static_cast<std::uint8_t>(s)} << 16 |
                            static_cast<std::uint64_t>(index);
  return splitmix64(splitmix64(base) ^ tag);
}

std::string_view split_name(Split s) { return s == Split::Training ? "train" : "test"; }

std::string two_digits(int i) {
  std::string s = std::to_string(i);
  return s.size() < 2 ? "0" + s : s;
}

std::vector<int> phase_steps(const std::vector<SchedulePhase>& schedule) {
  std::vector<int> steps;
  for (const SchedulePhase& p : schedule) {
    steps.push_back(static_cast<int>(std::lround(p.duration_s / kControlPeriod_s)));
  }
  return steps;
}

wire::ControlMessage to_message(std::uint32_t seq, const plant::SensorFrame& f) {
  wire::ControlMessage m;
  m.seq = seq;
  m.timestamp_us = std::uint64_t{seq} * 100000U;
  for (std::size_t i = 0; i < plant::kTankCount; ++i) m.levels_mL[i] = wire::to_milliliters(f.levels_L[i]);
  m.pump_permille = wire::to_permille(f.pump);
  m.valve1_permille = wire::to_permille(f.valve1);
  m.valve2_permille = wire::to_permille(f.valve2);
  return m;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json calibration_json(const calibration::CalibrationResult& c) {
  json classes = json::object();
  for (Severity s : kSeverityClasses) {
    const auto& b = c.baselines[s];
    classes[std::string(to_string(s))] = {{"mean", b.mean},       {"baseline", b.baseline},
                                          {"key", b.key()},       {"count", b.count},
                                          {"stddev", b.stddev},   {"min", b.min},
                                          {"max", b.max}};
  }
  return {{"classes", classes},
          {"boundaries", c.table.boundaries()},
          {"overridden", c.overridden},
          {"training_perfect", c.training_perfect()}};
}

json volumes_json(const plant::TankVolumes& v) { return json(v); }

}  // namespace

double ExperimentPlan::duration_s() const {
  double d = 0.0;
  for (const SchedulePhase& p : schedule) d += p.duration_s;
  return d;
}

void ExperimentPlan::validate() const {
  if (training_runs < 1 || test_runs < 1) throw ConfigError("plan: runs must be >= 1");
  if (severities.empty()) throw ConfigError("plan: severity set is empty");
  std::set<Severity> seen;
  for (Severity s : severities) {
    if (!is_decision(s)) throw ConfigError("plan: no_decision is not a run severity");
    if (!seen.insert(s).second) throw ConfigError("plan: duplicate severity");
  }
  for (const SchedulePhase& p : schedule) {
    if (!std::isfinite(p.duration_s) || p.duration_s < 0.0) {
      throw ConfigError("plan: phase durations must be finite and >= 0");
    }
    if (!p.setpoints_L.allFinite()) throw ConfigError("plan: setpoints must be finite");
  }
  plant.validate(kControlPeriod_s);
  plant::init_state(plant, training_initial_L);
  plant::init_state(plant, test_initial_L);
  validator.validate();
  if (validator.scenario != scenario) throw ConfigError("plan: validator scenario mismatch");
  std::set<std::uint64_t> seeds;
  for (const RunSpec& r : plan_runs(*this)) {
    if (!seeds.insert(r.seed).second) throw ConfigError("plan: seed collision at run " + r.id);
  }
}

ExperimentPlan default_plan(Scenario scenario, bool shifted) {
  ExperimentPlan p;
  p.scenario = scenario;
  p.validator = validator::default_spec(scenario, validator::WindowMode::Tumbling);
  if (scenario == Scenario::CloggedPipe) {
    p.name = shifted ? "clogged_pipe_shifted" : "clogged_pipe";
    p.base_seed = 7500;
    p.training_initial_L = {0.0, 0.0, 7.5, 0.0};
    p.test_initial_L = {0.0, 0.0, shifted ? 6.5 : 7.5, 0.0};
    p.controller.mpc.state_weight = Eigen::Vector3d(0.0, 0.0, 1.0);
    // Drain T3 for a fixed interval, then hold what is left.
    p.schedule = {{8.0, Eigen::Vector3d(0.0, 0.0, 0.5)}, {2.0, Eigen::Vector3d(0.0, 0.0, 10.0)}};
  } else {
    p.name = "failing_pump";
    p.base_seed = 9000;
    p.training_initial_L = {0.5, 0.0, 0.0, 9.5};
    p.test_initial_L = p.training_initial_L;
    p.controller.mpc.state_weight = Eigen::Vector3d(1.0, 0.0, 0.0);
    p.schedule = {{40.0, Eigen::Vector3d(9.0, 0.0, 0.0)}};
  }
  return p;
}

json to_json(const ExperimentPlan& p) {
  json sev = json::array();
  for (Severity s : p.severities) sev.push_back(to_string(s));
  json schedule = json::array();
  for (const SchedulePhase& ph : p.schedule) {
    schedule.push_back({{"duration_s", ph.duration_s},
                        {"setpoints_L", {ph.setpoints_L[0], ph.setpoints_L[1], ph.setpoints_L[2]}}});
  }
  return {
      {"name", p.name},
      {"scenario", to_string(p.scenario)},
      {"severities", sev},
      {"training_runs", p.training_runs},
      {"test_runs", p.test_runs},
      {"training_initial_L", volumes_json(p.training_initial_L)},
      {"test_initial_L", volumes_json(p.test_initial_L)},
      {"base_seed", p.base_seed},
      {"mode", replay::to_string(p.mode)},
      {"fast", p.fast},
      {"plant", config::to_json(p.plant)},
      {"controller", config::to_json(p.controller)},
      {"schedule", schedule},
      {"validator", config::to_json(p.validator)},
  };
}

ExperimentPlan plan_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("plan: expected an object");
  static const std::set<std::string> allowed{
      "name",     "scenario", "severities", "training_runs", "test_runs",  "training_initial_L",
      "test_initial_L", "base_seed", "mode", "fast", "plant", "controller", "schedule",
      "validator", "shifted"};
  for (const auto& item : j.items()) {
    if (!allowed.count(item.key())) throw ConfigError("plan: unknown key '" + item.key() + "'");
  }
  try {
    const Scenario scenario =
        j.contains("scenario") ? parse_scenario(j.at("scenario").get<std::string>())
                               : Scenario::CloggedPipe;
    ExperimentPlan p = default_plan(scenario, j.value("shifted", false));
    if (j.contains("name")) p.name = j.at("name").get<std::string>();
    if (j.contains("severities")) {
      p.severities.clear();
      for (const json& s : j.at("severities")) p.severities.push_back(parse_severity(s.get<std::string>()));
    }
    if (j.contains("training_runs")) p.training_runs = j.at("training_runs").get<int>();
    if (j.contains("test_runs")) p.test_runs = j.at("test_runs").get<int>();
    if (j.contains("training_initial_L")) p.training_initial_L = j.at("training_initial_L").get<plant::TankVolumes>();
    if (j.contains("test_initial_L")) p.test_initial_L = j.at("test_initial_L").get<plant::TankVolumes>();
    if (j.contains("base_seed")) p.base_seed = j.at("base_seed").get<std::uint64_t>();
    if (j.contains("mode")) p.mode = replay::parse_mode(j.at("mode").get<std::string>());
    if (j.contains("fast")) p.fast = j.at("fast").get<bool>();
    if (j.contains("plant")) p.plant = config::plant_config_from_json(j.at("plant"));
    if (j.contains("controller")) p.controller = config::controller_config_from_json(j.at("controller"));
    if (j.contains("schedule")) {
      p.schedule.clear();
      for (const json& ph : j.at("schedule")) {
        const auto sp = ph.at("setpoints_L").get<std::array<double, 3>>();
        p.schedule.push_back({ph.at("duration_s").get<double>(), Eigen::Vector3d(sp[0], sp[1], sp[2])});
      }
    }
    if (j.contains("validator")) {
      json v = j.at("validator");
      if (!v.contains("scenario")) v["scenario"] = to_string(scenario);
      p.validator = config::validator_spec_from_json(v);
    }
    p.validate();
    return p;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("plan: ") + e.what());
  }
}

ExperimentPlan load_plan(const std::filesystem::path& path) {
  try {
    return plan_from_json(config::read_json_file(path));
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

std::vector<RunSpec> plan_runs(const ExperimentPlan& plan) {
  std::vector<RunSpec> runs;
  for (Split split : {Split::Training, Split::Test}) {
    const int count = split == Split::Training ? plan.training_runs : plan.test_runs;
    for (Severity s : plan.severities) {
      for (int i = 0; i < count; ++i) {
        RunSpec r;
        r.split = split;
        r.severity = s;
        r.index = i;
        r.seed = run_seed(plan.base_seed, split, s, i);
        r.initial_L = split == Split::Training ? plan.training_initial_L : plan.test_initial_L;
        r.id = std::string(to_string(plan.scenario)) + "-" + std::string(split_name(split)) + "-" +
               std::string(to_string(s)) + "-" + two_digits(i);
        runs.push_back(std::move(r));
      }
    }
  }
  return runs;
}

std::uint64_t config_hash(const ExperimentPlan& plan) {
  json j = to_json(plan);
  j.erase("base_seed");
  j.erase("name");
  j.erase("mode");
  j.erase("fast");
  j["plant"].erase("rng_seed");
  return trace::fnv1a64(j.dump());
}

SimulatedRun simulate_run(const ExperimentPlan& plan, const RunSpec& run) {
  SimulatedRun out;
  out.trace.header.run_id = run.id;
  out.trace.header.scenario = plan.scenario;
  out.trace.header.severity = run.severity;
  out.trace.header.config_hash = config_hash(plan);
  out.trace.header.seed = run.seed;

  plant::PlantState state = plant::apply_fault(plant::init_state(plan.plant, run.initial_L),
                                               {plan.scenario, run.severity});
  plant::GaussianNoise noise(run.seed);
  control::LevelController controller(plan.plant, plan.controller);

  std::uint32_t seq = 0;
  const std::vector<int> steps = phase_steps(plan.schedule);
  try {
    for (std::size_t ph = 0; ph < plan.schedule.size(); ++ph) {
      for (int k = 0; k < steps[ph]; ++k, ++seq) {
        const wire::ControlMessage msg = to_message(seq, plant::read_sensors(plan.plant, state, noise));
        out.trace.records.push_back({msg, run.severity, std::nullopt});
        // The controller sees what the switch sees: the encoded levels.
        const Eigen::Vector3d measured(msg.levels_mL[0] / 1000.0, msg.levels_mL[1] / 1000.0,
                                       msg.levels_mL[2] / 1000.0);
        const plant::ActuatorInputs u = controller.compute(measured, plan.schedule[ph].setpoints_L);
        state = plant::advance(plan.plant, state, u, kControlPeriod_s);
      }
    }
  } catch (const NumericalError& e) {
    out.diverged = true;
    out.notice = "run " + run.id + " diverged at sample " + std::to_string(seq) + ": " + e.what();
  }
  out.fallbacks = controller.fallbacks();
  return out;
}

std::vector<trace::Trace> simulate_split(const ExperimentPlan& plan, Split split,
                                         std::vector<std::string>* notices) {
  std::vector<trace::Trace> traces;
  for (const RunSpec& r : plan_runs(plan)) {
    if (r.split != split) continue;
    SimulatedRun s = simulate_run(plan, r);
    if (s.diverged) {
      if (notices) notices->push_back(s.notice + " (excluded)");
      continue;
    }
    if (s.fallbacks > 0 && notices) {
      notices->push_back("run " + r.id + ": " + std::to_string(s.fallbacks) +
                         " controller fallbacks to the previous input");
    }
    traces.push_back(std::move(s.trace));
  }
  return traces;
}

std::vector<trace::Trace> replay_all(const std::vector<trace::Trace>& traces,
                                     const validator::ValidatorSpec& spec, replay::Mode mode,
                                     bool fast) {
  std::vector<trace::Trace> out;
  out.reserve(traces.size());
  replay::SocketOptions options;
  options.fast = fast;
  for (const trace::Trace& t : traces) {
    try {
      out.push_back(replay::replay(t, spec, mode, options));
    } catch (const Error& e) {
      throw ReplayError("run " + t.header.run_id + ": " + e.what());
    }
  }
  return out;
}

std::string trace_file_name(const trace::Trace& t) { return t.header.run_id + ".trace"; }

ReportBundle run_experiment(const ExperimentPlan& plan) {
  plan.validate();
  ReportBundle b;
  b.plan = plan;
  b.timestamp = utc_timestamp();
  b.training = simulate_split(plan, Split::Training, &b.notices);
  b.calibration = calibration::calibrate(b.training, plan.validator);
  b.calibrated = plan.validator;
  b.calibrated.table = b.calibration.table;
  const std::vector<trace::Trace> raw = simulate_split(plan, Split::Test, &b.notices);
  b.test = replay_all(raw, b.calibrated, plan.mode, plan.fast);
  b.windows = metrics::score(b.test);
  b.runs = metrics::score_runs_majority(b.test);
  return b;
}

std::string ReportBundle::text() const {
  std::ostringstream out;
  out << "experiment " << plan.name << '\n'
      << "scenario " << to_string(plan.scenario) << ", window " << plan.validator.window << " ("
      << validator::to_string(plan.validator.mode) << "), replay " << replay::to_string(plan.mode)
      << '\n'
      << "runs: " << training.size() << " training, " << test.size() << " test\n\n"
      << calibration.report_text() << '\n'
      << windows.to_text("window-level scores") << '\n'
      << runs.to_text("per-run majority vote");
  if (!notices.empty()) {
    out << "\nnotices\n";
    for (const std::string& n : notices) out << "  " << n << '\n';
  }
  return out.str();
}

json ReportBundle::to_json() const {
  return {
      {"generated_at", timestamp},
      {"plan", experiment::to_json(plan)},
      {"validator", config::to_json(calibrated)},
      {"calibration", calibration_json(calibration)},
      {"windows", windows.to_json()},
      {"runs", runs.to_json()},
      {"notices", notices},
  };
}

void ReportBundle::write(const std::filesystem::path& dir) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir / "traces" / "train");
  fs::create_directories(dir / "traces" / "test");
  {
    std::ofstream out(dir / "report.txt");
    if (!out) throw Error("cannot write report to '" + dir.string() + "'");
    out << text();
  }
  config::write_json_file(dir / "report.json", to_json());
  config::write_json_file(dir / "plan.json", experiment::to_json(plan));
  config::save_validator_spec(dir / "validator.json", calibrated);
  for (const trace::Trace& t : training) trace::write_trace(dir / "traces" / "train" / trace_file_name(t), t);
  for (const trace::Trace& t : test) trace::write_trace(dir / "traces" / "test" / trace_file_name(t), t);
}

}  // namespace civic::experiment
