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

// End-to-end experiments: closed-loop simulation of training and test runs,
// calibration of the range table on the training runs, replay of the test
// runs through the validator and scoring.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

#include "civic/calibration.hpp"
#include "civic/controller.hpp"
#include "civic/metrics.hpp"
#include "civic/plant.hpp"
#include "civic/replay.hpp"
#include "civic/trace.hpp"
#include "civic/validator.hpp"

namespace civic::experiment {

inline constexpr double kControlPeriod_s = 0.1;

/// Setpoints for L1..L3 (L) held for `duration_s`.
struct SchedulePhase {
  double duration_s = 0.0;
  Eigen::Vector3d setpoints_L = Eigen::Vector3d::Zero();
};

struct ExperimentPlan {
  std::string name = "experiment";
  Scenario scenario = Scenario::CloggedPipe;
  std::vector<Severity> severities{Severity::Normal, Severity::Warning, Severity::Error};
  int training_runs = 5;
  int test_runs = 10;
  plant::TankVolumes training_initial_L{};
  plant::TankVolumes test_initial_L{};
  std::uint64_t base_seed = 1;
  replay::Mode mode = replay::Mode::InProcess;
  bool fast = true;
  plant::PlantConfig plant;
  control::ControllerConfig controller;
  std::vector<SchedulePhase> schedule;
  validator::ValidatorSpec validator;

  double duration_s() const;
  /// Throws ConfigError on an invalid plan (no runs, duplicate seeds, ...).
  void validate() const;
};

/// Reference plans. `shifted` moves the test runs of the clogged pipe to a
/// 6.5 L start while training stays at 7.5 L.
ExperimentPlan default_plan(Scenario scenario, bool shifted = false);

nlohmann::json to_json(const ExperimentPlan& plan);
ExperimentPlan plan_from_json(const nlohmann::json& j);
ExperimentPlan load_plan(const std::filesystem::path& path);

enum class Split { Training, Test };

struct RunSpec {
  std::string id;
  Split split = Split::Training;
  Severity severity = Severity::Normal;
  int index = 0;
  std::uint64_t seed = 0;
  plant::TankVolumes initial_L{};
};

/// All runs of a plan, training first, with their derived seeds.
std::vector<RunSpec> plan_runs(const ExperimentPlan& plan);

/// Fingerprint of everything except seeds that shapes a trace.
std::uint64_t config_hash(const ExperimentPlan& plan);

struct SimulatedRun {
  trace::Trace trace;
  bool diverged = false;
  std::string notice;
  int fallbacks = 0;
};

/// Closed loop at 10 Hz: sample, encode, record with ground truth, control,
/// integrate the plant for one period.
SimulatedRun simulate_run(const ExperimentPlan& plan, const RunSpec& run);

struct ReportBundle {
  ExperimentPlan plan;
  validator::ValidatorSpec calibrated;
  calibration::CalibrationResult calibration;
  std::vector<trace::Trace> training;
  std::vector<trace::Trace> test;  // labelled
  metrics::ConfusionReport windows;
  metrics::ConfusionReport runs;
  std::vector<std::string> notices;
  std::string timestamp;

  /// Human-readable report. Contains no timestamp.
  std::string text() const;
  /// Machine-readable report. The timestamp sits under "generated_at".
  nlohmann::json to_json() const;
  /// report.txt, report.json, plan.json, validator.json and the traces.
  void write(const std::filesystem::path& dir) const;
};

ReportBundle run_experiment(const ExperimentPlan& plan);

/// Pieces of run_experiment for the CLI.
std::vector<trace::Trace> simulate_split(const ExperimentPlan& plan, Split split,
                                         std::vector<std::string>* notices = nullptr);
std::vector<trace::Trace> replay_all(const std::vector<trace::Trace>& traces,
                                     const validator::ValidatorSpec& spec, replay::Mode mode,
                                     bool fast);

std::string trace_file_name(const trace::Trace& t);

}  // namespace civic::experiment
