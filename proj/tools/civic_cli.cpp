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
// civic: simulate, calibrate, replay and score validator experiments.

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "civic/config_json.hpp"
#include "civic/dataplane/audit.hpp"
#include "civic/error.hpp"
#include "civic/experiment.hpp"

namespace fs = std::filesystem;
using namespace civic;

namespace {

struct PlanArgs {
  std::string plan_file;
  std::string scenario = "clogged_pipe";
  bool shifted = false;
  std::optional<std::uint64_t> seed;
  std::string mode;

  void add_to(CLI::App* cmd) {
    cmd->add_option("-p,--plan", plan_file, "experiment plan (JSON)");
    cmd->add_option("--scenario", scenario, "built-in plan: clogged_pipe or failing_pump");
    cmd->add_flag("--shifted", shifted, "built-in clogged-pipe plan with a 6.5 L test start");
    cmd->add_option("-s,--seed", seed, "override the plan's base seed");
  }

  experiment::ExperimentPlan load() const {
    experiment::ExperimentPlan plan = plan_file.empty()
                                          ? experiment::default_plan(parse_scenario(scenario), shifted)
                                          : experiment::load_plan(plan_file);
    if (seed) plan.base_seed = *seed;
    if (!mode.empty()) plan.mode = replay::parse_mode(mode);
    plan.validate();
    return plan;
  }
};

std::vector<trace::Trace> load_traces(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("'" + dir.string() + "' is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".trace") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<trace::Trace> traces;
  for (const fs::path& f : files) traces.push_back(trace::read_trace(f));
  if (traces.empty()) throw Error("no .trace files in '" + dir.string() + "'");
  return traces;
}

void write_traces(const fs::path& dir, const std::vector<trace::Trace>& traces) {
  fs::create_directories(dir);
  for (const trace::Trace& t : traces) trace::write_trace(dir / experiment::trace_file_name(t), t);
}

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

void print_notices(const std::vector<std::string>& notices) {
  for (const std::string& n : notices) std::cerr << "notice: " << n << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"civic: in-network validation of tank control traffic"};
  app.require_subcommand(1);

  // simulate
  PlanArgs sim_args;
  std::string sim_out;
  std::string sim_split = "all";
  CLI::App* sim = app.add_subcommand("simulate", "simulate the plan's runs and write traces");
  sim_args.add_to(sim);
  sim->add_option("-o,--out", sim_out, "output directory")->required();
  sim->add_option("--split", sim_split, "train, test or all")
      ->check(CLI::IsMember({"train", "test", "all"}));

  // calibrate
  PlanArgs cal_args;
  std::string cal_traces, cal_out, cal_spec;
  std::vector<std::uint32_t> cal_bounds;
  CLI::App* cal = app.add_subcommand("calibrate", "fit the range table on training traces");
  cal_args.add_to(cal);
  cal->add_option("--spec", cal_spec, "validator spec to start from (JSON)");
  cal->add_option("-t,--traces", cal_traces, "directory of training traces")->required();
  cal->add_option("-o,--out", cal_out, "output directory")->required();
  cal->add_option("--boundaries", cal_bounds, "manual range boundaries (biased keys)")->delimiter(',');

  // replay
  std::string rep_spec, rep_traces, rep_out, rep_mode = "in-process";
  bool rep_paced = false;
  CLI::App* rep = app.add_subcommand("replay", "label traces with a calibrated validator");
  rep->add_option("--spec", rep_spec, "calibrated validator spec (JSON)")->required();
  rep->add_option("-t,--traces", rep_traces, "directory of traces")->required();
  rep->add_option("-o,--out", rep_out, "output directory")->required();
  rep->add_option("-m,--mode", rep_mode, "in-process or socket");
  rep->add_flag("--paced", rep_paced, "socket mode: send at the recorded intervals");

  // score
  std::string sc_traces, sc_out;
  CLI::App* sc = app.add_subcommand("score", "score labelled traces");
  sc->add_option("-t,--traces", sc_traces, "directory of labelled traces")->required();
  sc->add_option("-o,--out", sc_out, "output directory (scores.txt, scores.json)");

  // experiment
  PlanArgs exp_args;
  std::string exp_out;
  bool exp_paced = false;
  CLI::App* exp = app.add_subcommand("experiment", "simulate, calibrate, replay and score");
  exp_args.add_to(exp);
  exp->add_option("-o,--out", exp_out, "output directory")->required();
  exp->add_option("-m,--mode", exp_args.mode, "in-process or socket");
  exp->add_flag("--paced", exp_paced, "socket mode: send at the recorded intervals");

  // audit
  std::string aud_spec, aud_scenario = "clogged_pipe", aud_program_out;
  CLI::App* aud = app.add_subcommand("audit", "audit the compiled validator program");
  aud->add_option("--spec", aud_spec, "validator spec (JSON)");
  aud->add_option("--scenario", aud_scenario, "built-in spec when --spec is absent");
  aud->add_option("--program-out", aud_program_out, "write the program description (JSON)");

  // plan
  PlanArgs plan_args;
  CLI::App* plan_cmd = app.add_subcommand("plan", "print a plan as JSON");
  plan_args.add_to(plan_cmd);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*sim) {
      const auto plan = sim_args.load();
      std::vector<std::string> notices;
      if (sim_split != "test") {
        write_traces(fs::path(sim_out) / "train",
                     experiment::simulate_split(plan, experiment::Split::Training, &notices));
      }
      if (sim_split != "train") {
        write_traces(fs::path(sim_out) / "test",
                     experiment::simulate_split(plan, experiment::Split::Test, &notices));
      }
      config::write_json_file(fs::path(sim_out) / "plan.json", experiment::to_json(plan));
      print_notices(notices);
    } else if (*cal) {
      validator::ValidatorSpec spec =
          cal_spec.empty() ? cal_args.load().validator : config::load_validator_spec(cal_spec);
      if (!cal_bounds.empty()) spec.manual_boundaries = cal_bounds;
      const auto result = calibration::calibrate(load_traces(cal_traces), spec);
      spec.table = result.table;
      config::save_validator_spec(fs::path(cal_out) / "validator.json", spec);
      write_text(fs::path(cal_out) / "calibration.txt", result.report_text());
      std::cout << result.report_text();
    } else if (*rep) {
      const auto spec = config::load_validator_spec(rep_spec);
      write_traces(rep_out, experiment::replay_all(load_traces(rep_traces), spec,
                                                   replay::parse_mode(rep_mode), !rep_paced));
    } else if (*sc) {
      const auto traces = load_traces(sc_traces);
      const auto windows = metrics::score(traces);
      const auto runs = metrics::score_runs_majority(traces);
      const std::string text =
          windows.to_text("window-level scores") + '\n' + runs.to_text("per-run majority vote");
      std::cout << text;
      if (!sc_out.empty()) {
        write_text(fs::path(sc_out) / "scores.txt", text);
        config::write_json_file(fs::path(sc_out) / "scores.json",
                                {{"windows", windows.to_json()}, {"runs", runs.to_json()}});
      }
    } else if (*exp) {
      auto plan = exp_args.load();
      if (exp_paced) plan.fast = false;
      const auto bundle = experiment::run_experiment(plan);
      bundle.write(exp_out);
      print_notices(bundle.notices);
      std::cout << bundle.text();
    } else if (*aud) {
      const auto spec = aud_spec.empty()
                            ? validator::default_spec(parse_scenario(aud_scenario))
                            : config::load_validator_spec(aud_spec);
      const auto program = validator::build_program(spec);
      const auto report = dp::audit(program);
      std::cout << report.to_text();
      if (!aud_program_out.empty()) config::write_json_file(aud_program_out, dp::to_json(program));
      return report.pass() ? 0 : 1;
    } else if (*plan_cmd) {
      std::cout << experiment::to_json(plan_args.load()).dump(2) << '\n';
    }
  } catch (const std::exception& e) {
    std::cerr << "civic: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
