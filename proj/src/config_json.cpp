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
#include "civic/config_json.hpp"

#include <algorithm>
#include <fstream>
#include <initializer_list>
#include <string>

#include "civic/error.hpp"

namespace civic::config {
namespace {

void check_keys(const json& j, std::initializer_list<std::string_view> allowed,
                std::string_view what) {
  if (!j.is_object()) throw ConfigError(std::string(what) + ": expected an object");
  for (const auto& item : j.items()) {
    if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
      throw ConfigError(std::string(what) + ": unknown key '" + item.key() + "'");
    }
  }
}

template <typename T>
void take(const json& j, const char* key, T& out, std::string_view what) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string(what) + "." + key + ": " + e.what());
  }
}

json vec_json(const Eigen::VectorXd& v) {
  return json(std::vector<double>(v.data(), v.data() + v.size()));
}

void take_vec(const json& j, const char* key, Eigen::VectorXd& out, std::string_view what) {
  if (!j.contains(key)) return;
  std::vector<double> v;
  take(j, key, v, what);
  out = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void take_vec3(const json& j, const char* key, Eigen::Vector3d& out, std::string_view what) {
  if (!j.contains(key)) return;
  std::array<double, 3> v{};
  take(j, key, v, what);
  out = Eigen::Vector3d(v[0], v[1], v[2]);
}

}  // namespace

json to_json(const plant::PlantConfig& c) {
  return {
      {"tank_cross_section_m2", c.tank_cross_section_m2},
      {"outflow_coefficient", c.outflow_coefficient},
      {"pump_gain_L_per_s_at_full", c.pump_gain_L_per_s_at_full},
      {"coupling_coefficient", c.coupling_coefficient},
      {"sensor_noise_sigma_mL", c.sensor_noise_sigma_mL},
      {"rng_seed", c.rng_seed},
      {"dt_sim_s", c.dt_sim_s},
      {"tank_capacity_L", c.tank_capacity_L},
  };
}

plant::PlantConfig plant_config_from_json(const json& j) {
  constexpr std::string_view what = "plant";
  check_keys(j,
             {"tank_cross_section_m2", "outflow_coefficient", "pump_gain_L_per_s_at_full",
              "coupling_coefficient", "sensor_noise_sigma_mL", "rng_seed", "dt_sim_s",
              "tank_capacity_L"},
             what);
  plant::PlantConfig c;
  take(j, "tank_cross_section_m2", c.tank_cross_section_m2, what);
  take(j, "outflow_coefficient", c.outflow_coefficient, what);
  take(j, "pump_gain_L_per_s_at_full", c.pump_gain_L_per_s_at_full, what);
  take(j, "coupling_coefficient", c.coupling_coefficient, what);
  take(j, "sensor_noise_sigma_mL", c.sensor_noise_sigma_mL, what);
  take(j, "rng_seed", c.rng_seed, what);
  take(j, "dt_sim_s", c.dt_sim_s, what);
  take(j, "tank_capacity_L", c.tank_capacity_L, what);
  return c;
}

json to_json(const control::ControllerConfig& c) {
  json mpc{
      {"horizon_steps", c.mpc.horizon_steps},
      {"state_weight", vec_json(c.mpc.state_weight)},
      {"input_weight", c.mpc.input_weight},
      {"input_lower", c.mpc.input_lower},
      {"input_upper", c.mpc.input_upper},
      {"sample_period_s", c.mpc.sample_period_s},
      {"max_iterations", c.mpc.max_iterations},
      {"tolerance", c.mpc.tolerance},
  };
  json pi{
      {"kp", vec_json(c.pi.kp)},
      {"ki", vec_json(c.pi.ki)},
      {"direction", vec_json(c.pi.direction)},
      {"equilibrium", vec_json(c.pi.equilibrium)},
      {"sample_period_s", c.pi.sample_period_s},
  };
  const auto& op = c.operating_point;
  return {
      {"kind", c.kind == control::ControllerKind::Mpc ? "mpc" : "pi"},
      {"operating_point",
       {{"levels_L", {op.levels_L[0], op.levels_L[1], op.levels_L[2]}},
        {"inputs", {op.inputs[0], op.inputs[1], op.inputs[2]}}}},
      {"discretization",
       c.discretization == control::Discretization::ForwardEuler ? "forward_euler" : "zoh"},
      {"mpc", mpc},
      {"pi", pi},
  };
}

control::ControllerConfig controller_config_from_json(const json& j) {
  constexpr std::string_view what = "controller";
  check_keys(j, {"kind", "operating_point", "discretization", "mpc", "pi"}, what);
  control::ControllerConfig c;
  if (j.contains("kind")) {
    std::string kind;
    take(j, "kind", kind, what);
    if (kind == "mpc") {
      c.kind = control::ControllerKind::Mpc;
    } else if (kind == "pi") {
      c.kind = control::ControllerKind::Pi;
    } else {
      throw ConfigError("controller.kind: expected 'mpc' or 'pi', got '" + kind + "'");
    }
  }
  if (j.contains("discretization")) {
    std::string d;
    take(j, "discretization", d, what);
    if (d == "forward_euler") {
      c.discretization = control::Discretization::ForwardEuler;
    } else if (d == "zoh") {
      c.discretization = control::Discretization::ZeroOrderHold;
    } else {
      throw ConfigError("controller.discretization: expected 'forward_euler' or 'zoh'");
    }
  }
  if (j.contains("operating_point")) {
    const json& op = j.at("operating_point");
    check_keys(op, {"levels_L", "inputs"}, "controller.operating_point");
    take_vec3(op, "levels_L", c.operating_point.levels_L, "controller.operating_point");
    take_vec3(op, "inputs", c.operating_point.inputs, "controller.operating_point");
  }
  if (j.contains("mpc")) {
    const json& m = j.at("mpc");
    constexpr std::string_view w = "controller.mpc";
    check_keys(m,
               {"horizon_steps", "state_weight", "input_weight", "input_lower", "input_upper",
                "sample_period_s", "max_iterations", "tolerance"},
               w);
    take(m, "horizon_steps", c.mpc.horizon_steps, w);
    take_vec(m, "state_weight", c.mpc.state_weight, w);
    take(m, "input_weight", c.mpc.input_weight, w);
    take(m, "input_lower", c.mpc.input_lower, w);
    take(m, "input_upper", c.mpc.input_upper, w);
    take(m, "sample_period_s", c.mpc.sample_period_s, w);
    take(m, "max_iterations", c.mpc.max_iterations, w);
    take(m, "tolerance", c.mpc.tolerance, w);
  }
  if (j.contains("pi")) {
    const json& p = j.at("pi");
    constexpr std::string_view w = "controller.pi";
    check_keys(p, {"kp", "ki", "direction", "equilibrium", "sample_period_s"}, w);
    take_vec(p, "kp", c.pi.kp, w);
    take_vec(p, "ki", c.pi.ki, w);
    take_vec(p, "direction", c.pi.direction, w);
    take_vec(p, "equilibrium", c.pi.equilibrium, w);
    take(p, "sample_period_s", c.pi.sample_period_s, w);
  }
  return c;
}

json to_json(const validator::ValidatorSpec& s) {
  json gate = json::array();
  for (const auto& p : s.gate.predicates) {
    gate.push_back({{"field", p.field}, {"cmp", dp::to_string(p.cmp)}, {"value", p.constant}});
  }
  json ranges = json::array();
  for (const auto& e : s.table.entries()) {
    ranges.push_back({{"lo", e.lo},
                      {"hi", e.hi},
                      {"severity", to_string(static_cast<Severity>(e.action))}});
  }
  json j{
      {"scenario", to_string(s.scenario)},
      {"monitored_field", s.monitored_field},
      {"window", s.window},
      {"window_mode", validator::to_string(s.mode)},
      {"gate", gate},
      {"ranges", ranges},
  };
  if (s.manual_boundaries) j["manual_boundaries"] = *s.manual_boundaries;
  return j;
}

validator::ValidatorSpec validator_spec_from_json(const json& j) {
  constexpr std::string_view what = "validator";
  check_keys(j,
             {"scenario", "monitored_field", "window", "window_mode", "gate", "ranges",
              "manual_boundaries"},
             what);
  validator::ValidatorSpec s;
  if (j.contains("scenario")) {
    std::string name;
    take(j, "scenario", name, what);
    s = validator::default_spec(parse_scenario(name));
  }
  take(j, "monitored_field", s.monitored_field, what);
  take(j, "window", s.window, what);
  if (j.contains("window_mode")) {
    std::string mode;
    take(j, "window_mode", mode, what);
    s.mode = validator::parse_window_mode(mode);
  }
  if (j.contains("gate")) {
    s.gate.predicates.clear();
    for (const json& p : j.at("gate")) {
      check_keys(p, {"field", "cmp", "value"}, "validator.gate");
      validator::GatePredicate g;
      std::string cmp = ">";
      take(p, "field", g.field, "validator.gate");
      take(p, "cmp", cmp, "validator.gate");
      take(p, "value", g.constant, "validator.gate");
      g.cmp = dp::parse_comparator(cmp);
      s.gate.predicates.push_back(std::move(g));
    }
  }
  if (j.contains("ranges")) {
    std::vector<dp::RangeEntry> entries;
    for (const json& r : j.at("ranges")) {
      check_keys(r, {"lo", "hi", "severity"}, "validator.ranges");
      dp::RangeEntry e;
      std::string sev = "normal";
      take(r, "lo", e.lo, "validator.ranges");
      take(r, "hi", e.hi, "validator.ranges");
      take(r, "severity", sev, "validator.ranges");
      e.action = static_cast<std::uint32_t>(parse_severity(sev));
      entries.push_back(e);
    }
    s.table = dp::RangeTable(std::move(entries), 0);
  }
  if (j.contains("manual_boundaries")) {
    std::vector<std::uint32_t> b;
    take(j, "manual_boundaries", b, what);
    s.manual_boundaries = std::move(b);
  }
  s.validate();
  return s;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

void write_json_file(const std::filesystem::path& path, const json& j) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  out << j.dump(2) << '\n';
}

validator::ValidatorSpec load_validator_spec(const std::filesystem::path& path) {
  return validator_spec_from_json(read_json_file(path));
}

void save_validator_spec(const std::filesystem::path& path, const validator::ValidatorSpec& s) {
  write_json_file(path, to_json(s));
}

}  // namespace civic::config
