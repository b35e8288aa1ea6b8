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

#include "civic/plant.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "civic/error.hpp"

namespace civic::plant {

namespace {

bool is_fraction(double v) { return v >= 0.0 && v <= 1.0; }

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("plant config: " + what);
}

}  // namespace

void PlantConfig::validate(double control_period_s) const {
  for (double a : tank_cross_section_m2) require(a > 0.0, "tank cross-section must be > 0");
  for (double k : outflow_coefficient) require(k > 0.0, "outflow coefficient must be > 0");
  require(pump_gain_L_per_s_at_full > 0.0, "pump gain must be > 0");
  require(coupling_coefficient >= 0.0, "coupling coefficient must be >= 0");
  require(sensor_noise_sigma_mL >= 0.0, "sensor noise sigma must be >= 0");
  require(dt_sim_s > 0.0 && dt_sim_s <= control_period_s,
          "dt_sim_s must be in (0, control period]");
  const double ratio = control_period_s / dt_sim_s;
  require(std::abs(ratio - std::round(ratio)) < 1e-9 * ratio,
          "dt_sim_s must divide the control period");
  require(tank_capacity_L > 0.0, "tank capacity must be > 0");
}

double manual_valve_closure(const FaultScenario& fault) {
  const bool pipe = fault.kind == Scenario::CloggedPipe;
  switch (fault.severity) {
    case Severity::Normal: return 0.0;
    case Severity::Warning: return pipe ? 0.30 : 0.20;
    case Severity::Error: return pipe ? 0.55 : 0.40;
    case Severity::NoDecision: break;
  }
  throw ConfigError("fault scenario needs a decision severity");
}

double level_m(const PlantConfig& config, std::size_t tank, double volume_L) {
  return volume_L / (1000.0 * config.tank_cross_section_m2[tank]);
}

FlowRates flow_rates(const PlantConfig& config, const TankVolumes& volumes,
                     const ActuatorInputs& inputs, double manual_valve1,
                     double manual_valve2) {
  const double h1 = level_m(config, 0, volumes[0]);
  const double h2 = level_m(config, 1, volumes[1]);
  const double h3 = level_m(config, 2, volumes[2]);
  FlowRates q;
  q.pump = config.pump_gain_L_per_s_at_full * inputs.pump * manual_valve2;
  q.valve1 = config.outflow_coefficient[0] * inputs.valve1 * std::sqrt(std::max(h1, 0.0));
  q.valve2 = config.outflow_coefficient[1] * inputs.valve2 * manual_valve1 *
             std::sqrt(std::max(h3, 0.0));
  q.coupling12 = config.coupling_coefficient * (h1 - h2);
  q.coupling23 = config.coupling_coefficient * (h2 - h3);
  return q;
}

TankVolumes volume_derivatives(const FlowRates& q) {
  return {q.pump - q.valve1 - q.coupling12,
          q.valve1 + q.coupling12 - q.coupling23,
          q.coupling23 - q.valve2,
          q.valve2 - q.pump};
}

PlantState init_state(const PlantConfig& config, const TankVolumes& initial_volumes_L) {
  config.validate();
  PlantState state;
  for (std::size_t i = 0; i < kTankCount; ++i) {
    const double v = initial_volumes_L[i];
    if (!(v >= 0.0 && v <= config.tank_capacity_L)) {
      throw ConfigError("initial volume of T" + std::to_string(i + 1) + " = " +
                        std::to_string(v) + " L outside [0, capacity]");
    }
    state.volumes_L[i] = v;
  }
  return state;
}

PlantState apply_fault(PlantState state, const FaultScenario& fault) {
  const double opening = 1.0 - manual_valve_closure(fault);
  if (fault.kind == Scenario::CloggedPipe) {
    state.manual_valve1 = opening;
  } else {
    state.manual_valve2 = opening;
  }
  return state;
}

PlantState step(const PlantConfig& config, const PlantState& state,
                const ActuatorInputs& inputs, double dt_s) {
  if (!(dt_s > 0.0)) throw ConfigError("step: dt_s must be > 0");
  if (!is_fraction(inputs.pump) || !is_fraction(inputs.valve1) || !is_fraction(inputs.valve2)) {
    throw ConfigError("step: actuator inputs must lie in [0, 1]");
  }

  const FlowRates q = flow_rates(config, state.volumes_L, inputs, state.manual_valve1,
                                 state.manual_valve2);

  // Directed paths: {source, destination, rate}.
  struct Path {
    std::size_t from;
    std::size_t to;
    double rate;
  };
  std::array<Path, 5> paths{{
      {3, 0, q.pump},
      {0, 1, q.valve1},
      {2, 3, q.valve2},
      q.coupling12 >= 0 ? Path{0, 1, q.coupling12} : Path{1, 0, -q.coupling12},
      q.coupling23 >= 0 ? Path{1, 2, q.coupling23} : Path{2, 1, -q.coupling23},
  }};

  // A tank cannot release more than it holds within one step.
  TankVolumes outflow{};
  for (const Path& p : paths) outflow[p.from] += p.rate * dt_s;
  TankVolumes scale;
  for (std::size_t i = 0; i < kTankCount; ++i) {
    scale[i] = outflow[i] > state.volumes_L[i] ? state.volumes_L[i] / outflow[i] : 1.0;
  }

  PlantState next = state;
  for (const Path& p : paths) {
    const double moved = p.rate * dt_s * scale[p.from];
    next.volumes_L[p.from] -= moved;
    next.volumes_L[p.to] += moved;
  }
  for (double& v : next.volumes_L) {
    if (!std::isfinite(v)) throw NumericalError("plant step produced a non-finite volume");
    v = std::clamp(v, 0.0, config.tank_capacity_L);
  }
  next.pump = inputs.pump;
  next.valve1 = inputs.valve1;
  next.valve2 = inputs.valve2;
  next.sim_time_s = state.sim_time_s + dt_s;
  return next;
}

PlantState advance(const PlantConfig& config, PlantState state,
                   const ActuatorInputs& inputs, double period_s) {
  const auto substeps = static_cast<long>(std::llround(period_s / config.dt_sim_s));
  const double dt = period_s / static_cast<double>(std::max(substeps, 1L));
  for (long i = 0; i < std::max(substeps, 1L); ++i) state = step(config, state, inputs, dt);
  return state;
}

double GaussianNoise::next() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 53-bit uniforms in (0, 1].
  auto uniform = [this] {
    return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
  };
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

SensorFrame read_sensors(const PlantConfig& config, const PlantState& state,
                         GaussianNoise& noise) {
  SensorFrame frame;
  const double sigma_L = config.sensor_noise_sigma_mL / 1000.0;
  for (std::size_t i = 0; i < kTankCount; ++i) {
    double level = state.volumes_L[i];
    if (sigma_L > 0.0) level += sigma_L * noise.next();
    frame.levels_L[i] = std::max(level, 0.0);
  }
  frame.pump = state.pump;
  frame.valve1 = state.valve1;
  frame.valve2 = state.valve2;
  return frame;
}

}  // namespace civic::plant
