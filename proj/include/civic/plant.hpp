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

// Four-tank coupled plant: T4 is the lower reservoir, pump P1 lifts water
// into T1, valve V1 connects T1 to T2, valve V2 drains T3 into T4. Adjacent
// upper tanks also exchange water in proportion to their level difference.
// Manual valves VM1 (T3 drain) and VM2 (pump line) emulate faults.

#include <array>
#include <cstdint>
#include <random>

#include "civic/types.hpp"

namespace civic::plant {

inline constexpr std::size_t kTankCount = 4;
using TankVolumes = std::array<double, kTankCount>;

struct PlantConfig {
  TankVolumes tank_cross_section_m2{0.02, 0.02, 0.02, 0.04};
  // L/s per sqrt(m) of level, for the V1 (T1->T2) and V2 (T3->T4) paths.
  std::array<double, 2> outflow_coefficient{0.3, 0.4};
  double pump_gain_L_per_s_at_full = 0.35;
  // Exchange between adjacent upper tanks, L/s per m of level difference.
  double coupling_coefficient = 0.1;
  double sensor_noise_sigma_mL = 5.0;
  std::uint64_t rng_seed = 1;
  double dt_sim_s = 0.01;
  double tank_capacity_L = 10.0;

  /// Throws ConfigError if any invariant is violated.
  void validate(double control_period_s = 0.1) const;
};

struct ActuatorInputs {
  double pump = 0.0;
  double valve1 = 0.0;
  double valve2 = 0.0;
};

struct PlantState {
  TankVolumes volumes_L{};
  double pump = 0.0;
  double valve1 = 0.0;
  double valve2 = 0.0;
  double manual_valve1 = 1.0;
  double manual_valve2 = 1.0;
  double sim_time_s = 0.0;
};

struct FaultScenario {
  Scenario kind = Scenario::CloggedPipe;
  Severity severity = Severity::Normal;
};

/// Fraction the affected manual valve is closed for a scenario
/// (0.30 / 0.55 for a clogged pipe, 0.20 / 0.40 for a failing pump).
double manual_valve_closure(const FaultScenario& fault);

struct SensorFrame {
  TankVolumes levels_L{};
  double pump = 0.0;
  double valve1 = 0.0;
  double valve2 = 0.0;
};

/// Directed volumetric flows in L/s. Coupling terms are signed: positive
/// means towards the higher-numbered tank.
struct FlowRates {
  double pump = 0.0;        // T4 -> T1
  double valve1 = 0.0;      // T1 -> T2
  double valve2 = 0.0;      // T3 -> T4
  double coupling12 = 0.0;  // T1 <-> T2
  double coupling23 = 0.0;  // T2 <-> T3
};

double level_m(const PlantConfig& config, std::size_t tank, double volume_L);

/// Unlimited flow model at the given volumes; the plant limits these by the
/// available source volume when integrating.
FlowRates flow_rates(const PlantConfig& config, const TankVolumes& volumes,
                     const ActuatorInputs& inputs, double manual_valve1,
                     double manual_valve2);

/// dV/dt for each tank implied by `flows`.
TankVolumes volume_derivatives(const FlowRates& flows);

PlantState init_state(const PlantConfig& config, const TankVolumes& initial_volumes_L);

PlantState apply_fault(PlantState state, const FaultScenario& fault);

/// One explicit Euler step of length dt_s with the inputs held.
PlantState step(const PlantConfig& config, const PlantState& state,
                const ActuatorInputs& inputs, double dt_s);

/// Integrates one control period with dt_sim_s sub-steps.
PlantState advance(const PlantConfig& config, PlantState state,
                   const ActuatorInputs& inputs, double period_s);

/// Gaussian sensor noise. Box-Muller over mt19937_64 so sample streams do
/// not depend on the standard library's distribution implementation.
class GaussianNoise {
 public:
  explicit GaussianNoise(std::uint64_t seed) : engine_(seed) {}

  double next();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

SensorFrame read_sensors(const PlantConfig& config, const PlantState& state,
                         GaussianNoise& noise);

}  // namespace civic::plant
