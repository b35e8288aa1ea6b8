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
#include <cmath>
#include <numeric>

#include "civic/error.hpp"
#include "civic/plant.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace civic;
using namespace civic::plant;

namespace {

double total(const TankVolumes& v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("plant: pump off and all valves closed holds volumes up to coupling") {
  PlantConfig c;
  c.coupling_coefficient = 0.0;
  PlantState s = init_state(c, {2.0, 3.0, 4.0, 5.0});
  for (int i = 0; i < 100; ++i) s = step(c, s, {}, c.dt_sim_s);
  CHECK(s.volumes_L == TankVolumes{2.0, 3.0, 4.0, 5.0});
}

TEST_CASE("plant: full V2 drains T3 into T4 and T3 decreases monotonically") {
  PlantConfig c;
  c.coupling_coefficient = 0.0;
  PlantState s = init_state(c, {0.0, 0.0, 7.5, 0.0});
  double prev = s.volumes_L[2];
  for (int i = 0; i < 100; ++i) {
    s = advance(c, s, {0.0, 0.0, 1.0}, 0.1);
    CHECK(s.volumes_L[2] < prev);
    prev = s.volumes_L[2];
  }
  CHECK(s.volumes_L[3] > 0.0);
  CHECK(total(s.volumes_L) == doctest::Approx(7.5).epsilon(1e-12));
}

TEST_CASE("plant: total volume is conserved without spill (randomized)") {
  auto g = oracle::rng(11);
  std::uniform_real_distribution<double> vol(0.0, 10.0), act(0.0, 1.0);
  PlantConfig c;
  for (int trial = 0; trial < 200; ++trial) {
    PlantState s = init_state(c, {vol(g) * 0.4, vol(g) * 0.4, vol(g) * 0.4, vol(g) * 0.4});
    const double start = total(s.volumes_L);
    for (int k = 0; k < 20; ++k) s = advance(c, s, {act(g), act(g), act(g)}, 0.1);
    bool spilled = false;
    for (double v : s.volumes_L) spilled |= v >= c.tank_capacity_L;
    if (!spilled) CHECK(total(s.volumes_L) == doctest::Approx(start).epsilon(1e-9));
    for (double v : s.volumes_L) CHECK(v >= 0.0);
  }
}

TEST_CASE("plant: outflow never drives a tank negative") {
  PlantConfig c;
  PlantState s = init_state(c, {0.001, 0.0, 0.001, 0.001});
  for (int k = 0; k < 50; ++k) {
    s = advance(c, s, {1.0, 1.0, 1.0}, 0.1);
    for (double v : s.volumes_L) CHECK(v >= 0.0);
  }
}

TEST_CASE("plant: pump lifts T4 into T1 at gain times VM2") {
  PlantConfig c;
  c.coupling_coefficient = 0.0;
  PlantState s = init_state(c, {0.0, 0.0, 0.0, 9.0});
  s = apply_fault(s, {Scenario::FailingPump, Severity::Error});
  CHECK(s.manual_valve2 == doctest::Approx(0.6));
  s = step(c, s, {1.0, 0.0, 0.0}, 0.01);
  CHECK(s.volumes_L[0] == doctest::Approx(0.35 * 0.6 * 0.01));
}

TEST_CASE("plant: fault closures") {
  CHECK(manual_valve_closure({Scenario::CloggedPipe, Severity::Normal}) == 0.0);
  CHECK(manual_valve_closure({Scenario::CloggedPipe, Severity::Warning}) == doctest::Approx(0.30));
  CHECK(manual_valve_closure({Scenario::CloggedPipe, Severity::Error}) == doctest::Approx(0.55));
  CHECK(manual_valve_closure({Scenario::FailingPump, Severity::Warning}) == doctest::Approx(0.20));
  CHECK(manual_valve_closure({Scenario::FailingPump, Severity::Error}) == doctest::Approx(0.40));
  PlantState s = apply_fault(init_state(PlantConfig{}, {}), {Scenario::CloggedPipe, Severity::Error});
  CHECK(s.manual_valve1 == doctest::Approx(0.45));
  CHECK(s.manual_valve2 == 1.0);
}

TEST_CASE("plant: larger closure drains T3 more slowly") {
  PlantConfig c;
  std::array<double, 3> after{};
  for (Severity sev : kSeverityClasses) {
    PlantState s = apply_fault(init_state(c, {0.0, 0.0, 7.5, 0.0}), {Scenario::CloggedPipe, sev});
    for (int k = 0; k < 50; ++k) s = advance(c, s, {0.0, 0.0, 1.0}, 0.1);
    after[class_index(sev)] = s.volumes_L[2];
  }
  CHECK(after[0] < after[1]);
  CHECK(after[1] < after[2]);
}

TEST_CASE("plant: overflow clamps at capacity") {
  PlantConfig c;
  PlantState s = init_state(c, {9.99, 0.0, 0.0, 10.0});
  for (int k = 0; k < 20; ++k) s = advance(c, s, {1.0, 0.0, 0.0}, 0.1);
  for (double v : s.volumes_L) CHECK(v <= c.tank_capacity_L);
}

TEST_CASE("plant: invalid inputs are rejected") {
  PlantConfig c;
  CHECK_THROWS_AS(init_state(c, {11.0, 0.0, 0.0, 0.0}), ConfigError);
  CHECK_THROWS_AS(init_state(c, {-0.1, 0.0, 0.0, 0.0}), ConfigError);
  PlantState s = init_state(c, {1.0, 1.0, 1.0, 1.0});
  CHECK_THROWS_AS(step(c, s, {1.5, 0.0, 0.0}, 0.01), ConfigError);
  CHECK_THROWS_AS(step(c, s, {0.0, 0.0, 0.0}, 0.0), ConfigError);
  PlantConfig bad = c;
  bad.tank_cross_section_m2[1] = 0.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = c;
  bad.dt_sim_s = 0.03;  // does not divide the control period
  CHECK_THROWS_AS(bad.validate(0.1), ConfigError);
}

TEST_CASE("plant: identical config, seed and inputs give a bit-identical trajectory") {
  PlantConfig c;
  auto run = [&] {
    PlantState s = init_state(c, {1.0, 2.0, 3.0, 4.0});
    GaussianNoise noise(5);
    std::vector<double> out;
    for (int k = 0; k < 50; ++k) {
      s = advance(c, s, {0.5, 0.3, 0.7}, 0.1);
      const SensorFrame f = read_sensors(c, s, noise);
      out.insert(out.end(), f.levels_L.begin(), f.levels_L.end());
    }
    return out;
  };
  CHECK(run() == run());
}

TEST_CASE("plant: sensor noise is zero-mean with the configured sigma") {
  PlantConfig c;
  c.sensor_noise_sigma_mL = 10.0;
  const PlantState s = init_state(c, {5.0, 5.0, 5.0, 5.0});
  GaussianNoise noise(123);
  const int n = 10000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e_mL = (read_sensors(c, s, noise).levels_L[0] - 5.0) * 1000.0;
    sum += e_mL;
    sq += e_mL * e_mL;
  }
  const double mean = sum / n;
  const double sd = std::sqrt(sq / n - mean * mean);
  CHECK(std::abs(mean) < 4.0 * 10.0 / std::sqrt(n));
  CHECK(sd == doctest::Approx(10.0).epsilon(0.05));
}

TEST_CASE("plant: sensor levels are clamped >= 0 and actuators are echoed") {
  PlantConfig c;
  c.sensor_noise_sigma_mL = 50.0;
  PlantState s = init_state(c, {0.0, 0.0, 0.0, 0.0});
  s.pump = 0.25;
  s.valve2 = 1.0;
  GaussianNoise noise(1);
  for (int i = 0; i < 200; ++i) {
    const SensorFrame f = read_sensors(c, s, noise);
    for (double l : f.levels_L) CHECK(l >= 0.0);
    CHECK(f.pump == 0.25);
    CHECK(f.valve2 == 1.0);
  }
}
