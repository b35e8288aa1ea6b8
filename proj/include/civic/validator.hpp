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

#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "civic/dataplane/pipeline.hpp"
#include "civic/types.hpp"
#include "civic/wire.hpp"

namespace civic::validator {

/// Bias that maps signed 32-bit window slopes onto unsigned table keys.
inline constexpr std::uint32_t kSlopeBias = 0x80000000U;

enum class WindowMode {
  Sliding,   // decide on every gated packet once the window has filled
  Tumbling,  // decide only on every n-th packet since program start
};

std::string_view to_string(WindowMode m);
WindowMode parse_window_mode(std::string_view name);

struct GatePredicate {
  std::string field;
  dp::Comparator cmp = dp::Comparator::Gt;
  std::uint32_t constant = 0;  // wire units: mL or permille
};

struct GateSpec {
  std::vector<GatePredicate> predicates;
};

struct ValidatorSpec {
  Scenario scenario = Scenario::CloggedPipe;
  std::string monitored_field = "L3";
  std::uint32_t window = 20;
  WindowMode mode = WindowMode::Sliding;
  GateSpec gate;
  dp::RangeTable table;
  // Hand-tuned range boundaries; calibration uses them instead of midpoints.
  std::optional<std::vector<std::uint32_t>> manual_boundaries;

  /// Throws BuildError on n < 2, empty gate, unknown fields or table actions
  /// other than the three severities.
  void validate() const;
};

/// Gates and window lengths of the two monitored faults; the range table is
/// a single Normal range until calibrated.
ValidatorSpec default_spec(Scenario scenario, WindowMode mode = WindowMode::Sliding);

/// Parser layout of the control message, field names seq, timestamp_us,
/// L1..L4, P1, V1, V2.
dp::ParseSpec message_parse_spec();

/// Value of a named message field as the data plane would parse it.
std::uint64_t field_value(const wire::ControlMessage& msg, const std::string& field);

bool gate_holds(const GateSpec& gate, const wire::ControlMessage& msg);

/// Compiles the validator into a pipeline program: collection into L1..L4
/// rings, gate evaluation, window endpoint slope, range classification and
/// a label trailer.
dp::PipelineProgram build_program(const ValidatorSpec& spec);

/// (newest - oldest) as signed 32-bit, plus 2^31, using wrapping add/sub.
constexpr std::uint32_t slope_key(std::uint32_t oldest, std::uint32_t newest) {
  return static_cast<std::uint32_t>(newest - oldest) + kSlopeBias;
}

constexpr std::int32_t slope_from_key(std::uint32_t key) {
  return static_cast<std::int32_t>(static_cast<std::int64_t>(key) - kSlopeBias);
}

constexpr std::uint32_t key_from_slope(std::int32_t slope) {
  return static_cast<std::uint32_t>(static_cast<std::int64_t>(slope) + kSlopeBias);
}

Severity classify(std::uint32_t key, const dp::RangeTable& table);

/// Host-side wrapper around the compiled program and its registers.
class Validator {
 public:
  explicit Validator(ValidatorSpec spec);

  /// Labelled bytes, or nullopt if the packet was dropped.
  std::optional<wire::Bytes> on_packet(std::span<const std::uint8_t> bytes);

  const ValidatorSpec& spec() const { return spec_; }
  const dp::Pipeline& pipeline() const { return pipeline_; }
  const dp::RegisterFile& registers() const { return registers_; }
  std::uint64_t processed() const { return processed_; }
  std::uint64_t dropped() const { return dropped_; }

 private:
  ValidatorSpec spec_;
  dp::Pipeline pipeline_;
  dp::RegisterFile registers_;
  std::uint64_t processed_ = 0;
  std::uint64_t dropped_ = 0;
};

/// Unconstrained reference of the same decision logic, written as plain
/// code over a queue. Used as the oracle for the pipeline program.
class ReferenceValidator {
 public:
  explicit ReferenceValidator(ValidatorSpec spec);

  wire::CivicLabel decide(const wire::ControlMessage& msg);
  std::optional<wire::Bytes> on_packet(std::span<const std::uint8_t> bytes);

  const ValidatorSpec& spec() const { return spec_; }

 private:
  ValidatorSpec spec_;
  std::deque<std::uint32_t> window_;
  std::uint64_t seen_ = 0;
};

}  // namespace civic::validator
