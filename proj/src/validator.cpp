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

#include "civic/validator.hpp"

#include <algorithm>

#include "civic/error.hpp"

namespace civic::validator {

namespace {

const std::vector<std::string> kLevelFields = {"L1", "L2", "L3", "L4"};

std::string ring_name(const std::string& field) { return "R_" + field; }

bool is_message_field(const std::string& name) {
  for (const dp::FieldSpec& f : message_parse_spec().fields) {
    if (f.name == name) return true;
  }
  return false;
}

}  // namespace

std::string_view to_string(WindowMode m) {
  return m == WindowMode::Sliding ? "sliding" : "tumbling";
}

WindowMode parse_window_mode(std::string_view name) {
  if (name == "sliding") return WindowMode::Sliding;
  if (name == "tumbling") return WindowMode::Tumbling;
  throw ConfigError("unknown window mode '" + std::string(name) + "'");
}

void ValidatorSpec::validate() const {
  if (window < 2) throw BuildError("validator: window must be >= 2, got " + std::to_string(window));
  if (!is_message_field(monitored_field)) {
    throw BuildError("validator: undeclared monitored field '" + monitored_field + "'");
  }
  if (gate.predicates.empty()) throw BuildError("validator: gate needs at least one predicate");
  for (const GatePredicate& p : gate.predicates) {
    if (!is_message_field(p.field)) {
      throw BuildError("validator: gate references undeclared field '" + p.field + "'");
    }
    if (p.cmp == dp::Comparator::Eq || p.cmp == dp::Comparator::Ne) {
      throw BuildError("validator: gate comparators must be <, >, <= or >=");
    }
  }
  for (const dp::RangeEntry& e : table.entries()) {
    if (e.action > 2) throw BuildError("validator: table action is not a severity");
  }
}

ValidatorSpec default_spec(Scenario scenario, WindowMode mode) {
  ValidatorSpec spec;
  spec.scenario = scenario;
  spec.mode = mode;
  if (scenario == Scenario::CloggedPipe) {
    spec.monitored_field = "L3";
    spec.window = 20;
    spec.gate.predicates = {{"L3", dp::Comparator::Gt, 3000}, {"V2", dp::Comparator::Ge, 800}};
  } else {
    spec.monitored_field = "L1";
    spec.window = 90;
    spec.gate.predicates = {{"P1", dp::Comparator::Gt, 990},
                            {"L1", dp::Comparator::Gt, 5000},
                            {"L1", dp::Comparator::Lt, 8000}};
  }
  return spec;
}

dp::ParseSpec message_parse_spec() {
  using namespace wire::offset;
  return dp::ParseSpec{{
      {"seq", kSeq, 4},
      {"timestamp_us", kTimestamp, 8},
      {"L1", kLevel1, 4},
      {"L2", kLevel2, 4},
      {"L3", kLevel3, 4},
      {"L4", kLevel4, 4},
      {"P1", kPump, 2},
      {"V1", kValve1, 2},
      {"V2", kValve2, 2},
  }};
}

std::uint64_t field_value(const wire::ControlMessage& msg, const std::string& field) {
  if (field == "seq") return msg.seq;
  if (field == "timestamp_us") return msg.timestamp_us;
  if (field == "L1") return msg.levels_mL[0];
  if (field == "L2") return msg.levels_mL[1];
  if (field == "L3") return msg.levels_mL[2];
  if (field == "L4") return msg.levels_mL[3];
  if (field == "P1") return msg.pump_permille;
  if (field == "V1") return msg.valve1_permille;
  if (field == "V2") return msg.valve2_permille;
  throw BuildError("unknown message field '" + field + "'");
}

bool gate_holds(const GateSpec& gate, const wire::ControlMessage& msg) {
  return std::all_of(gate.predicates.begin(), gate.predicates.end(), [&](const GatePredicate& p) {
    return dp::compare(p.cmp, field_value(msg, p.field), p.constant);
  });
}

dp::PipelineProgram build_program(const ValidatorSpec& spec) {
  spec.validate();
  using dp::Operand;
  using dp::OpCode;
  namespace op = dp::ops;

  dp::PipelineProgram p;
  p.name = std::string("civic_") + std::string(civic::to_string(spec.scenario));
  p.parser = message_parse_spec();

  std::vector<std::string> ringed = kLevelFields;
  if (std::find(ringed.begin(), ringed.end(), spec.monitored_field) == ringed.end()) {
    ringed.push_back(spec.monitored_field);
  }
  for (const std::string& f : ringed) p.registers.push_back({ring_name(f), spec.window});
  const std::string mon = ring_name(spec.monitored_field);

  p.range_tables.push_back({"severity_ranges", spec.table});

  // Data collection: every level history advances on every packet.
  dp::Stage collect{"collect", {}};
  for (const std::string& f : ringed) collect.ops.push_back(op::ring_push(ring_name(f), Operand::variable(f)));
  p.stages.push_back(std::move(collect));

  // Instantaneous thresholds.
  dp::Stage gate{"gate", {}};
  for (std::size_t i = 0; i < spec.gate.predicates.size(); ++i) {
    const GatePredicate& pr = spec.gate.predicates[i];
    const std::string g = "gate_" + std::to_string(i);
    p.metadata.push_back(g);
    gate.ops.push_back(op::cmp(pr.cmp, g, Operand::variable(pr.field), Operand::constant(pr.constant)));
  }
  p.metadata.push_back("gate");
  gate.ops.push_back(op::assign("gate", Operand::variable("gate_0")));
  for (std::size_t i = 1; i < spec.gate.predicates.size(); ++i) {
    gate.ops.push_back(op::binary(OpCode::And, "gate", Operand::variable("gate"),
                                  Operand::variable("gate_" + std::to_string(i))));
  }
  p.stages.push_back(std::move(gate));

  // Decision precondition: gate open and window filled (and, for tumbling
  // windows, the ring index wrapped back to slot 0 on this packet).
  dp::Stage window{"window", {}};
  for (const char* m : {"filled", "decide"}) p.metadata.emplace_back(m);
  window.ops.push_back(op::ring_read(OpCode::RingFilled, "filled", mon));
  window.ops.push_back(
      op::binary(OpCode::And, "decide", Operand::variable("gate"), Operand::variable("filled")));
  if (spec.mode == WindowMode::Tumbling) {
    for (const char* m : {"index", "boundary"}) p.metadata.emplace_back(m);
    window.ops.push_back(op::ring_read(OpCode::RingIndex, "index", mon));
    window.ops.push_back(op::cmp(dp::Comparator::Eq, "boundary", Operand::variable("index"),
                                 Operand::constant(0)));
    window.ops.push_back(op::binary(OpCode::And, "decide", Operand::variable("decide"),
                                    Operand::variable("boundary")));
  }
  p.stages.push_back(std::move(window));

  // Endpoint difference instead of a regression, biased into key space.
  dp::Stage slope{"slope", {}};
  for (const char* m : {"oldest", "newest", "diff", "key"}) p.metadata.emplace_back(m);
  slope.ops.push_back(op::ring_read(OpCode::RingOldest, "oldest", mon));
  slope.ops.push_back(op::ring_read(OpCode::RingNewest, "newest", mon));
  slope.ops.push_back(op::binary(OpCode::Sub, "diff", Operand::variable("newest"),
                                 Operand::variable("oldest")));
  slope.ops.push_back(op::binary(OpCode::Add, "key", Operand::variable("diff"),
                                 Operand::constant(kSlopeBias)));
  p.stages.push_back(std::move(slope));

  dp::Stage classify_stage{"classify", {}};
  for (const char* m : {"severity", "label_key"}) p.metadata.emplace_back(m);
  classify_stage.ops.push_back(
      op::assign("severity", Operand::constant(static_cast<std::uint8_t>(Severity::NoDecision))));
  classify_stage.ops.push_back(
      op::range_match("severity", "severity_ranges", Operand::variable("key"), "decide"));
  classify_stage.ops.push_back(op::assign("label_key", Operand::constant(0)));
  classify_stage.ops.push_back(op::assign("label_key", Operand::variable("key"), "decide"));
  p.stages.push_back(std::move(classify_stage));

  p.egress.append_trailer = true;
  p.egress.trailer = {
      {Operand::variable("severity"), 1},
      {Operand::constant(static_cast<std::uint8_t>(spec.scenario)), 1},
      {Operand::variable("label_key"), 4},
  };
  return p;
}

Severity classify(std::uint32_t key, const dp::RangeTable& table) {
  const auto s = severity_from_code(static_cast<std::uint8_t>(table.lookup(key)));
  if (!s || !is_decision(*s)) throw BuildError("range table action is not a severity");
  return *s;
}

Validator::Validator(ValidatorSpec spec)
    : spec_(std::move(spec)), pipeline_(build_program(spec_)), registers_(pipeline_.make_registers()) {}

std::optional<wire::Bytes> Validator::on_packet(std::span<const std::uint8_t> bytes) {
  ++processed_;
  // A packet that already carries a trailer would get a second one.
  if (bytes.size() != wire::kMessageSize) {
    ++dropped_;
    return std::nullopt;
  }
  dp::PacketResult r = pipeline_.execute(bytes, registers_);
  if (r.verdict == dp::Verdict::Drop) {
    ++dropped_;
    return std::nullopt;
  }
  return std::move(r.bytes);
}

}  // namespace civic::validator
