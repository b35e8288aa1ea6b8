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

#include "civic/dataplane/audit.hpp"

#include <sstream>

namespace civic::dp {

namespace {

bool power_of_two(std::uint64_t v) { return v != 0 && (v & (v - 1)) == 0; }

AuditEntry classify(const Stage& stage, std::size_t index, const Instruction& in) {
  AuditEntry e{stage.name, index, in.op, OpClass::Move, {}};
  switch (in.op) {
    case OpCode::Assign: e.op_class = OpClass::Move; break;
    case OpCode::Add:
    case OpCode::Sub: e.op_class = OpClass::AddSub; break;
    case OpCode::Cmp: e.op_class = OpClass::Compare; break;
    case OpCode::And:
    case OpCode::Or:
    case OpCode::Xor:
    case OpCode::Not: e.op_class = OpClass::Bitwise; break;
    case OpCode::Shl:
    case OpCode::Shr:
      if (in.b.is_const()) {
        e.op_class = OpClass::Shift;
      } else {
        e.op_class = OpClass::Forbidden;
        e.note = "shift amount must be a constant";
      }
      break;
    case OpCode::Mul:
      e.op_class = OpClass::Forbidden;
      e.note = in.b.is_const() && power_of_two(in.b.value)
                   ? "multiply (rewrite as a constant shift)"
                   : "multiply";
      break;
    case OpCode::Div:
      e.op_class = OpClass::Forbidden;
      e.note = "divide";
      break;
    case OpCode::Mod:
      e.op_class = OpClass::Forbidden;
      e.note = "modulo";
      break;
    case OpCode::FAdd:
    case OpCode::FMul:
      e.op_class = OpClass::Forbidden;
      e.note = "floating-point";
      break;
    case OpCode::Skip:
      if (in.skip > 0 && index + static_cast<std::size_t>(in.skip) < stage.ops.size()) {
        e.op_class = OpClass::Control;
      } else {
        e.op_class = OpClass::Forbidden;
        e.note = in.skip <= 0 ? "loop (back-edge)" : "skip past end of stage";
      }
      break;
    case OpCode::RingPush:
    case OpCode::RingOldest:
    case OpCode::RingNewest:
    case OpCode::RingFilled:
    case OpCode::RingIndex: e.op_class = OpClass::Register; break;
    case OpCode::RangeMatch:
    case OpCode::ExactMatch: e.op_class = OpClass::Table; break;
    case OpCode::Drop: e.op_class = OpClass::Control; break;
  }
  return e;
}

}  // namespace

std::string_view to_string(OpClass c) {
  switch (c) {
    case OpClass::Move: return "move";
    case OpClass::AddSub: return "add/sub";
    case OpClass::Compare: return "compare";
    case OpClass::Bitwise: return "bitwise";
    case OpClass::Shift: return "shift";
    case OpClass::Register: return "register";
    case OpClass::Table: return "table";
    case OpClass::Control: return "control";
    case OpClass::Forbidden: return "FORBIDDEN";
  }
  return "?";
}

std::size_t ConstraintReport::count(OpClass c) const {
  std::size_t n = 0;
  for (const AuditEntry& e : entries) n += e.op_class == c ? 1 : 0;
  return n;
}

std::string ConstraintReport::to_text() const {
  std::ostringstream out;
  out << "audit program=" << program << " instructions=" << entries.size() << '\n';
  for (const AuditEntry& e : entries) {
    out << "  stage=" << e.stage << " index=" << e.index << " op=" << dp::to_string(e.op)
        << " class=" << dp::to_string(e.op_class);
    if (!e.note.empty()) out << " note=\"" << e.note << '"';
    out << '\n';
  }
  for (const std::string& v : violations) out << "  violation: " << v << '\n';
  out << "verdict " << (pass() ? "PASS" : "FAIL") << '\n';
  return out.str();
}

ConstraintReport audit(const PipelineProgram& program) {
  ConstraintReport report;
  report.program = program.name;
  for (const Stage& stage : program.stages) {
    for (std::size_t i = 0; i < stage.ops.size(); ++i) {
      AuditEntry e = classify(stage, i, stage.ops[i]);
      if (e.op_class == OpClass::Forbidden) {
        report.violations.push_back("stage '" + stage.name + "' op " + std::to_string(i) + ": " +
                                    e.note);
      }
      report.entries.push_back(std::move(e));
    }
  }
  return report;
}

}  // namespace civic::dp
