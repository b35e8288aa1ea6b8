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

#include <cstddef>
#include <string>
#include <vector>

#include "civic/dataplane/program.hpp"

namespace civic::dp {

enum class OpClass {
  Move,        // assign
  AddSub,      // add, sub
  Compare,     // cmp
  Bitwise,     // and, or, xor, not
  Shift,       // shift by a constant
  Register,    // ring register access
  Table,       // range / exact match
  Control,     // forward skip, drop
  Forbidden,   // multiply, divide, modulo, float, loops, variable shifts
};

std::string_view to_string(OpClass c);

struct AuditEntry {
  std::string stage;
  std::size_t index = 0;
  OpCode op = OpCode::Assign;
  OpClass op_class = OpClass::Move;
  std::string note;
};

struct ConstraintReport {
  std::string program;
  std::vector<AuditEntry> entries;
  std::vector<std::string> violations;

  bool pass() const { return violations.empty(); }
  std::size_t count(OpClass c) const;

  /// Structured text: one line per instruction then a verdict line.
  std::string to_text() const;
};

/// Checks a program against programmable-switch arithmetic constraints:
/// add/sub/compare/bitwise and constant shifts are allowed; multiply,
/// divide, modulo, floating-point and back-edges are not.
ConstraintReport audit(const PipelineProgram& program);

}  // namespace civic::dp
