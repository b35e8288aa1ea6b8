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
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "civic/dataplane/audit.hpp"
#include "civic/dataplane/program.hpp"
#include "civic/dataplane/registers.hpp"

namespace civic::dp {

enum class Verdict { Forward, ForwardLabeled, Drop };

std::string_view to_string(Verdict v);

struct PacketResult {
  Verdict verdict = Verdict::Forward;
  std::vector<std::uint8_t> bytes;
  std::size_t instructions_executed = 0;
};

/// A loaded program: names resolved to slots, audit enforced. Register
/// state lives outside in a RegisterFile so one program can drive several
/// independent instances.
class Pipeline {
 public:
  /// Throws ProgramError if the audit fails and BuildError for references
  /// to undeclared fields, metadata, registers or tables.
  explicit Pipeline(PipelineProgram program);

  RegisterFile make_registers() const;

  PacketResult execute(std::span<const std::uint8_t> packet, RegisterFile& registers) const;

  const PipelineProgram& program() const { return program_; }
  const ConstraintReport& audit_report() const { return report_; }

 private:
  struct Slot {
    bool is_const = false;
    std::uint64_t value = 0;
    std::size_t index = 0;
  };
  struct Compiled {
    OpCode op = OpCode::Assign;
    Comparator cmp = Comparator::Eq;
    std::size_t dst = 0;
    Slot a;
    Slot b;
    std::size_t object = 0;
    bool guarded = false;
    std::size_t guard = 0;
    int skip = 0;
  };

  Slot resolve(const Operand& operand, const std::string& where) const;
  std::size_t resolve_var(const std::string& name, const std::string& where) const;

  PipelineProgram program_;
  ConstraintReport report_;
  std::unordered_map<std::string, std::size_t> slots_;
  std::size_t field_count_ = 0;
  std::vector<std::string> register_names_;
  std::vector<std::vector<Compiled>> stages_;
  std::vector<std::pair<Slot, std::size_t>> trailer_;
};

/// One-shot convenience wrapper around Pipeline::execute.
PacketResult execute(const PipelineProgram& program, std::span<const std::uint8_t> packet,
                     RegisterFile& registers);

}  // namespace civic::dp
