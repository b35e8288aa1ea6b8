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

// Declarative match-action pipeline program. A program parses fixed-offset
// fields out of the packet, runs an ordered list of stages and optionally
// appends a trailer built from metadata. Control flow is expressed through
// guard predicates (an instruction runs only if its guard variable is
// non-zero) plus forward-only skips, so a program is a single pass.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "civic/dataplane/tables.hpp"

namespace civic::dp {

struct FieldSpec {
  std::string name;
  std::size_t offset = 0;
  std::size_t width = 4;  // bytes: 1, 2, 4 or 8, little-endian
};

struct ParseSpec {
  std::vector<FieldSpec> fields;

  /// Bytes a packet must carry to satisfy every field.
  std::size_t required_length() const;
};

using FieldMap = std::map<std::string, std::uint64_t>;

/// Extracts all declared fields; nullopt (drop) if the packet is too short.
std::optional<FieldMap> parse(std::span<const std::uint8_t> bytes, const ParseSpec& spec);

enum class OpCode {
  Assign,
  Add,
  Sub,
  Cmp,
  And,
  Or,
  Xor,
  Not,
  Shl,
  Shr,
  Mul,
  Div,
  Mod,
  FAdd,
  FMul,
  Skip,  // forward jump by `skip` instructions; skip <= 0 is a back-edge
  RingPush,
  RingOldest,
  RingNewest,
  RingFilled,
  RingIndex,
  RangeMatch,
  ExactMatch,
  Drop,
};

std::string_view to_string(OpCode op);
OpCode parse_opcode(std::string_view name);

enum class Comparator { Lt, Gt, Le, Ge, Eq, Ne };

std::string_view to_string(Comparator c);
Comparator parse_comparator(std::string_view symbol);
bool compare(Comparator c, std::uint64_t a, std::uint64_t b);

struct Operand {
  enum class Kind { None, Var, Const };

  Kind kind = Kind::None;
  std::string var;
  std::uint64_t value = 0;

  static Operand variable(std::string name) { return {Kind::Var, std::move(name), 0}; }
  static Operand constant(std::uint64_t v) { return {Kind::Const, {}, v}; }

  bool is_const() const { return kind == Kind::Const; }
  bool is_var() const { return kind == Kind::Var; }
};

struct Instruction {
  OpCode op = OpCode::Assign;
  std::string dst;
  Operand a;
  Operand b;
  Comparator cmp = Comparator::Eq;
  std::string object;  // register or table name
  std::string guard;   // metadata variable; empty = unconditional
  int skip = 0;
};

struct Stage {
  std::string name;
  std::vector<Instruction> ops;
};

struct RegisterDecl {
  std::string name;
  std::uint32_t capacity = 1;
};

struct RangeTableDecl {
  std::string name;
  RangeTable table;
};

struct ExactTableDecl {
  std::string name;
  ExactTable table;
};

struct TrailerField {
  Operand value;
  std::size_t width = 1;
};

struct EgressSpec {
  bool append_trailer = false;
  std::vector<TrailerField> trailer;
};

struct PipelineProgram {
  std::string name;
  ParseSpec parser;
  std::vector<std::string> metadata;
  std::vector<RegisterDecl> registers;
  std::vector<RangeTableDecl> range_tables;
  std::vector<ExactTableDecl> exact_tables;
  std::vector<Stage> stages;
  EgressSpec egress;

  std::size_t instruction_count() const;
};

nlohmann::json to_json(const PipelineProgram& program);
PipelineProgram program_from_json(const nlohmann::json& j);

// Instruction builders used by program generators and tests.
namespace ops {
Instruction assign(std::string dst, Operand a, std::string guard = {});
Instruction binary(OpCode op, std::string dst, Operand a, Operand b, std::string guard = {});
Instruction cmp(Comparator c, std::string dst, Operand a, Operand b, std::string guard = {});
Instruction ring_push(std::string reg, Operand value, std::string guard = {});
Instruction ring_read(OpCode op, std::string dst, std::string reg);
Instruction range_match(std::string dst, std::string table, Operand key, std::string guard = {});
Instruction exact_match(std::string dst, std::string table, Operand key, std::string guard = {});
Instruction skip(int count, std::string guard = {});
Instruction drop(std::string guard = {});
}  // namespace ops

}  // namespace civic::dp
