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

#include "civic/dataplane/program.hpp"

#include <algorithm>
#include <array>
#include <utility>

#include "civic/error.hpp"

namespace civic::dp {

namespace {

constexpr std::array<std::pair<OpCode, std::string_view>, 24> kOpNames{{
    {OpCode::Assign, "assign"},         {OpCode::Add, "add"},
    {OpCode::Sub, "sub"},               {OpCode::Cmp, "cmp"},
    {OpCode::And, "and"},               {OpCode::Or, "or"},
    {OpCode::Xor, "xor"},               {OpCode::Not, "not"},
    {OpCode::Shl, "shl"},               {OpCode::Shr, "shr"},
    {OpCode::Mul, "mul"},               {OpCode::Div, "div"},
    {OpCode::Mod, "mod"},               {OpCode::FAdd, "fadd"},
    {OpCode::FMul, "fmul"},             {OpCode::Skip, "skip"},
    {OpCode::RingPush, "ring_push"},    {OpCode::RingOldest, "ring_oldest"},
    {OpCode::RingNewest, "ring_newest"}, {OpCode::RingFilled, "ring_filled"},
    {OpCode::RingIndex, "ring_index"},  {OpCode::RangeMatch, "range_match"},
    {OpCode::ExactMatch, "exact_match"}, {OpCode::Drop, "drop"},
}};

constexpr std::array<std::pair<Comparator, std::string_view>, 6> kCmpNames{{
    {Comparator::Lt, "<"},
    {Comparator::Gt, ">"},
    {Comparator::Le, "<="},
    {Comparator::Ge, ">="},
    {Comparator::Eq, "=="},
    {Comparator::Ne, "!="},
}};

nlohmann::json operand_json(const Operand& o) {
  switch (o.kind) {
    case Operand::Kind::Var: return o.var;
    case Operand::Kind::Const: return o.value;
    case Operand::Kind::None: break;
  }
  return nullptr;
}

Operand operand_from(const nlohmann::json& j) {
  if (j.is_null()) return {};
  if (j.is_string()) return Operand::variable(j.get<std::string>());
  if (j.is_number_unsigned() || j.is_number_integer()) {
    return Operand::constant(j.get<std::uint64_t>());
  }
  throw BuildError("program: operand must be a variable name or an unsigned constant");
}

}  // namespace

std::size_t ParseSpec::required_length() const {
  std::size_t n = 0;
  for (const FieldSpec& f : fields) n = std::max(n, f.offset + f.width);
  return n;
}

std::optional<FieldMap> parse(std::span<const std::uint8_t> bytes, const ParseSpec& spec) {
  if (bytes.size() < spec.required_length()) return std::nullopt;
  FieldMap out;
  for (const FieldSpec& f : spec.fields) {
    std::uint64_t v = 0;
    for (std::size_t i = 0; i < f.width; ++i) {
      v |= static_cast<std::uint64_t>(bytes[f.offset + i]) << (8 * i);
    }
    out[f.name] = v;
  }
  return out;
}

std::string_view to_string(OpCode op) {
  for (const auto& [code, name] : kOpNames) {
    if (code == op) return name;
  }
  return "?";
}

OpCode parse_opcode(std::string_view name) {
  for (const auto& [code, n] : kOpNames) {
    if (n == name) return code;
  }
  throw BuildError("unknown opcode '" + std::string(name) + "'");
}

std::string_view to_string(Comparator c) {
  for (const auto& [code, name] : kCmpNames) {
    if (code == c) return name;
  }
  return "?";
}

Comparator parse_comparator(std::string_view symbol) {
  for (const auto& [code, n] : kCmpNames) {
    if (n == symbol) return code;
  }
  throw BuildError("unknown comparator '" + std::string(symbol) + "'");
}

bool compare(Comparator c, std::uint64_t a, std::uint64_t b) {
  switch (c) {
    case Comparator::Lt: return a < b;
    case Comparator::Gt: return a > b;
    case Comparator::Le: return a <= b;
    case Comparator::Ge: return a >= b;
    case Comparator::Eq: return a == b;
    case Comparator::Ne: return a != b;
  }
  return false;
}

std::size_t PipelineProgram::instruction_count() const {
  std::size_t n = 0;
  for (const Stage& s : stages) n += s.ops.size();
  return n;
}

nlohmann::json to_json(const PipelineProgram& p) {
  nlohmann::json j;
  j["name"] = p.name;
  for (const FieldSpec& f : p.parser.fields) {
    j["fields"].push_back({{"name", f.name}, {"offset", f.offset}, {"width", f.width}});
  }
  j["metadata"] = p.metadata;
  j["registers"] = nlohmann::json::array();
  for (const RegisterDecl& r : p.registers) {
    j["registers"].push_back({{"name", r.name}, {"capacity", r.capacity}});
  }
  j["range_tables"] = nlohmann::json::array();
  for (const RangeTableDecl& t : p.range_tables) {
    nlohmann::json entries = nlohmann::json::array();
    for (const RangeEntry& e : t.table.entries()) {
      entries.push_back({{"lo", e.lo}, {"hi", e.hi}, {"action", e.action}});
    }
    j["range_tables"].push_back(
        {{"name", t.name}, {"default", t.table.default_action()}, {"entries", entries}});
  }
  j["exact_tables"] = nlohmann::json::array();
  for (const ExactTableDecl& t : p.exact_tables) {
    std::vector<std::pair<std::uint64_t, std::uint32_t>> entries(t.table.entries().begin(),
                                                                  t.table.entries().end());
    std::sort(entries.begin(), entries.end());
    j["exact_tables"].push_back(
        {{"name", t.name}, {"default", t.table.default_action()}, {"entries", entries}});
  }
  j["stages"] = nlohmann::json::array();
  for (const Stage& s : p.stages) {
    nlohmann::json ops = nlohmann::json::array();
    for (const Instruction& in : s.ops) {
      nlohmann::json o{{"op", to_string(in.op)}};
      if (!in.dst.empty()) o["dst"] = in.dst;
      if (in.a.kind != Operand::Kind::None) o["a"] = operand_json(in.a);
      if (in.b.kind != Operand::Kind::None) o["b"] = operand_json(in.b);
      if (in.op == OpCode::Cmp) o["cmp"] = to_string(in.cmp);
      if (!in.object.empty()) o["object"] = in.object;
      if (!in.guard.empty()) o["guard"] = in.guard;
      if (in.op == OpCode::Skip) o["skip"] = in.skip;
      ops.push_back(std::move(o));
    }
    j["stages"].push_back({{"name", s.name}, {"ops", ops}});
  }
  j["egress"]["append_trailer"] = p.egress.append_trailer;
  j["egress"]["trailer"] = nlohmann::json::array();
  for (const TrailerField& f : p.egress.trailer) {
    j["egress"]["trailer"].push_back({{"value", operand_json(f.value)}, {"width", f.width}});
  }
  return j;
}

PipelineProgram program_from_json(const nlohmann::json& j) {
  try {
    PipelineProgram p;
    p.name = j.value("name", "");
    for (const auto& f : j.at("fields")) {
      p.parser.fields.push_back(
          {f.at("name").get<std::string>(), f.at("offset").get<std::size_t>(),
           f.at("width").get<std::size_t>()});
    }
    p.metadata = j.value("metadata", std::vector<std::string>{});
    for (const auto& r : j.value("registers", nlohmann::json::array())) {
      p.registers.push_back({r.at("name").get<std::string>(), r.at("capacity").get<std::uint32_t>()});
    }
    for (const auto& t : j.value("range_tables", nlohmann::json::array())) {
      std::vector<RangeEntry> entries;
      for (const auto& e : t.at("entries")) {
        entries.push_back({e.at("lo").get<std::uint64_t>(), e.at("hi").get<std::uint64_t>(),
                           e.at("action").get<std::uint32_t>()});
      }
      p.range_tables.push_back(
          {t.at("name").get<std::string>(),
           RangeTable(std::move(entries), t.value("default", std::uint32_t{0}))});
    }
    for (const auto& t : j.value("exact_tables", nlohmann::json::array())) {
      ExactTable table(t.value("default", std::uint32_t{0}));
      for (const auto& e : t.at("entries")) {
        table.insert(e.at(0).get<std::uint64_t>(), e.at(1).get<std::uint32_t>());
      }
      p.exact_tables.push_back({t.at("name").get<std::string>(), std::move(table)});
    }
    for (const auto& s : j.at("stages")) {
      Stage stage;
      stage.name = s.value("name", "");
      for (const auto& o : s.at("ops")) {
        Instruction in;
        in.op = parse_opcode(o.at("op").get<std::string>());
        in.dst = o.value("dst", "");
        if (o.contains("a")) in.a = operand_from(o["a"]);
        if (o.contains("b")) in.b = operand_from(o["b"]);
        if (o.contains("cmp")) in.cmp = parse_comparator(o["cmp"].get<std::string>());
        in.object = o.value("object", "");
        in.guard = o.value("guard", "");
        in.skip = o.value("skip", 0);
        stage.ops.push_back(std::move(in));
      }
      p.stages.push_back(std::move(stage));
    }
    if (j.contains("egress")) {
      const auto& e = j["egress"];
      p.egress.append_trailer = e.value("append_trailer", false);
      for (const auto& f : e.value("trailer", nlohmann::json::array())) {
        p.egress.trailer.push_back({operand_from(f.at("value")), f.at("width").get<std::size_t>()});
      }
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw BuildError(std::string("program description: ") + e.what());
  }
}

namespace ops {

Instruction assign(std::string dst, Operand a, std::string guard) {
  Instruction in;
  in.op = OpCode::Assign;
  in.dst = std::move(dst);
  in.a = std::move(a);
  in.guard = std::move(guard);
  return in;
}

Instruction binary(OpCode op, std::string dst, Operand a, Operand b, std::string guard) {
  Instruction in;
  in.op = op;
  in.dst = std::move(dst);
  in.a = std::move(a);
  in.b = std::move(b);
  in.guard = std::move(guard);
  return in;
}

Instruction cmp(Comparator c, std::string dst, Operand a, Operand b, std::string guard) {
  Instruction in = binary(OpCode::Cmp, std::move(dst), std::move(a), std::move(b), std::move(guard));
  in.cmp = c;
  return in;
}

Instruction ring_push(std::string reg, Operand value, std::string guard) {
  Instruction in;
  in.op = OpCode::RingPush;
  in.object = std::move(reg);
  in.a = std::move(value);
  in.guard = std::move(guard);
  return in;
}

Instruction ring_read(OpCode op, std::string dst, std::string reg) {
  Instruction in;
  in.op = op;
  in.dst = std::move(dst);
  in.object = std::move(reg);
  return in;
}

Instruction range_match(std::string dst, std::string table, Operand key, std::string guard) {
  Instruction in;
  in.op = OpCode::RangeMatch;
  in.dst = std::move(dst);
  in.object = std::move(table);
  in.a = std::move(key);
  in.guard = std::move(guard);
  return in;
}

Instruction exact_match(std::string dst, std::string table, Operand key, std::string guard) {
  Instruction in = range_match(std::move(dst), std::move(table), std::move(key), std::move(guard));
  in.op = OpCode::ExactMatch;
  return in;
}

Instruction skip(int count, std::string guard) {
  Instruction in;
  in.op = OpCode::Skip;
  in.skip = count;
  in.guard = std::move(guard);
  return in;
}

Instruction drop(std::string guard) {
  Instruction in;
  in.op = OpCode::Drop;
  in.guard = std::move(guard);
  return in;
}

}  // namespace ops

}  // namespace civic::dp
