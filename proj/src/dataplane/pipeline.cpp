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

#include "civic/dataplane/pipeline.hpp"

#include "civic/error.hpp"

namespace civic::dp {

namespace {

constexpr std::uint64_t kWordMask = 0xffffffffULL;

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::Forward: return "forward";
    case Verdict::ForwardLabeled: return "forward+label";
    case Verdict::Drop: return "drop";
  }
  return "?";
}

Pipeline::Pipeline(PipelineProgram program) : program_(std::move(program)) {
  report_ = audit(program_);
  if (!report_.pass()) {
    throw ProgramError("program '" + program_.name + "' fails the constraint audit: " +
                       report_.violations.front());
  }

  for (const FieldSpec& f : program_.parser.fields) {
    if (f.width != 1 && f.width != 2 && f.width != 4 && f.width != 8) {
      throw BuildError("field '" + f.name + "' has unsupported width");
    }
    if (!slots_.emplace(f.name, slots_.size()).second) {
      throw BuildError("field '" + f.name + "' declared twice");
    }
  }
  field_count_ = slots_.size();
  for (const std::string& m : program_.metadata) {
    if (!slots_.emplace(m, slots_.size()).second) {
      throw BuildError("metadata '" + m + "' collides with another name");
    }
  }
  for (const RegisterDecl& r : program_.registers) register_names_.push_back(r.name);

  auto find_register = [&](const std::string& name, const std::string& where) {
    for (std::size_t i = 0; i < register_names_.size(); ++i) {
      if (register_names_[i] == name) return i;
    }
    throw BuildError(where + ": undeclared register '" + name + "'");
  };
  auto find_range = [&](const std::string& name, const std::string& where) {
    for (std::size_t i = 0; i < program_.range_tables.size(); ++i) {
      if (program_.range_tables[i].name == name) return i;
    }
    throw BuildError(where + ": undeclared range table '" + name + "'");
  };
  auto find_exact = [&](const std::string& name, const std::string& where) {
    for (std::size_t i = 0; i < program_.exact_tables.size(); ++i) {
      if (program_.exact_tables[i].name == name) return i;
    }
    throw BuildError(where + ": undeclared exact table '" + name + "'");
  };

  for (const Stage& stage : program_.stages) {
    std::vector<Compiled> compiled;
    for (std::size_t i = 0; i < stage.ops.size(); ++i) {
      const Instruction& in = stage.ops[i];
      const std::string where = "stage '" + stage.name + "' op " + std::to_string(i);
      Compiled c{};
      c.op = in.op;
      c.cmp = in.cmp;
      c.skip = in.skip;
      if (!in.guard.empty()) {
        c.guarded = true;
        c.guard = resolve_var(in.guard, where);
      }
      const bool writes = in.op != OpCode::RingPush && in.op != OpCode::Skip &&
                          in.op != OpCode::Drop;
      if (writes) {
        c.dst = resolve_var(in.dst, where);
        if (c.dst < field_count_) throw BuildError(where + ": cannot write parsed field '" + in.dst + "'");
      }
      switch (in.op) {
        case OpCode::RingPush:
          c.object = find_register(in.object, where);
          c.a = resolve(in.a, where);
          break;
        case OpCode::RingOldest:
        case OpCode::RingNewest:
        case OpCode::RingFilled:
        case OpCode::RingIndex: c.object = find_register(in.object, where); break;
        case OpCode::RangeMatch:
          c.object = find_range(in.object, where);
          c.a = resolve(in.a, where);
          break;
        case OpCode::ExactMatch:
          c.object = find_exact(in.object, where);
          c.a = resolve(in.a, where);
          break;
        case OpCode::Assign:
        case OpCode::Not: c.a = resolve(in.a, where); break;
        case OpCode::Skip:
        case OpCode::Drop: break;
        default:
          c.a = resolve(in.a, where);
          c.b = resolve(in.b, where);
          break;
      }
      compiled.push_back(c);
    }
    stages_.push_back(std::move(compiled));
  }

  for (const TrailerField& f : program_.egress.trailer) {
    if (f.width != 1 && f.width != 2 && f.width != 4 && f.width != 8) {
      throw BuildError("trailer field has unsupported width");
    }
    trailer_.emplace_back(resolve(f.value, "egress"), f.width);
  }
}

std::size_t Pipeline::resolve_var(const std::string& name, const std::string& where) const {
  const auto it = slots_.find(name);
  if (it == slots_.end()) throw BuildError(where + ": undeclared variable '" + name + "'");
  return it->second;
}

Pipeline::Slot Pipeline::resolve(const Operand& operand, const std::string& where) const {
  switch (operand.kind) {
    case Operand::Kind::Const: return {true, operand.value, 0};
    case Operand::Kind::Var: return {false, 0, resolve_var(operand.var, where)};
    case Operand::Kind::None: break;
  }
  throw BuildError(where + ": missing operand");
}

RegisterFile Pipeline::make_registers() const {
  RegisterFile file;
  for (const RegisterDecl& r : program_.registers) file.add(r.name, r.capacity);
  return file;
}

PacketResult Pipeline::execute(std::span<const std::uint8_t> packet,
                               RegisterFile& registers) const {
  PacketResult result;
  const std::optional<FieldMap> fields = parse(packet, program_.parser);
  if (!fields) {
    result.verdict = Verdict::Drop;
    return result;
  }

  std::vector<std::uint64_t> phv(slots_.size(), 0);
  {
    std::size_t i = 0;
    for (const FieldSpec& f : program_.parser.fields) phv[i++] = fields->at(f.name);
  }
  auto get = [&](const Slot& s) { return s.is_const ? s.value : phv[s.index]; };

  bool dropped = false;
  const std::size_t budget = program_.instruction_count();
  std::size_t executed = 0;
  for (const std::vector<Compiled>& stage : stages_) {
    for (std::size_t i = 0; i < stage.size(); ++i) {
      const Compiled& c = stage[i];
      if (++executed > budget) throw ProgramError("single-pass bound exceeded");
      if (c.guarded && phv[c.guard] == 0) continue;
      switch (c.op) {
        case OpCode::Assign: phv[c.dst] = get(c.a); break;
        case OpCode::Add: phv[c.dst] = (get(c.a) + get(c.b)) & kWordMask; break;
        case OpCode::Sub: phv[c.dst] = (get(c.a) - get(c.b)) & kWordMask; break;
        case OpCode::Cmp: phv[c.dst] = compare(c.cmp, get(c.a), get(c.b)) ? 1 : 0; break;
        case OpCode::And: phv[c.dst] = get(c.a) & get(c.b); break;
        case OpCode::Or: phv[c.dst] = get(c.a) | get(c.b); break;
        case OpCode::Xor: phv[c.dst] = get(c.a) ^ get(c.b); break;
        case OpCode::Not: phv[c.dst] = ~get(c.a) & kWordMask; break;
        case OpCode::Shl: phv[c.dst] = (get(c.a) << (get(c.b) & 63)) & kWordMask; break;
        case OpCode::Shr: phv[c.dst] = (get(c.a) & kWordMask) >> (get(c.b) & 63); break;
        case OpCode::Skip: i += static_cast<std::size_t>(c.skip); break;
        case OpCode::RingPush:
          registers.at(register_names_[c.object])
              .push(static_cast<std::uint32_t>(get(c.a) & kWordMask));
          break;
        case OpCode::RingOldest:
          phv[c.dst] = registers.at(register_names_[c.object]).window().oldest;
          break;
        case OpCode::RingNewest:
          phv[c.dst] = registers.at(register_names_[c.object]).window().newest;
          break;
        case OpCode::RingFilled:
          phv[c.dst] = registers.at(register_names_[c.object]).window().filled ? 1 : 0;
          break;
        case OpCode::RingIndex: phv[c.dst] = registers.at(register_names_[c.object]).index(); break;
        case OpCode::RangeMatch:
          phv[c.dst] = program_.range_tables[c.object].table.lookup(
              static_cast<std::uint32_t>(get(c.a) & kWordMask));
          break;
        case OpCode::ExactMatch:
          phv[c.dst] = program_.exact_tables[c.object].table.lookup(get(c.a));
          break;
        case OpCode::Drop: dropped = true; break;
        case OpCode::Mul:
        case OpCode::Div:
        case OpCode::Mod:
        case OpCode::FAdd:
        case OpCode::FMul:
          throw ProgramError("forbidden instruction reached the interpreter");
      }
    }
  }
  result.instructions_executed = executed;

  if (dropped) {
    result.verdict = Verdict::Drop;
    return result;
  }
  result.bytes.assign(packet.begin(), packet.end());
  if (program_.egress.append_trailer) {
    for (const auto& [slot, width] : trailer_) {
      const std::uint64_t v = get(slot);
      for (std::size_t k = 0; k < width; ++k) {
        result.bytes.push_back(static_cast<std::uint8_t>(v >> (8 * k)));
      }
    }
    result.verdict = Verdict::ForwardLabeled;
  } else {
    result.verdict = Verdict::Forward;
  }
  return result;
}

PacketResult execute(const PipelineProgram& program, std::span<const std::uint8_t> packet,
                     RegisterFile& registers) {
  return Pipeline(program).execute(packet, registers);
}

}  // namespace civic::dp
