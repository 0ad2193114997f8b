#include "asm/isa.hpp"

#include <array>
#include <charconv>

namespace pacasm::isa {
namespace {

constexpr uint8_t kSpecial = 0x00;
constexpr uint8_t kSpecial2 = 0x1c;

constexpr std::array<OpInfo, kOpCount> kTable = {{
    {Op::Add, "add", Format::R3, kSpecial, 0x20},
    {Op::Addu, "addu", Format::R3, kSpecial, 0x21},
    {Op::Sub, "sub", Format::R3, kSpecial, 0x22},
    {Op::Subu, "subu", Format::R3, kSpecial, 0x23},
    {Op::And, "and", Format::R3, kSpecial, 0x24},
    {Op::Or, "or", Format::R3, kSpecial, 0x25},
    {Op::Xor, "xor", Format::R3, kSpecial, 0x26},
    {Op::Nor, "nor", Format::R3, kSpecial, 0x27},
    {Op::Slt, "slt", Format::R3, kSpecial, 0x2a},
    {Op::Sltu, "sltu", Format::R3, kSpecial, 0x2b},
    {Op::Sll, "sll", Format::Shift, kSpecial, 0x00},
    {Op::Srl, "srl", Format::Shift, kSpecial, 0x02},
    {Op::Sra, "sra", Format::Shift, kSpecial, 0x03},
    {Op::Sllv, "sllv", Format::ShiftVar, kSpecial, 0x04},
    {Op::Srlv, "srlv", Format::ShiftVar, kSpecial, 0x06},
    {Op::Mul, "mul", Format::R3, kSpecial2, 0x02},
    {Op::Jr, "jr", Format::JumpReg, kSpecial, 0x08},
    {Op::Jalr, "jalr", Format::JumpLink, kSpecial, 0x09},
    {Op::Addi, "addi", Format::ArithImm, 0x08, 0},
    {Op::Addiu, "addiu", Format::ArithImm, 0x09, 0},
    {Op::Andi, "andi", Format::LogicImm, 0x0c, 0},
    {Op::Ori, "ori", Format::LogicImm, 0x0d, 0},
    {Op::Xori, "xori", Format::LogicImm, 0x0e, 0},
    {Op::Slti, "slti", Format::ArithImm, 0x0a, 0},
    {Op::Sltiu, "sltiu", Format::ArithImm, 0x0b, 0},
    {Op::Lui, "lui", Format::Lui, 0x0f, 0},
    {Op::Lw, "lw", Format::Memory, 0x23, 0},
    {Op::Lb, "lb", Format::Memory, 0x20, 0},
    {Op::Lbu, "lbu", Format::Memory, 0x24, 0},
    {Op::Sw, "sw", Format::Memory, 0x2b, 0},
    {Op::Sb, "sb", Format::Memory, 0x28, 0},
    {Op::Beq, "beq", Format::Branch, 0x04, 0},
    {Op::Bne, "bne", Format::Branch, 0x05, 0},
    {Op::J, "j", Format::Jump, 0x02, 0},
    {Op::Jal, "jal", Format::Jump, 0x03, 0},
    {Op::Break, "break", Format::Halt, kSpecial, 0x0d},
}};

constexpr std::array<std::string_view, 32> kRegNames = {
    "$zero", "$at", "$v0", "$v1", "$a0", "$a1", "$a2", "$a3",
    "$t0",   "$t1", "$t2", "$t3", "$t4", "$t5", "$t6", "$t7",
    "$s0",   "$s1", "$s2", "$s3", "$s4", "$s5", "$s6", "$s7",
    "$t8",   "$t9", "$k0", "$k1", "$gp", "$sp", "$fp", "$ra"};

// funct -> op for the SPECIAL opcode; -1 when unassigned.
constexpr std::array<int8_t, 64> make_special_index() {
  std::array<int8_t, 64> idx{};
  for (auto& v : idx) v = -1;
  for (const auto& e : kTable)
    if (e.opcode == kSpecial) idx[e.funct] = static_cast<int8_t>(e.op);
  return idx;
}
constexpr auto kSpecialIndex = make_special_index();

constexpr std::array<int8_t, 64> make_opcode_index() {
  std::array<int8_t, 64> idx{};
  for (auto& v : idx) v = -1;
  for (const auto& e : kTable)
    if (e.opcode != kSpecial && e.opcode != kSpecial2) idx[e.opcode] = static_cast<int8_t>(e.op);
  return idx;
}
constexpr auto kOpcodeIndex = make_opcode_index();

}  // namespace

std::span<const OpInfo> op_table() { return kTable; }

const OpInfo& info(Op op) { return kTable[static_cast<size_t>(op)]; }

std::optional<Op> lookup(std::string_view mnemonic) {
  for (const auto& e : kTable)
    if (e.mnemonic == mnemonic) return e.op;
  return std::nullopt;
}

uint32_t encode(const Instruction& inst) {
  const OpInfo& oi = info(inst.op);
  const uint32_t opcode = static_cast<uint32_t>(oi.opcode) << 26;
  const uint32_t rs = static_cast<uint32_t>(inst.rs & 31) << 21;
  const uint32_t rt = static_cast<uint32_t>(inst.rt & 31) << 16;
  const uint32_t rd = static_cast<uint32_t>(inst.rd & 31) << 11;
  const uint32_t sa = static_cast<uint32_t>(inst.shamt & 31) << 6;
  const uint32_t imm16 = static_cast<uint32_t>(inst.imm) & 0xffff;
  switch (oi.format) {
    case Format::R3:
    case Format::ShiftVar:
      return opcode | rs | rt | rd | oi.funct;
    case Format::Shift:
      return opcode | rt | rd | sa | oi.funct;
    case Format::JumpReg:
      return opcode | rs | oi.funct;
    case Format::JumpLink:
      return opcode | rs | rd | oi.funct;
    case Format::ArithImm:
    case Format::LogicImm:
    case Format::Memory:
    case Format::Branch:
      return opcode | rs | rt | imm16;
    case Format::Lui:
      return opcode | rt | imm16;
    case Format::Jump:
      return opcode | (inst.target & 0x03ffffff);
    case Format::Halt:
      return oi.funct;
  }
  return 0;
}

std::optional<Instruction> decode(uint32_t word) {
  const uint8_t opcode = static_cast<uint8_t>(word >> 26);
  Instruction in;
  in.rs = (word >> 21) & 31;
  in.rt = (word >> 16) & 31;
  in.rd = (word >> 11) & 31;
  in.shamt = (word >> 6) & 31;
  const uint8_t funct = word & 63;

  if (opcode == kSpecial) {
    if (kSpecialIndex[funct] < 0) return std::nullopt;
    in.op = static_cast<Op>(kSpecialIndex[funct]);
    switch (info(in.op).format) {
      case Format::R3:
      case Format::ShiftVar:
        if (in.shamt != 0) return std::nullopt;
        break;
      case Format::Shift:
        if (in.rs != 0) return std::nullopt;
        break;
      case Format::JumpReg:
        if (in.rt != 0 || in.rd != 0 || in.shamt != 0) return std::nullopt;
        break;
      case Format::JumpLink:
        if (in.rt != 0 || in.shamt != 0) return std::nullopt;
        break;
      case Format::Halt:
        if (word != info(Op::Break).funct) return std::nullopt;
        in.rs = in.rt = in.rd = in.shamt = 0;
        break;
      default:
        return std::nullopt;
    }
    return in;
  }
  if (opcode == kSpecial2) {
    if (funct != info(Op::Mul).funct || in.shamt != 0) return std::nullopt;
    in.op = Op::Mul;
    return in;
  }
  if (kOpcodeIndex[opcode] < 0) return std::nullopt;
  in.op = static_cast<Op>(kOpcodeIndex[opcode]);
  in.rd = 0;
  in.shamt = 0;
  switch (info(in.op).format) {
    case Format::ArithImm:
    case Format::Memory:
    case Format::Branch:
      in.imm = static_cast<int16_t>(word & 0xffff);
      break;
    case Format::LogicImm:
      in.imm = static_cast<int32_t>(word & 0xffff);
      break;
    case Format::Lui:
      if (in.rs != 0) return std::nullopt;
      in.imm = static_cast<int32_t>(word & 0xffff);
      break;
    case Format::Jump:
      in.rs = in.rt = 0;
      in.target = word & 0x03ffffff;
      break;
    default:
      return std::nullopt;
  }
  return in;
}

uint32_t branch_destination(const Instruction& inst, uint32_t addr) {
  return addr + 4 + static_cast<uint32_t>(inst.imm) * 4;
}

uint32_t jump_destination(const Instruction& inst, uint32_t addr) {
  return ((addr + 4) & 0xf0000000u) | (inst.target << 2);
}

std::string_view register_name(unsigned index) { return kRegNames[index & 31]; }

std::optional<uint8_t> parse_register(std::string_view token) {
  if (token.size() < 2 || token[0] != '$') return std::nullopt;
  std::string_view body = token.substr(1);
  if (body[0] >= '0' && body[0] <= '9') {
    unsigned n = 0;
    auto [p, ec] = std::from_chars(body.data(), body.data() + body.size(), n);
    if (ec != std::errc() || p != body.data() + body.size() || n > 31) return std::nullopt;
    return static_cast<uint8_t>(n);
  }
  for (unsigned i = 0; i < 32; ++i)
    if (kRegNames[i].substr(1) == body) return static_cast<uint8_t>(i);
  if (body == "s8") return 30;
  return std::nullopt;
}

}  // namespace pacasm::isa
