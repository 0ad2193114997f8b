#pragma once

// PMIPS: the MIPS32-style teaching subset. Standard MIPS32 bit encodings,
// no branch delay slots.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace pacasm::isa {

enum class Op : uint8_t {
  // R-type
  Add, Addu, Sub, Subu, And, Or, Xor, Nor, Slt, Sltu,
  Sll, Srl, Sra, Sllv, Srlv, Mul, Jr, Jalr,
  // I-type
  Addi, Addiu, Andi, Ori, Xori, Slti, Sltiu, Lui,
  Lw, Lb, Lbu, Sw, Sb, Beq, Bne,
  // J-type
  J, Jal,
  Break,
};
inline constexpr int kOpCount = static_cast<int>(Op::Break) + 1;

enum class Format : uint8_t {
  R3,        // op rd, rs, rt
  Shift,     // op rd, rt, sa
  ShiftVar,  // op rd, rt, rs
  JumpReg,   // jr rs
  JumpLink,  // jalr rd, rs
  ArithImm,  // op rt, rs, simm16
  LogicImm,  // op rt, rs, uimm16
  Lui,       // lui rt, uimm16
  Memory,    // op rt, simm16(rs)
  Branch,    // op rs, rt, target
  Jump,      // op target
  Halt,      // break
};

struct OpInfo {
  Op op;
  std::string_view mnemonic;
  Format format;
  uint8_t opcode;
  uint8_t funct;
};

std::span<const OpInfo> op_table();
const OpInfo& info(Op op);
std::optional<Op> lookup(std::string_view mnemonic);

// Decoded instruction. `imm` holds the field value already interpreted per
// format: sign-extended for ArithImm/Memory/Branch (branch: word offset),
// zero-extended for LogicImm/Lui. `target` is the 26-bit jump index.
struct Instruction {
  Op op = Op::Sll;
  uint8_t rs = 0;
  uint8_t rt = 0;
  uint8_t rd = 0;
  uint8_t shamt = 0;
  int32_t imm = 0;
  uint32_t target = 0;

  friend bool operator==(const Instruction&, const Instruction&) = default;
};

uint32_t encode(const Instruction& inst);

// Only canonical encodings decode: fields the format leaves unused must be
// zero. Everything else is data (".word").
std::optional<Instruction> decode(uint32_t word);

// Absolute branch/jump destination of an instruction located at `addr`.
uint32_t branch_destination(const Instruction& inst, uint32_t addr);
uint32_t jump_destination(const Instruction& inst, uint32_t addr);

std::string_view register_name(unsigned index);
// Accepts "$zero".."$ra", "$s8", and "$0".."$31".
std::optional<uint8_t> parse_register(std::string_view token);

inline constexpr uint8_t kZero = 0;
inline constexpr uint8_t kAt = 1;
inline constexpr uint8_t kSp = 29;
inline constexpr uint8_t kRa = 31;

}  // namespace pacasm::isa
