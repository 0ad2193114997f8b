#include "cpu/emulator.hpp"

#include <algorithm>

namespace pacasm::cpu {

using isa::Op;
using L = MemoryLayout;

const CostTable& CostTable::uniform() {
  static const CostTable table;
  return table;
}

void CostTable::set(std::string_view mnemonic, uint32_t cycles) {
  auto op = isa::lookup(mnemonic);
  if (!op) throw std::invalid_argument("unknown mnemonic in cost table: " + std::string(mnemonic));
  costs_[static_cast<size_t>(*op)] = cycles;
}

MachineState load_program(const assembler::Program& p) {
  if (p.text.size() > L::kTextEnd - L::kTextBase)
    throw LoadError("region-overflow", "text image of " + std::to_string(p.text.size()) +
                                           " bytes exceeds the text region");
  if (p.data.size() > L::kDataEnd - L::kDataBase)
    throw LoadError("region-overflow", "data image of " + std::to_string(p.data.size()) +
                                           " bytes exceeds the data region");
  if (p.text.size() % 4 != 0) throw LoadError("bad-image", "text image is not word aligned");

  MachineState s;
  std::copy(p.text.begin(), p.text.end(), s.ram.begin() + L::kTextBase);
  std::copy(p.data.begin(), p.data.end(), s.ram.begin() + L::kDataBase);
  auto text = std::make_shared<DecodedText>();
  for (uint32_t off = 0; off < p.text.size(); off += 4) {
    const uint32_t w = read_be32(s.ram, L::kTextBase + off);
    text->words.push_back(w);
    text->insts.push_back(isa::decode(w));
  }
  s.text = std::move(text);
  s.pc = p.entry;
  s.regs[isa::kSp] = L::kInitialSp;
  return s;
}

namespace {

void fault(MachineState& s, FaultKind kind, uint32_t addr) {
  s.halt.cause = HaltCause::Fault;
  s.halt.fault = kind;
  s.halt.fault_address = addr;
}

struct Access {
  MachineState& s;
  MmioHook& hook;
  StepRecord* rec;

  // Returns false after faulting the state.
  bool load(uint32_t addr, unsigned size, uint32_t& out) {
    if (rec) rec->access_addr = addr;
    if (size == 4 && addr % 4 != 0) {
      fault(s, FaultKind::Unaligned, addr);
      return false;
    }
    if (addr >= L::kMmioEnd) {
      fault(s, FaultKind::OutOfRegion, addr);
      return false;
    }
    if (addr >= L::kMmioBase) {
      uint32_t v = hook.on_load(addr, size).value_or(0);
      out = size == 4 ? v : (v & 0xff);
      return true;
    }
    out = size == 4 ? read_be32(s.ram, addr) : s.ram[addr];
    return true;
  }

  bool store(uint32_t addr, unsigned size, uint32_t value) {
    if (rec) rec->access_addr = addr;
    if (size == 4 && addr % 4 != 0) {
      fault(s, FaultKind::Unaligned, addr);
      return false;
    }
    if (addr < L::kTextEnd) {
      fault(s, FaultKind::StoreToText, addr);
      return false;
    }
    if (addr >= L::kMmioEnd) {
      fault(s, FaultKind::OutOfRegion, addr);
      return false;
    }
    if (addr >= L::kMmioBase) {
      hook.on_store(addr, size, size == 4 ? value : (value & 0xff));
      return true;
    }
    if (rec) {
      rec->mem_size = static_cast<uint8_t>(size);
      rec->mem_addr = addr;
      std::copy_n(s.ram.begin() + addr, size, rec->mem_old.begin());
    }
    if (size == 4) write_be32(s.ram, addr, value);
    else s.ram[addr] = static_cast<uint8_t>(value);
    if (rec) std::copy_n(s.ram.begin() + addr, size, rec->mem_new.begin());
    return true;
  }
};

}  // namespace

void step(MachineState& s, MmioHook& hook, const CostTable& costs, StepRecord* rec) {
  if (s.halt.halted()) return;
  if (rec) {
    *rec = StepRecord{};
    rec->pc_before = s.pc;
    rec->cycles_before = s.cycles;
    rec->steps_before = s.steps;
    rec->halt_before = s.halt;
  }
  const uint32_t pc = s.pc;
  if (pc % 4 != 0) {
    fault(s, FaultKind::Unaligned, pc);
    return;
  }
  const uint32_t index = (pc - L::kTextBase) / 4;
  if (pc < L::kTextBase || !s.text || index >= s.text->insts.size()) {
    s.halt.cause = HaltCause::PcLeftText;
    return;
  }
  const auto& decoded = s.text->insts[index];
  if (!decoded) {
    fault(s, FaultKind::Undecodable, pc);
    return;
  }
  const isa::Instruction& in = *decoded;
  auto& r = s.regs;
  const uint32_t rs = r[in.rs];
  const uint32_t rt = r[in.rt];
  const auto imm = static_cast<uint32_t>(in.imm);
  uint32_t next = pc + 4;

  int dest = -1;
  uint32_t value = 0;
  auto write = [&](int reg, uint32_t v) {
    dest = reg;
    value = v;
  };
  Access mem{s, hook, rec};

  switch (in.op) {
    case Op::Add:
    case Op::Addu: write(in.rd, rs + rt); break;
    case Op::Sub:
    case Op::Subu: write(in.rd, rs - rt); break;
    case Op::And: write(in.rd, rs & rt); break;
    case Op::Or: write(in.rd, rs | rt); break;
    case Op::Xor: write(in.rd, rs ^ rt); break;
    case Op::Nor: write(in.rd, ~(rs | rt)); break;
    case Op::Slt: write(in.rd, static_cast<int32_t>(rs) < static_cast<int32_t>(rt) ? 1 : 0); break;
    case Op::Sltu: write(in.rd, rs < rt ? 1 : 0); break;
    case Op::Sll: write(in.rd, rt << in.shamt); break;
    case Op::Srl: write(in.rd, rt >> in.shamt); break;
    case Op::Sra: write(in.rd, static_cast<uint32_t>(static_cast<int32_t>(rt) >> in.shamt)); break;
    case Op::Sllv: write(in.rd, rt << (rs & 31)); break;
    case Op::Srlv: write(in.rd, rt >> (rs & 31)); break;
    case Op::Mul:
      write(in.rd, static_cast<uint32_t>(static_cast<int64_t>(static_cast<int32_t>(rs)) *
                                         static_cast<int64_t>(static_cast<int32_t>(rt))));
      break;
    case Op::Jr: next = rs; break;
    case Op::Jalr:
      next = rs;
      write(in.rd, pc + 4);
      break;
    case Op::Addi:
    case Op::Addiu: write(in.rt, rs + imm); break;
    case Op::Slti: write(in.rt, static_cast<int32_t>(rs) < in.imm ? 1 : 0); break;
    case Op::Sltiu: write(in.rt, rs < imm ? 1 : 0); break;
    case Op::Andi: write(in.rt, rs & imm); break;
    case Op::Ori: write(in.rt, rs | imm); break;
    case Op::Xori: write(in.rt, rs ^ imm); break;
    case Op::Lui: write(in.rt, imm << 16); break;
    case Op::Lw:
    case Op::Lb:
    case Op::Lbu: {
      uint32_t v = 0;
      if (!mem.load(rs + imm, in.op == Op::Lw ? 4 : 1, v)) return;
      if (in.op == Op::Lb) v = static_cast<uint32_t>(static_cast<int32_t>(static_cast<int8_t>(v)));
      write(in.rt, v);
      break;
    }
    case Op::Sw:
    case Op::Sb:
      if (!mem.store(rs + imm, in.op == Op::Sw ? 4 : 1, rt)) return;
      break;
    case Op::Beq:
      if (rs == rt) next = isa::branch_destination(in, pc);
      break;
    case Op::Bne:
      if (rs != rt) next = isa::branch_destination(in, pc);
      break;
    case Op::J: next = isa::jump_destination(in, pc); break;
    case Op::Jal:
      write(isa::kRa, pc + 4);
      next = isa::jump_destination(in, pc);
      break;
    case Op::Break:
      s.halt.cause = HaltCause::Break;
      next = pc;
      break;
  }

  if (dest > 0) {
    if (rec) {
      rec->reg = static_cast<int8_t>(dest);
      rec->reg_old = r[dest];
      rec->reg_new = value;
    }
    r[dest] = value;
  }
  s.pc = next;
  s.cycles += costs.cost(in.op);
  s.steps += 1;
  if (rec) rec->executed = true;
}

void run(MachineState& s, MmioHook& hook, uint64_t budget, const CostTable& costs) {
  uint64_t n = 0;
  while (!s.halt.halted() && !hook.stop_requested()) {
    if (n == budget) {
      // A program that ran off the end of its text is not over budget.
      const bool off_end = s.pc < L::kTextBase || s.pc - L::kTextBase >= s.text_size();
      s.halt.cause = off_end && s.pc % 4 == 0 ? HaltCause::PcLeftText : HaltCause::StepLimit;
      return;
    }
    step(s, hook, costs);
    ++n;
  }
}

void unapply(MachineState& s, const StepRecord& r) {
  if (r.mem_size) std::copy_n(r.mem_old.begin(), r.mem_size, s.ram.begin() + r.mem_addr);
  if (r.reg > 0) s.regs[static_cast<size_t>(r.reg)] = r.reg_old;
  s.pc = r.pc_before;
  s.cycles = r.cycles_before;
  s.steps = r.steps_before;
  s.halt = r.halt_before;
}

}  // namespace pacasm::cpu
