#include "cpu/machine_state.hpp"

#include <algorithm>
#include <stdexcept>

#include "common/hash.hpp"

namespace pacasm::cpu {

std::string_view name(FaultKind k) {
  switch (k) {
    case FaultKind::Unaligned: return "unaligned";
    case FaultKind::OutOfRegion: return "out-of-region";
    case FaultKind::StoreToText: return "store-to-text";
    case FaultKind::Undecodable: return "undecodable";
  }
  return "?";
}

std::string_view name(HaltCause c) {
  switch (c) {
    case HaltCause::None: return "running";
    case HaltCause::Break: return "break-instruction";
    case HaltCause::PcLeftText: return "pc-left-text";
    case HaltCause::StepLimit: return "step-limit";
    case HaltCause::Fault: return "fault";
  }
  return "?";
}

uint32_t read_be32(std::span<const uint8_t> ram, uint32_t addr) {
  return (uint32_t{ram[addr]} << 24) | (uint32_t{ram[addr + 1]} << 16) |
         (uint32_t{ram[addr + 2]} << 8) | uint32_t{ram[addr + 3]};
}

void write_be32(std::span<uint8_t> ram, uint32_t addr, uint32_t v) {
  ram[addr] = static_cast<uint8_t>(v >> 24);
  ram[addr + 1] = static_cast<uint8_t>(v >> 16);
  ram[addr + 2] = static_cast<uint8_t>(v >> 8);
  ram[addr + 3] = static_cast<uint8_t>(v);
}

std::vector<uint8_t> MachineState::serialize() const {
  ByteWriter w;
  w.u32(0x534d5350);  // "PSMS"
  w.u32(1);
  for (uint32_t r : regs) w.u32(r);
  w.u32(pc);
  w.u64(cycles);
  w.u64(steps);
  w.u8(static_cast<uint8_t>(halt.cause));
  w.u8(static_cast<uint8_t>(halt.fault));
  w.u32(halt.fault_address);
  std::vector<uint32_t> pages;
  for (uint32_t p = 0; p < MemoryLayout::kRamSize / kPageSize; ++p) {
    auto first = ram.begin() + static_cast<std::ptrdiff_t>(p) * kPageSize;
    if (std::any_of(first, first + kPageSize, [](uint8_t b) { return b != 0; })) pages.push_back(p);
  }
  w.u32(static_cast<uint32_t>(pages.size()));
  for (uint32_t p : pages) {
    w.u32(p);
    w.bytes(std::span(ram).subspan(static_cast<size_t>(p) * kPageSize, kPageSize));
  }
  return w.take();
}

void MachineState::deserialize(std::span<const uint8_t> bytes) {
  ByteReader r(bytes);
  if (r.u32() != 0x534d5350 || r.u32() != 1) throw std::invalid_argument("not a machine snapshot");
  for (auto& reg : regs) reg = r.u32();
  pc = r.u32();
  cycles = r.u64();
  steps = r.u64();
  halt.cause = static_cast<HaltCause>(r.u8());
  halt.fault = static_cast<FaultKind>(r.u8());
  halt.fault_address = r.u32();
  std::fill(ram.begin(), ram.end(), 0);
  const uint32_t n = r.u32();
  for (uint32_t i = 0; i < n; ++i) {
    const uint32_t p = r.u32();
    if (p >= MemoryLayout::kRamSize / kPageSize) throw std::invalid_argument("bad page index");
    auto src = r.bytes(kPageSize);
    std::copy(src.begin(), src.end(), ram.begin() + static_cast<std::ptrdiff_t>(p) * kPageSize);
  }
}

}  // namespace pacasm::cpu
