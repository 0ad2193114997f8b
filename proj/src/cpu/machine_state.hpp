#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "asm/isa.hpp"

namespace pacasm::cpu {

struct MemoryLayout {
  static constexpr uint32_t kTextBase = 0x00000000;
  static constexpr uint32_t kTextEnd = 0x00010000;  // exclusive
  static constexpr uint32_t kDataBase = 0x00010000;
  static constexpr uint32_t kDataEnd = 0x00020000;
  static constexpr uint32_t kStackBase = 0x00020000;
  static constexpr uint32_t kStackEnd = 0x00030000;
  static constexpr uint32_t kMmioBase = 0x00030000;
  static constexpr uint32_t kMmioEnd = 0x00040000;
  static constexpr uint32_t kInitialSp = 0x0002fff0;
  static constexpr uint32_t kRamSize = kMmioBase;  // text + data + stack are RAM-backed
};

enum class FaultKind : uint8_t { Unaligned, OutOfRegion, StoreToText, Undecodable };
enum class HaltCause : uint8_t { None, Break, PcLeftText, StepLimit, Fault };

std::string_view name(FaultKind k);
std::string_view name(HaltCause c);

struct HaltState {
  HaltCause cause = HaltCause::None;
  FaultKind fault = FaultKind::Unaligned;  // meaningful only when cause == Fault
  uint32_t fault_address = 0;

  bool halted() const { return cause != HaltCause::None; }
  friend bool operator==(const HaltState&, const HaltState&) = default;
};

// Text is immutable once loaded (stores into it fault), so its decoded form is
// shared between copies of a MachineState.
struct DecodedText {
  std::vector<std::optional<isa::Instruction>> insts;
  std::vector<uint32_t> words;
};

struct MachineState {
  std::array<uint32_t, 32> regs{};
  uint32_t pc = 0;
  uint64_t cycles = 0;
  uint64_t steps = 0;
  HaltState halt;
  std::vector<uint8_t> ram = std::vector<uint8_t>(MemoryLayout::kRamSize, 0);
  std::shared_ptr<const DecodedText> text;

  uint32_t text_size() const { return text ? static_cast<uint32_t>(text->words.size() * 4) : 0; }

  // Canonical snapshot: registers, pc, cycles, steps, halt state and every
  // non-zero 256-byte RAM page; all integers little-endian.
  std::vector<uint8_t> serialize() const;
  // Restores from serialize() output; `text` is kept from *this.
  void deserialize(std::span<const uint8_t> bytes);
};

inline constexpr uint32_t kPageSize = 256;

uint32_t read_be32(std::span<const uint8_t> ram, uint32_t addr);
void write_be32(std::span<uint8_t> ram, uint32_t addr, uint32_t v);

}  // namespace pacasm::cpu
