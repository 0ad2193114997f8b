#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

#include "asm/assembler.hpp"
#include "cpu/machine_state.hpp"

namespace pacasm::cpu {

// Device side of the MMIO window. Only addresses inside
// [kMmioBase, kMmioEnd) are ever passed in.
class MmioHook {
 public:
  virtual ~MmioHook() = default;
  // nullopt reads as zero.
  virtual std::optional<uint32_t> on_load(uint32_t addr, unsigned size) = 0;
  // Returns false when the device ignored the store. MMIO is never RAM-backed.
  virtual bool on_store(uint32_t addr, unsigned size, uint32_t value) = 0;
  // Polled by run() after every step.
  virtual bool stop_requested() const { return false; }
};

class NullMmio final : public MmioHook {
 public:
  std::optional<uint32_t> on_load(uint32_t, unsigned) override { return std::nullopt; }
  bool on_store(uint32_t, unsigned, uint32_t) override { return false; }
};

// Cycles charged per executed instruction, keyed by mnemonic.
class CostTable {
 public:
  static const CostTable& uniform();

  void set(std::string_view mnemonic, uint32_t cycles);  // throws on unknown mnemonic
  uint32_t cost(isa::Op op) const { return costs_[static_cast<size_t>(op)]; }

 private:
  std::array<uint32_t, isa::kOpCount> costs_ = [] {
    std::array<uint32_t, isa::kOpCount> a{};
    a.fill(1);
    return a;
  }();
};

// Everything one step changed; enough to undo it exactly.
struct StepRecord {
  uint32_t pc_before = 0;
  uint64_t cycles_before = 0;
  uint64_t steps_before = 0;
  HaltState halt_before;

  int8_t reg = -1;  // register written, -1 when none
  uint32_t reg_old = 0;
  uint32_t reg_new = 0;

  uint8_t mem_size = 0;  // RAM bytes written, 0 when none
  uint32_t mem_addr = 0;
  std::array<uint8_t, 4> mem_old{};
  std::array<uint8_t, 4> mem_new{};

  bool executed = false;  // false when the step halted at fetch
  std::optional<uint32_t> access_addr;  // effective address of a load/store
};

class LoadError : public std::runtime_error {
 public:
  LoadError(std::string code, const std::string& msg) : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// Copies both images to their bases; pc = entry, $sp = kInitialSp.
MachineState load_program(const assembler::Program& p);

void step(MachineState& s, MmioHook& hook, const CostTable& costs = CostTable::uniform(),
          StepRecord* record = nullptr);

// Steps until halted, hook.stop_requested(), or `budget` steps have run; the
// last case halts with HaltCause::StepLimit.
void run(MachineState& s, MmioHook& hook, uint64_t budget,
         const CostTable& costs = CostTable::uniform());

void unapply(MachineState& s, const StepRecord& r);

inline constexpr uint64_t kDefaultBudget = 10'000'000;

}  // namespace pacasm::cpu
