#pragma once

#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "asm/assembler.hpp"
#include "cpu/emulator.hpp"
#include "world/world.hpp"

namespace pacasm::machine {

// Register map of the MMIO window.
struct Mmio {
  static constexpr uint32_t kCommand = 0x30000;
  static constexpr uint32_t kStatus = 0x30004;
  static constexpr uint32_t kRows = 0x30008;
  static constexpr uint32_t kCols = 0x3000C;
  static constexpr uint32_t kMap = 0x30010;

  static constexpr uint32_t kStatusWon = 1u << 0;
  static constexpr uint32_t kStatusCaptured = 1u << 1;
  static constexpr uint32_t kStatusGateOpen = 1u << 2;
};

// A store into the MMIO window. Loads are not logged.
struct MmioStore {
  uint32_t addr = 0;
  uint8_t size = 0;
  uint32_t value = 0;
  bool accepted = false;  // false for stores to read-only or unmapped addresses

  friend bool operator==(const MmioStore&, const MmioStore&) = default;
};

struct LogEntry {
  uint64_t step = 0;  // machine step count when the entry was produced
  std::variant<world::WorldEvent, MmioStore> what;

  friend bool operator==(const LogEntry&, const LogEntry&) = default;
};

std::string describe(const LogEntry& e);

enum class Outcome : uint8_t { Running, Won, Captured, Break, PcLeftText, StepLimit, Fault };

// "won", "captured", "break", "pc-left-text", "step-limit-exceeded",
// "fault(<kind>)", "running".
std::string outcome_name(Outcome o, const cpu::HaltState& halt);

// Everything one session step changed.
struct StepDelta {
  cpu::StepRecord cpu;
  std::unique_ptr<world::WorldUndo> world;  // set when the step ticked the world
  uint64_t moves_before = 0;
  size_t events_before = 0;
  std::optional<uint32_t> last_access_before;
};

// Read-only state for a fast restore: machine bytes plus a world copy.
struct Snapshot {
  std::vector<uint8_t> machine;
  world::WorldState world;
  uint64_t moves = 0;
  size_t events = 0;
};

class SessionError : public std::runtime_error {
 public:
  SessionError(std::string code, const std::string& msg, std::vector<Diagnostic> diags = {})
      : std::runtime_error(msg), code_(std::move(code)), diags_(std::move(diags)) {}
  const std::string& code() const { return code_; }
  const std::vector<Diagnostic>& diagnostics() const { return diags_; }

 private:
  std::string code_;
  std::vector<Diagnostic> diags_;
};

class Session {
 public:
  static constexpr size_t kRecentPcs = 64;

  // Throws SessionError: code "map" (with diagnostics), "load" or "authoring".
  Session(assembler::Program program, std::string_view map_document, uint64_t seed);

  const assembler::Program& program() const { return program_; }
  const cpu::MachineState& machine() const { return machine_; }
  const world::WorldState& world() const { return world_; }
  uint64_t seed() const { return seed_; }
  uint64_t moves() const { return moves_; }
  const std::vector<LogEntry>& events() const { return events_; }

  bool finished() const { return machine_.halt.halted() || world_.terminal(); }
  Outcome outcome() const;
  std::string outcome_text() const { return outcome_name(outcome(), machine_.halt); }

  // Executes one instruction unless finished.
  void step(StepDelta* delta = nullptr);
  // Steps until finished; after `budget` steps the machine halts with
  // step-limit (or pc-left-text when pc already ran off the text).
  void advance(uint64_t budget = cpu::kDefaultBudget);

  void undo(const StepDelta& delta);
  Snapshot snapshot() const;
  void restore(const Snapshot& s);

  // Canonical serialization: machine state, world dynamic state, move count
  // and event log; little-endian throughout.
  std::vector<uint8_t> serialize() const;
  uint64_t digest() const;

  // Most recent executed pcs, oldest first; not part of the digest.
  const std::deque<uint32_t>& recent_pcs() const { return recent_pcs_; }
  std::optional<uint32_t> last_access() const { return last_access_; }

  // Program-visible byte of the MMIO window.
  uint8_t mmio_byte(uint32_t addr) const;

  void set_costs(const cpu::CostTable& costs) { costs_ = costs; }

 private:
  class Hook;

  assembler::Program program_;
  cpu::MachineState machine_;
  world::WorldState world_;
  uint64_t seed_ = 0;
  uint64_t moves_ = 0;
  std::vector<LogEntry> events_;
  std::deque<uint32_t> recent_pcs_;
  std::optional<uint32_t> last_access_;
  cpu::CostTable costs_;
};

}  // namespace pacasm::machine
