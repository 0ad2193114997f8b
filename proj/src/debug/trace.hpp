#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "machine/session.hpp"

namespace pacasm::debug {

enum class StopReason : uint8_t { Completed, Breakpoint, Finished, HistoryStart };

std::string_view stop_reason_name(StopReason r);

struct StepResult {
  uint64_t steps = 0;  // instructions executed or undone
  StopReason reason = StopReason::Completed;
  std::string notice;  // clamping or eviction message, empty otherwise
};

// Owns a session together with its reversible history.
class TraceLog {
 public:
  static constexpr uint64_t kSnapshotInterval = 1024;
  static constexpr uint64_t kHistoryCap = uint64_t{1} << 20;

  explicit TraceLog(machine::Session session, uint64_t snapshot_interval = kSnapshotInterval,
                    uint64_t history_cap = kHistoryCap);

  machine::Session& session() { return session_; }
  const machine::Session& session() const { return session_; }

  // Runs up to n instructions; stops after a step that lands on a
  // breakpoint, or when the session finishes.
  StepResult step_forward(uint64_t n);
  // Rewinds n steps, clamped to the oldest retained step.
  StepResult step_backward(uint64_t n);

  void set_breakpoint(uint32_t addr, bool on);
  const std::set<uint32_t>& breakpoints() const { return breakpoints_; }

  uint64_t position() const { return base_ + deltas_.size(); }
  uint64_t history_start() const { return base_; }
  size_t snapshot_count() const { return snapshots_.size(); }
  // Number of snapshot restores performed by step_backward so far.
  uint64_t restores() const { return restores_; }

 private:
  void evict();

  machine::Session session_;
  uint64_t interval_;
  uint64_t cap_;
  std::deque<machine::StepDelta> deltas_;  // deltas_[i] is step base_ + i
  std::map<uint64_t, machine::Snapshot> snapshots_;
  uint64_t base_ = 0;
  std::set<uint32_t> breakpoints_;
  uint64_t restores_ = 0;
  std::string pending_notice_;
};

struct InstructionView {
  uint32_t addr = 0;
  uint32_t word = 0;
  std::string text;
  std::optional<int> line;
};

// Up to n most recently executed instructions, oldest first.
std::vector<InstructionView> last_instructions(const machine::Session& s, size_t n);

// Program-visible bytes; nullopt when the range leaves the address space or
// exceeds 64 KiB.
std::optional<std::vector<uint8_t>> read_memory(const machine::Session& s, uint32_t addr, uint32_t len);

}  // namespace pacasm::debug
