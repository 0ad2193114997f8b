#include "debug/trace.hpp"

#include <algorithm>
#include <utility>

namespace pacasm::debug {

using cpu::MemoryLayout;

std::string_view stop_reason_name(StopReason r) {
  switch (r) {
    case StopReason::Completed: return "completed";
    case StopReason::Breakpoint: return "breakpoint";
    case StopReason::Finished: return "finished";
    case StopReason::HistoryStart: return "history-start";
  }
  return "?";
}

TraceLog::TraceLog(machine::Session session, uint64_t snapshot_interval, uint64_t history_cap)
    : session_(std::move(session)),
      interval_(snapshot_interval == 0 ? 1 : snapshot_interval),
      cap_(history_cap < interval_ ? interval_ : history_cap) {
  snapshots_.emplace(0, session_.snapshot());
}

StepResult TraceLog::step_forward(uint64_t n) {
  StepResult r;
  while (r.steps < n) {
    if (session_.finished()) {
      r.reason = StopReason::Finished;
      break;
    }
    machine::StepDelta d;
    session_.step(&d);
    deltas_.push_back(std::move(d));
    ++r.steps;
    if (position() % interval_ == 0) snapshots_.emplace(position(), session_.snapshot());
    if (deltas_.size() > cap_) evict();
    if (session_.finished()) {
      r.reason = StopReason::Finished;
      break;
    }
    if (breakpoints_.count(session_.machine().pc)) {
      r.reason = StopReason::Breakpoint;
      break;
    }
  }
  r.notice = std::exchange(pending_notice_, {});
  return r;
}

StepResult TraceLog::step_backward(uint64_t n) {
  StepResult r;
  if (n > deltas_.size()) {
    r.notice = "requested " + std::to_string(n) + " steps back but only " + std::to_string(deltas_.size()) +
               " are recorded; stopped at step " + std::to_string(base_);
    r.reason = StopReason::HistoryStart;
    n = deltas_.size();
  }
  r.steps = n;
  const uint64_t target = position() - n;

  if (n <= interval_) {
    for (uint64_t i = 0; i < n; ++i) {
      session_.undo(deltas_.back());
      deltas_.pop_back();
    }
  } else {
    auto it = snapshots_.upper_bound(target);
    --it;  // a snapshot exists at base_, so one is always at or below target
    session_.restore(it->second);
    ++restores_;
    deltas_.resize(static_cast<size_t>(it->first - base_));
    while (position() < target) {
      machine::StepDelta d;
      session_.step(&d);
      deltas_.push_back(std::move(d));
    }
  }
  snapshots_.erase(snapshots_.upper_bound(position()), snapshots_.end());
  return r;
}

void TraceLog::evict() {
  for (uint64_t i = 0; i < interval_ && !deltas_.empty(); ++i) deltas_.pop_front();
  base_ += interval_;
  snapshots_.erase(snapshots_.begin(), snapshots_.lower_bound(base_));
  pending_notice_ = "history cap reached; steps before " + std::to_string(base_) + " were discarded";
}

void TraceLog::set_breakpoint(uint32_t addr, bool on) {
  if (on)
    breakpoints_.insert(addr);
  else
    breakpoints_.erase(addr);
}

std::vector<InstructionView> last_instructions(const machine::Session& s, size_t n) {
  const auto& pcs = s.recent_pcs();
  const size_t count = std::min(n, pcs.size());
  std::vector<InstructionView> out;
  out.reserve(count);
  const auto& prog = s.program();
  for (size_t i = pcs.size() - count; i < pcs.size(); ++i) {
    InstructionView v;
    v.addr = pcs[i];
    v.word = prog.word_at(v.addr);
    v.text = assembler::disassemble(v.word, v.addr, prog.symbols);
    v.line = prog.line_of(v.addr);
    out.push_back(std::move(v));
  }
  return out;
}

std::optional<std::vector<uint8_t>> read_memory(const machine::Session& s, uint32_t addr, uint32_t len) {
  if (len > 0x10000 || uint64_t{addr} + len > MemoryLayout::kMmioEnd) return std::nullopt;
  std::vector<uint8_t> out(len);
  const auto& ram = s.machine().ram;
  for (uint32_t i = 0; i < len; ++i) {
    const uint32_t a = addr + i;
    out[i] = a < MemoryLayout::kRamSize ? ram[a] : s.mmio_byte(a);
  }
  return out;
}

}  // namespace pacasm::debug
