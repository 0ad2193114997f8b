#include "machine/session.hpp"

#include <cstdio>

#include "common/hash.hpp"

namespace pacasm::machine {

using cpu::MemoryLayout;

std::string describe(const LogEntry& e) {
  char buf[128];
  if (const auto* ev = std::get_if<world::WorldEvent>(&e.what)) {
    std::snprintf(buf, sizeof buf, "step %llu: %s at (%d,%d) value=%d",
                  static_cast<unsigned long long>(e.step), std::string(world::event_name(ev->kind)).c_str(),
                  ev->cell.row, ev->cell.col, ev->value);
  } else {
    const auto& m = std::get<MmioStore>(e.what);
    std::snprintf(buf, sizeof buf, "step %llu: store%u %s <- %s%s", static_cast<unsigned long long>(e.step),
                  static_cast<unsigned>(m.size) * 8, hex32(m.addr).c_str(), hex32(m.value).c_str(),
                  m.accepted ? "" : " (ignored)");
  }
  return buf;
}

std::string outcome_name(Outcome o, const cpu::HaltState& halt) {
  switch (o) {
    case Outcome::Running: return "running";
    case Outcome::Won: return "won";
    case Outcome::Captured: return "captured";
    case Outcome::Break: return "break";
    case Outcome::PcLeftText: return "pc-left-text";
    case Outcome::StepLimit: return "step-limit-exceeded";
    case Outcome::Fault: return "fault(" + std::string(cpu::name(halt.fault)) + ")";
  }
  return "running";
}

class Session::Hook final : public cpu::MmioHook {
 public:
  Hook(Session& s, StepDelta& d) : s_(s), d_(d) {}

  std::optional<uint32_t> on_load(uint32_t addr, unsigned size) override {
    uint32_t v = 0;
    for (unsigned i = 0; i < size; ++i) v = (v << 8) | s_.mmio_byte(addr + i);
    return v;
  }

  bool on_store(uint32_t addr, unsigned size, uint32_t value) override {
    const uint64_t step = s_.machine_.steps;
    MmioStore store{addr, static_cast<uint8_t>(size), value, addr == Mmio::kCommand};
    s_.events_.push_back({step, store});
    if (!store.accepted || s_.world_.terminal()) return store.accepted;

    const auto command = static_cast<uint8_t>(value & 0xff);
    const bool move = command >= 1 && command <= 4;
    if (move) d_.world = std::make_unique<world::WorldUndo>();
    for (const auto& ev : world::tick(s_.world_, command, d_.world.get()))
      s_.events_.push_back({step, ev});
    if (move) ++s_.moves_;
    return true;
  }

 private:
  Session& s_;
  StepDelta& d_;
};

Session::Session(assembler::Program program, std::string_view map_document, uint64_t seed)
    : program_(std::move(program)), seed_(seed) {
  auto parsed = world::parse_map(map_document);
  if (!parsed.world) throw SessionError("map", "map document has errors", std::move(parsed.diagnostics));
  world_ = std::move(*parsed.world);
  try {
    world::initialize(world_, seed);
  } catch (const world::AuthoringError& e) {
    throw SessionError("authoring", e.what());
  }
  try {
    machine_ = cpu::load_program(program_);
  } catch (const cpu::LoadError& e) {
    throw SessionError("load", e.what());
  }
}

Outcome Session::outcome() const {
  if (world_.won) return Outcome::Won;
  if (world_.captured) return Outcome::Captured;
  switch (machine_.halt.cause) {
    case cpu::HaltCause::None: return Outcome::Running;
    case cpu::HaltCause::Break: return Outcome::Break;
    case cpu::HaltCause::PcLeftText: return Outcome::PcLeftText;
    case cpu::HaltCause::StepLimit: return Outcome::StepLimit;
    case cpu::HaltCause::Fault: return Outcome::Fault;
  }
  return Outcome::Running;
}

uint8_t Session::mmio_byte(uint32_t addr) const {
  const auto word_byte = [&](uint32_t base, uint32_t v) {
    return static_cast<uint8_t>(v >> (8 * (3 - (addr - base))));
  };
  if (addr >= Mmio::kMap) {
    const uint32_t i = addr - Mmio::kMap;
    const auto cells = static_cast<uint32_t>(world_.rows * world_.cols);
    if (i >= cells) return 0;
    const world::Cell c{static_cast<int>(i / static_cast<uint32_t>(world_.cols)),
                        static_cast<int>(i % static_cast<uint32_t>(world_.cols))};
    return static_cast<uint8_t>(world_.tile_at(c));
  }
  if (addr >= Mmio::kCols) return word_byte(Mmio::kCols, static_cast<uint32_t>(world_.cols));
  if (addr >= Mmio::kRows) return word_byte(Mmio::kRows, static_cast<uint32_t>(world_.rows));
  if (addr >= Mmio::kStatus) {
    uint32_t status = 0;
    if (world_.won) status |= Mmio::kStatusWon;
    if (world_.captured) status |= Mmio::kStatusCaptured;
    if (world_.gates_open) status |= Mmio::kStatusGateOpen;
    return word_byte(Mmio::kStatus, status);
  }
  return 0;
}

void Session::step(StepDelta* delta) {
  if (finished()) return;
  StepDelta local;
  StepDelta& d = delta ? *delta : local;
  d = StepDelta{};
  d.moves_before = moves_;
  d.events_before = events_.size();
  d.last_access_before = last_access_;

  Hook hook(*this, d);
  cpu::step(machine_, hook, costs_, &d.cpu);
  if (d.cpu.access_addr) last_access_ = d.cpu.access_addr;
  if (d.cpu.executed || d.cpu.access_addr) {
    recent_pcs_.push_back(d.cpu.pc_before);
    if (recent_pcs_.size() > kRecentPcs) recent_pcs_.pop_front();
  }
}

void Session::advance(uint64_t budget) {
  for (uint64_t n = 0; !finished(); ++n) {
    if (n == budget) {
      const bool off_end = machine_.pc - MemoryLayout::kTextBase >= machine_.text_size();
      machine_.halt.cause =
          off_end && machine_.pc % 4 == 0 ? cpu::HaltCause::PcLeftText : cpu::HaltCause::StepLimit;
      return;
    }
    step();
  }
}

void Session::undo(const StepDelta& d) {
  if (d.world) world::undo_tick(world_, *d.world);
  cpu::unapply(machine_, d.cpu);
  moves_ = d.moves_before;
  events_.resize(d.events_before);
  last_access_ = d.last_access_before;
  if ((d.cpu.executed || d.cpu.access_addr) && !recent_pcs_.empty()) recent_pcs_.pop_back();
}

Snapshot Session::snapshot() const { return {machine_.serialize(), world_, moves_, events_.size()}; }

void Session::restore(const Snapshot& s) {
  machine_.deserialize(s.machine);
  world_ = s.world;
  moves_ = s.moves;
  events_.resize(s.events);
  recent_pcs_.clear();
  last_access_.reset();
}

std::vector<uint8_t> Session::serialize() const {
  ByteWriter out;
  out.u32(0x53455353);  // "SESS"
  out.u32(1);
  out.u64(seed_);
  const auto m = machine_.serialize();
  out.u32(static_cast<uint32_t>(m.size()));
  out.bytes(m);
  world_.serialize_dynamic(out);
  out.u64(moves_);
  out.u32(static_cast<uint32_t>(events_.size()));
  for (const auto& e : events_) {
    out.u64(e.step);
    if (const auto* ev = std::get_if<world::WorldEvent>(&e.what)) {
      out.u8(0);
      out.u8(static_cast<uint8_t>(ev->kind));
      out.i32(ev->cell.row);
      out.i32(ev->cell.col);
      out.i32(ev->value);
    } else {
      const auto& s = std::get<MmioStore>(e.what);
      out.u8(1);
      out.u32(s.addr);
      out.u8(s.size);
      out.u32(s.value);
      out.u8(s.accepted ? 1 : 0);
    }
  }
  return out.take();
}

uint64_t Session::digest() const { return fnv1a64(serialize()); }

}  // namespace pacasm::machine
