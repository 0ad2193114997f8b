#include "support/oracles.hpp"

#include <algorithm>
#include <deque>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "common/hash.hpp"
#include "debug/trace.hpp"
#include "grade/leaderboard.hpp"
#include "machine/session.hpp"

namespace oracle {

using pacasm::assembler::Operand;
using pacasm::assembler::Program;
using pacasm::assembler::Section;
using pacasm::assembler::Statement;
using pacasm::assembler::StatementKind;
using pacasm::world::Cell;
using pacasm::world::Direction;
using pacasm::world::WorldState;

namespace {

constexpr uint32_t kMmio = 0x30000;

int32_t sx16(int64_t v) { return static_cast<int16_t>(static_cast<uint16_t>(v)); }

}  // namespace

unsigned expansion_words(const Statement& st) {
  if (st.kind == StatementKind::Instruction) return 1;
  const std::string& m = st.mnemonic;
  if (m == "li" || m == "la") return 2;
  if (m == "move" || m == "nop" || m == "b") return 1;
  if (st.operands.size() == 3 && st.operands[1].kind == Operand::Kind::Register) return 2;
  return (m == "blt" || m == "bge") ? 2 : 3;
}

Interpreter::Interpreter(const Program& p) : p_(p) {
  for (size_t i = 0; i < p.statements.size(); ++i) {
    const Statement& st = p.statements[i];
    if ((st.kind == StatementKind::Instruction || st.kind == StatementKind::Pseudo) && st.section == Section::Text)
      at_[st.address] = i;
  }
  for (size_t i = 0; i < p.data.size(); ++i) mem_[0x10000 + static_cast<uint32_t>(i)] = p.data[i];
  regs[29] = 0x2fff0;
}

uint32_t Interpreter::load(uint32_t addr, unsigned size) {
  if (addr >= kMmio) return load_ ? load_(addr, size) : 0;
  uint32_t v = 0;
  for (unsigned i = 0; i < size; ++i) {
    uint8_t b = 0;
    if (addr + i < 0x10000) {
      b = static_cast<uint8_t>(p_.word_at((addr + i) & ~3u) >> (8 * (3 - ((addr + i) & 3))));
    } else if (auto it = mem_.find(addr + i); it != mem_.end()) {
      b = it->second;
    }
    v = (v << 8) | b;
  }
  return v;
}

bool Interpreter::store(uint32_t addr, unsigned size, uint32_t value) {
  if (addr >= kMmio) return store_ ? store_(addr, size, value) : false;
  for (unsigned i = 0; i < size; ++i) mem_[addr + i] = static_cast<uint8_t>(value >> (8 * (size - 1 - i)));
  return false;
}

void Interpreter::run(uint64_t max_statements) {
  uint32_t pc = p_.entry;
  for (uint64_t n = 0; n < max_statements; ++n) {
    auto it = at_.find(pc);
    if (it == at_.end()) return;
    const Statement& st = p_.statements[it->second];
    const auto& o = st.operands;
    const std::string& m = st.mnemonic;
    const auto R = [&](size_t i) { return regs[o[i].reg]; };
    const auto target = [&](const Operand& op) -> uint32_t {
      if (op.kind == Operand::Kind::Symbol) return p_.symbols.find(op.text)->second.address;
      return static_cast<uint32_t>(op.value);
    };
    const auto ea = [&](const Operand& op) { return regs[op.reg] + static_cast<uint32_t>(sx16(op.value)); };

    cycles += expansion_words(st);
    uint32_t next = st.address + st.size;

    if (m == "break") {
      hit_break = true;
      return;
    }
    if (m == "add" || m == "addu") set(o[0].reg, R(1) + R(2));
    else if (m == "sub" || m == "subu") set(o[0].reg, R(1) - R(2));
    else if (m == "and") set(o[0].reg, R(1) & R(2));
    else if (m == "or") set(o[0].reg, R(1) | R(2));
    else if (m == "xor") set(o[0].reg, R(1) ^ R(2));
    else if (m == "nor") set(o[0].reg, ~(R(1) | R(2)));
    else if (m == "slt") set(o[0].reg, static_cast<int32_t>(R(1)) < static_cast<int32_t>(R(2)));
    else if (m == "sltu") set(o[0].reg, R(1) < R(2));
    else if (m == "mul")
      set(o[0].reg, static_cast<uint32_t>(static_cast<int64_t>(static_cast<int32_t>(R(1))) *
                                          static_cast<int32_t>(R(2))));
    else if (m == "sll") set(o[0].reg, R(1) << (o[2].value & 31));
    else if (m == "srl") set(o[0].reg, R(1) >> (o[2].value & 31));
    else if (m == "sra") set(o[0].reg, static_cast<uint32_t>(static_cast<int32_t>(R(1)) >> (o[2].value & 31)));
    else if (m == "sllv") set(o[0].reg, R(1) << (R(2) & 31));
    else if (m == "srlv") set(o[0].reg, R(1) >> (R(2) & 31));
    else if (m == "addi" || m == "addiu") set(o[0].reg, R(1) + static_cast<uint32_t>(sx16(o[2].value)));
    else if (m == "slti") set(o[0].reg, static_cast<int32_t>(R(1)) < sx16(o[2].value));
    else if (m == "sltiu") set(o[0].reg, R(1) < static_cast<uint32_t>(sx16(o[2].value)));
    else if (m == "andi") set(o[0].reg, R(1) & static_cast<uint32_t>(o[2].value & 0xffff));
    else if (m == "ori") set(o[0].reg, R(1) | static_cast<uint32_t>(o[2].value & 0xffff));
    else if (m == "xori") set(o[0].reg, R(1) ^ static_cast<uint32_t>(o[2].value & 0xffff));
    else if (m == "lui") set(o[0].reg, static_cast<uint32_t>(o[1].value & 0xffff) << 16);
    else if (m == "lw") set(o[0].reg, load(ea(o[1]), 4));
    else if (m == "lb") set(o[0].reg, static_cast<uint32_t>(static_cast<int8_t>(load(ea(o[1]), 1))));
    else if (m == "lbu") set(o[0].reg, load(ea(o[1]), 1));
    else if (m == "sw" || m == "sb") {
      const unsigned size = m == "sw" ? 4 : 1;
      const uint32_t v = size == 4 ? R(0) : (R(0) & 0xff);
      if (store(ea(o[1]), size, v)) {
        stopped_by_hook = true;
        return;
      }
    } else if (m == "beq" || m == "bne") {
      if ((R(0) == R(1)) == (m == "beq")) next = target(o[2]);
    } else if (m == "j") next = target(o[0]);
    else if (m == "jal") {
      set(31, st.address + 4);
      next = target(o[0]);
    } else if (m == "jr") next = R(0);
    else if (m == "jalr") {
      const uint32_t dest = R(1);
      set(o[0].reg, st.address + 4);
      next = dest;
    } else if (m == "li" || m == "la") {
      const uint32_t v = m == "li" ? static_cast<uint32_t>(o[1].value) : target(o[1]);
      regs[1] = v & 0xffff0000u;
      set(o[0].reg, v);
    } else if (m == "move") set(o[0].reg, R(1));
    else if (m == "nop") {
    } else if (m == "b") next = target(o[0]);
    else if (m == "blt" || m == "bgt" || m == "ble" || m == "bge") {
      const int32_t a = static_cast<int32_t>(R(0));
      const bool reg = o[1].kind == Operand::Kind::Register;
      const int32_t b = reg ? static_cast<int32_t>(R(1)) : static_cast<int32_t>(o[1].value);
      bool lt = false;  // the value left in $at
      if (m == "blt" || m == "bge") lt = a < b;
      else lt = b < a;
      regs[1] = lt ? 1 : 0;
      const bool take = (m == "blt" || m == "bgt") ? lt : !lt;
      if (take) next = target(o[2]);
    } else {
      throw std::logic_error("interpreter: unhandled mnemonic " + m);
    }
    pc = next;
  }
}

std::string random_straight_line(std::mt19937_64& rng, int statements) {
  static const char* kRegs[] = {"$zero", "$v0", "$v1", "$a0", "$a1", "$a2", "$a3", "$t0", "$t1", "$t2",
                                "$t3",   "$t4", "$t5", "$t6", "$t7", "$s0", "$s1", "$s2", "$s3", "$s4",
                                "$s5",   "$s6", "$t8", "$t9", "$k0", "$k1", "$gp", "$sp", "$fp", "$ra"};
  static const char* kR3[] = {"add", "addu", "sub", "subu", "and", "or", "xor", "nor", "slt", "sltu", "mul"};
  static const char* kShift[] = {"sll", "srl", "sra"};
  static const char* kShiftV[] = {"sllv", "srlv"};
  static const char* kArith[] = {"addi", "addiu", "slti", "sltiu"};
  static const char* kLogic[] = {"andi", "ori", "xori"};
  const auto pick = [&](auto& arr) { return arr[rng() % std::size(arr)]; };
  const auto reg = [&] { return std::string(pick(kRegs)); };
  const auto simm = [&] { return static_cast<int>(rng() % 65536) - 32768; };

  std::ostringstream out;
  out << "        .data\nbuf:    .space 256\n        .text\nmain:\n    la $s7, buf\n";
  // Seed a few registers so the arithmetic sees varied values.
  for (int i = 0; i < 6; ++i) out << "    li " << reg() << ", " << static_cast<int32_t>(rng()) << "\n";
  for (int i = 0; i < statements; ++i) {
    switch (rng() % 12) {
      case 0:
      case 1:
      case 2: out << "    " << pick(kR3) << " " << reg() << ", " << reg() << ", " << reg() << "\n"; break;
      case 3: out << "    " << pick(kShift) << " " << reg() << ", " << reg() << ", " << rng() % 32 << "\n"; break;
      case 4: out << "    " << pick(kShiftV) << " " << reg() << ", " << reg() << ", " << reg() << "\n"; break;
      case 5: out << "    " << pick(kArith) << " " << reg() << ", " << reg() << ", " << simm() << "\n"; break;
      case 6: out << "    " << pick(kLogic) << " " << reg() << ", " << reg() << ", " << rng() % 65536 << "\n"; break;
      case 7:
        if (rng() % 2) out << "    lui " << reg() << ", " << rng() % 65536 << "\n";
        else out << "    li " << reg() << ", " << static_cast<int64_t>(static_cast<uint32_t>(rng())) << "\n";
        break;
      case 8:
        if (rng() % 3) out << "    move " << reg() << ", " << reg() << "\n";
        else out << "    nop\n";
        break;
      case 9: out << "    sw " << reg() << ", " << 4 * (rng() % 64) << "($s7)\n"; break;
      case 10: out << "    lw " << reg() << ", " << 4 * (rng() % 64) << "($s7)\n"; break;
      default: {
        static const char* kByte[] = {"lb", "lbu", "sb"};
        out << "    " << pick(kByte) << " " << reg() << ", " << rng() % 256 << "($s7)\n";
      }
    }
  }
  out << "    break\n";
  return out.str();
}

namespace {

constexpr std::array<Direction, 4> kOrder = {Direction::Up, Direction::Left, Direction::Down, Direction::Right};

Cell step(Cell c, Direction d) {
  switch (d) {
    case Direction::Up: return {c.row - 1, c.col};
    case Direction::Down: return {c.row + 1, c.col};
    case Direction::Left: return {c.row, c.col - 1};
    case Direction::Right: return {c.row, c.col + 1};
    default: return c;
  }
}

Direction opposite(Direction d) {
  switch (d) {
    case Direction::Up: return Direction::Down;
    case Direction::Down: return Direction::Up;
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
    default: return Direction::None;
  }
}

bool open(const WorldState& w, Cell c) {
  if (!w.in_bounds(c)) return false;
  const auto t = w.terrain_at(c);
  return t == pacasm::world::Terrain::Floor || (t == pacasm::world::Terrain::Gate && w.gates_open);
}

}  // namespace

Direction manhattan_brute_force(const WorldState& w, size_t ghost) {
  const auto& g = w.ghosts[ghost];
  struct Option {
    int dist;
    int rank;
    Direction d;
  };
  std::vector<Option> all;
  for (int rank = 0; rank < 4; ++rank) {
    const Direction d = kOrder[static_cast<size_t>(rank)];
    const Cell n = step(g.cell, d);
    if (!open(w, n)) continue;
    all.push_back({std::abs(n.row - w.pacman.row) + std::abs(n.col - w.pacman.col), rank, d});
  }
  if (all.size() > 1)
    all.erase(std::remove_if(all.begin(), all.end(), [&](const Option& o) { return o.d == opposite(g.dir); }),
              all.end());
  if (all.empty()) return Direction::None;
  return std::min_element(all.begin(), all.end(),
                          [](const Option& a, const Option& b) {
                            return std::tie(a.dist, a.rank) < std::tie(b.dist, b.rank);
                          })
      ->d;
}

std::optional<Direction> bfs_first_step(const WorldState& w, size_t ghost) {
  const Cell start = w.ghosts[ghost].cell;
  if (start == w.pacman) return Direction::None;
  std::vector<int> dist(static_cast<size_t>(w.rows * w.cols), -1);
  std::deque<Cell> q{w.pacman};
  dist[w.index(w.pacman)] = 0;
  while (!q.empty()) {
    const Cell c = q.front();
    q.pop_front();
    for (Direction d : kOrder) {
      const Cell n = step(c, d);
      if (!open(w, n) || dist[w.index(n)] >= 0) continue;
      dist[w.index(n)] = dist[w.index(c)] + 1;
      q.push_back(n);
    }
  }
  if (dist[w.index(start)] < 0) return std::nullopt;
  for (Direction d : kOrder) {
    const Cell n = step(start, d);
    if (open(w, n) && dist[w.index(n)] == dist[w.index(start)] - 1) return d;
  }
  return std::nullopt;
}

std::string random_maze(std::mt19937_64& rng, int rows, int cols, double wall_density, const std::string& policy) {
  std::vector<std::string> grid(static_cast<size_t>(rows), std::string(static_cast<size_t>(cols), ' '));
  std::uniform_real_distribution<double> u(0, 1);
  std::vector<std::pair<int, int>> floor;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const bool border = r == 0 || c == 0 || r == rows - 1 || c == cols - 1;
      if (border || u(rng) < wall_density) grid[static_cast<size_t>(r)][static_cast<size_t>(c)] = '#';
      else floor.emplace_back(r, c);
    }
  std::shuffle(floor.begin(), floor.end(), rng);
  grid[static_cast<size_t>(floor[0].first)][static_cast<size_t>(floor[0].second)] = 'P';
  grid[static_cast<size_t>(floor[1].first)][static_cast<size_t>(floor[1].second)] = 'G';
  std::ostringstream out;
  static const char* kDirs[] = {"U", "D", "L", "R"};
  out << "ghost.0.policy = " << policy << "\nghost.0.dir = " << kDirs[rng() % 4] << "\n\n";
  for (const auto& row : grid) out << row << "\n";
  return out.str();
}

std::string random_open_map(std::mt19937_64& rng, int rows, int cols, int ghosts) {
  std::vector<std::string> grid(static_cast<size_t>(rows), std::string(static_cast<size_t>(cols), ' '));
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      if (r == 0 || c == 0 || r == rows - 1 || c == cols - 1) grid[static_cast<size_t>(r)][static_cast<size_t>(c)] = '#';
  std::vector<std::pair<int, int>> cells;
  for (int r = 1; r < rows - 1; ++r)
    for (int c = 1; c < cols - 1; ++c) cells.emplace_back(r, c);
  std::shuffle(cells.begin(), cells.end(), rng);
  grid[static_cast<size_t>(cells[0].first)][static_cast<size_t>(cells[0].second)] = 'P';
  for (int g = 0; g < ghosts; ++g)
    grid[static_cast<size_t>(cells[static_cast<size_t>(g + 1)].first)]
        [static_cast<size_t>(cells[static_cast<size_t>(g + 1)].second)] = 'G';
  // A few dots so the map is not trivially won.
  for (size_t i = static_cast<size_t>(ghosts) + 1; i < std::min(cells.size(), static_cast<size_t>(ghosts) + 6); ++i)
    grid[static_cast<size_t>(cells[i].first)][static_cast<size_t>(cells[i].second)] = '.';
  std::ostringstream out;
  for (int g = 0; g < ghosts; ++g) out << "ghost." << g << ".policy = " << (g % 2 ? "random-patrol" : "patrol") << "\n";
  out << "\n";
  for (const auto& row : grid) out << row << "\n";
  return out.str();
}

int patrol_column(int first, int length, int start, uint64_t t) {
  if (length < 2) return start;
  const uint64_t period = 2 * static_cast<uint64_t>(length - 1);
  // Unfold the ping-pong onto a circle of `period` positions.
  const uint64_t phase = (static_cast<uint64_t>(start - first) + t) % period;
  const int offset = phase < static_cast<uint64_t>(length) ? static_cast<int>(phase) : static_cast<int>(period - phase);
  return first + offset;
}

}  // namespace oracle

namespace oracle {

std::string mmio_contract_trial(std::mt19937_64& rng, int commands, int* checked) {
  using namespace pacasm;
  using machine::Mmio;
  const std::string doc = random_open_map(rng, 5 + static_cast<int>(rng() % 4), 6 + static_cast<int>(rng() % 5),
                                          static_cast<int>(rng() % 3));
  const uint64_t seed = rng();
  auto parsed = world::parse_map(doc);
  if (!parsed.world) return "generated map rejected";
  world::WorldState ref = std::move(*parsed.world);
  world::initialize(ref, seed);
  const auto cells = static_cast<uint32_t>(ref.rows * ref.cols);

  std::vector<uint8_t> cmds;
  std::vector<uint32_t> probes;
  std::string src = ".data\nbuf: .space " + std::to_string(8 * commands + 8) +
                    "\n.text\nmain: li $s0, 0x30000\n la $s7, buf\n"
                    " lw $t3, 8($s0)\n sw $t3, 0($s7)\n lw $t4, 12($s0)\n sw $t4, 4($s7)\n";
  for (int k = 0; k < commands; ++k) {
    const auto c = static_cast<uint8_t>(rng() % 7);  // 0, 5 and 6 are not moves
    const auto probe = static_cast<uint32_t>(rng() % cells);
    cmds.push_back(c);
    probes.push_back(probe);
    const int word = 8 + 4 * k;
    const int byte = 8 + 4 * commands + k;
    src += " li $t0, " + std::to_string(c) + "\n sb $t0, 0($s0)\n";
    src += " lbu $t1, " + std::to_string(0x10 + probe) + "($s0)\n sb $t1, " + std::to_string(byte) + "($s7)\n";
    src += " lw $t2, 4($s0)\n sw $t2, " + std::to_string(word) + "($s7)\n";
  }
  src += " break\n";

  auto built = assembler::build(assembler::SourceUnit::from_text(src));
  if (!built.ok()) return "generated program rejected";
  machine::Session s(std::move(*built.program), doc, seed);

  std::vector<uint8_t> want_probe;
  std::vector<uint32_t> want_status;
  size_t seen = 0;
  size_t k = 0;
  while (!s.finished()) {
    s.step();
    const auto& log = s.events();
    for (; seen < log.size(); ++seen) {
      const auto* st = std::get_if<machine::MmioStore>(&log[seen].what);
      if (!st) continue;
      if (st->addr != Mmio::kCommand || !st->accepted) return "command store not accepted";
      if (k >= cmds.size() || st->value != cmds[k]) return "command out of order";
      world::tick(ref, cmds[k]);
      pacasm::ByteWriter a, b;
      ref.serialize_dynamic(a);
      s.world().serialize_dynamic(b);
      if (a.data() != b.data()) return "world diverged after command " + std::to_string(k);
      const auto tiles = ref.tile_matrix();
      for (uint32_t i = 0; i < cells; ++i)
        if (s.mmio_byte(Mmio::kMap + i) != tiles[i]) return "map window differs at byte " + std::to_string(i);
      want_probe.push_back(tiles[probes[k]]);
      uint32_t status = 0;
      if (ref.won) status |= Mmio::kStatusWon;
      if (ref.captured) status |= Mmio::kStatusCaptured;
      if (ref.gates_open) status |= Mmio::kStatusGateOpen;
      want_status.push_back(status);
      ++k;
    }
  }
  // A capture or win ends the session right after the store, so that
  // command's probe and status are never copied.
  if (checked) *checked = static_cast<int>(k);
  size_t copied = k;
  if (s.world().terminal()) {
    if (s.machine().halt.halted()) return "machine halted after the world ended";
    copied = k - 1;
  } else {
    if (s.machine().halt.cause != cpu::HaltCause::Break) return "program did not reach break";
    if (k != cmds.size()) return "missing command stores";
  }

  const auto mem = debug::read_memory(s, cpu::MemoryLayout::kDataBase, static_cast<uint32_t>(8 * commands + 8));
  if (!mem) return "buffer unreadable";
  const auto be32 = [&](size_t off) {
    return (uint32_t{(*mem)[off]} << 24) | (uint32_t{(*mem)[off + 1]} << 16) | (uint32_t{(*mem)[off + 2]} << 8) |
           (*mem)[off + 3];
  };
  if (be32(0) != static_cast<uint32_t>(ref.rows) || be32(4) != static_cast<uint32_t>(ref.cols))
    return "rows/cols registers wrong";
  for (size_t i = 0; i < copied; ++i) {
    if (be32(8 + 4 * i) != want_status[i]) return "status word wrong after command " + std::to_string(i);
    if ((*mem)[8 + 4 * static_cast<size_t>(commands) + i] != want_probe[i])
      return "map byte wrong after command " + std::to_string(i);
  }
  return {};
}

}  // namespace oracle

namespace oracle {

std::string time_travel_trial(std::mt19937_64& rng, bool long_jump) {
  using namespace pacasm;
  static const char* kShort[] = {"stage2", "stage3", "stage4", "optional", "stage5"};
  const std::string id = long_jump ? "stage5" : kShort[rng() % 5];
  const std::string dir = std::string(PACASM_STAGES) + "/" + id + "/";
  std::ifstream src_in(dir + "reference.s"), map_in(dir + "map.txt");
  std::stringstream src, map;
  src << src_in.rdbuf();
  map << map_in.rdbuf();
  auto built = assembler::build(assembler::SourceUnit::from_text(src.str()));
  if (!built.ok()) return id + " reference rejected";
  const uint64_t seed = rng() % 5;

  // Digest at every position from a plain forward run.
  std::vector<uint64_t> digests;
  {
    machine::Session s(*built.program, map.str(), seed);
    digests.push_back(s.digest());
    while (!s.finished()) {
      s.step();
      digests.push_back(s.digest());
    }
  }
  const uint64_t total = digests.size() - 1;
  uint64_t k = 0, j = 0;
  if (long_jump) {
    if (total < 1100) return id + " run too short for a long jump";
    k = 1025 + rng() % std::min<uint64_t>(total - 1025, 3000);
    j = rng() % (total - k + 1);
  } else {
    k = 1 + rng() % std::min<uint64_t>(total, 1024);
    j = rng() % (total - k + 1);
  }

  debug::TraceLog t(machine::Session(std::move(*built.program), map.str(), seed));
  t.step_forward(j);
  if (t.session().digest() != digests[j]) return "forward run diverged at " + std::to_string(j);
  t.step_forward(k);
  if (t.session().digest() != digests[j + k]) return "forward run diverged at " + std::to_string(j + k);
  const uint64_t restores = t.restores();
  const auto back = t.step_backward(k);
  if (back.steps != k || t.position() != j) return "backward step count wrong";
  if (t.session().digest() != digests[j])
    return id + ": back(" + std::to_string(k) + ") from " + std::to_string(j + k) + " differs";
  if (k > debug::TraceLog::kSnapshotInterval && t.restores() == restores) return "long rewind without a restore";
  t.step_forward(k);
  if (t.session().digest() != digests[j + k]) return id + ": forward after back differs";
  return {};
}

}  // namespace oracle

namespace oracle {

std::string leaderboard_trial(std::mt19937_64& rng, const std::string& path, int submissions) {
  using namespace pacasm::grade;
  std::filesystem::remove(path);
  Leaderboard board(path);
  const int students = 1 + static_cast<int>(rng() % 8);
  const std::string stages[] = {"stage1", "stage2"};

  struct Best {
    uint64_t cycles;
    int64_t ts;
  };
  std::map<std::string, std::map<std::string, Best>> best;  // stage -> student -> best
  // Strictly better: fewer cycles, then earlier timestamp, then smaller id.
  const auto better = [](const std::string& sa, const Best& a, const std::string& sb, const Best& b) {
    if (a.cycles != b.cycles) return a.cycles < b.cycles;
    if (a.ts != b.ts) return a.ts < b.ts;
    return sa < sb;
  };

  for (int i = 0; i < submissions; ++i) {
    GradeReport r;
    r.stage = stages[rng() % 2];
    r.status = Status::Accepted;
    r.cycles = 10 + rng() % 6;  // narrow range forces ties
    r.timestamp_ms = static_cast<int64_t>(rng() % 5);
    const std::string student = "s" + std::to_string(rng() % static_cast<uint64_t>(students));
    const uint32_t rank = board.submit(r, student);

    auto& table = best[r.stage];
    const Best mine{*r.cycles, r.timestamp_ms};
    auto it = table.find(student);
    if (it == table.end() || better(student, mine, student, it->second)) table[student] = mine;
    uint32_t expected = 1;
    for (const auto& [other, b] : table)
      if (other != student && better(other, b, student, table[student])) ++expected;
    if (rank != expected)
      return "rank " + std::to_string(rank) + " != " + std::to_string(expected) + " at submission " +
             std::to_string(i);
  }
  for (const auto& stage : stages) {
    const auto got = board.standings(stage);
    const auto& table = best[stage];
    if (got.size() != table.size()) return "standings size differs for " + stage;
    for (size_t i = 0; i < got.size(); ++i) {
      const auto it = table.find(got[i].student);
      if (it == table.end() || it->second.cycles != got[i].cycles || it->second.ts != got[i].timestamp_ms)
        return "standings entry differs for " + got[i].student;
      if (i > 0 && !better(got[i - 1].student, table.at(got[i - 1].student), got[i].student, it->second))
        return "standings out of order at " + std::to_string(i);
    }
  }
  return {};
}

}  // namespace oracle

namespace oracle {

const std::vector<AdversarialCase>& adversarial_suite() {
  static const std::vector<AdversarialCase> cases = {
      {"empty program", "stage1", "", "assemble-error", "assembler-diagnostics"},
      {"syntax error", "stage1", "main: addi $t0, $t0\n", "assemble-error", "assembler-diagnostics"},
      {"no MMIO", "stage1", "main: addi $t0, $zero, 4\n break\n", "runtime-failure", "no-movement-commands"},
      {"illegal command only", "stage1", "main: li $t1, 0x30000\n li $t0, 7\n sw $t0, 0($t1)\n break\n",
       "runtime-failure", "no-movement-commands"},
      {"wall-banger", "stage1",
       "main: li $t1, 0x30000\n li $t0, 1\n sw $t0, 0($t1)\n sw $t0, 0($t1)\n break\n", "runtime-failure",
       "stopped-prematurely"},
      {"ghost-walker", "stage4",
       "main: li $t1, 0x30000\n li $t0, 4\n sw $t0, 0($t1)\n li $t0, 2\n"
       " sw $t0, 0($t1)\n sw $t0, 0($t1)\n sw $t0, 0($t1)\n sw $t0, 0($t1)\n break\n",
       "runtime-failure", "captured-by-ghost"},
      {"infinite loop", "stage1", "main: j main\n", "runtime-failure", "step-limit-exceeded"},
      {"unaligned access", "stage1", "main: li $t0, 0x10002\n lw $t1, 0($t0)\n break\n", "runtime-failure",
       "fault(unaligned)"},
  };
  return cases;
}

}  // namespace oracle

namespace oracle {

const char* const kGhostWalkerSource =
    "# walk straight down through the patrol row\n"
    "main: li $t1, 0x30000\n"
    " li $t0, 4\n"
    " sw $t0, 0($t1)\n"
    " li $t0, 2\n"
    " sw $t0, 0($t1)\n"
    " sw $t0, 0($t1)\n"
    " sw $t0, 0($t1)\n"
    " sw $t0, 0($t1)\n"
    " break\n";

const char* const kTypoSource =
    "main: li $t1, 0x30000\n"
    " li $t0, 4\n"
    " sw $t0, 0(t1)\n"
    " j done\n";

}  // namespace oracle
