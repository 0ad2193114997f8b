#include "world/world.hpp"

#include <algorithm>
#include <cstdlib>

namespace pacasm::world {

Direction reverse(Direction d) {
  switch (d) {
    case Direction::Up: return Direction::Down;
    case Direction::Down: return Direction::Up;
    case Direction::Left: return Direction::Right;
    case Direction::Right: return Direction::Left;
    case Direction::None: return Direction::None;
  }
  return Direction::None;
}

char direction_letter(Direction d) {
  switch (d) {
    case Direction::Up: return 'U';
    case Direction::Down: return 'D';
    case Direction::Left: return 'L';
    case Direction::Right: return 'R';
    case Direction::None: return '-';
  }
  return '-';
}

std::string_view direction_name(Direction d) {
  switch (d) {
    case Direction::Up: return "up";
    case Direction::Down: return "down";
    case Direction::Left: return "left";
    case Direction::Right: return "right";
    case Direction::None: return "none";
  }
  return "none";
}

Cell Cell::moved(Direction d) const {
  switch (d) {
    case Direction::Up: return {row - 1, col};
    case Direction::Down: return {row + 1, col};
    case Direction::Left: return {row, col - 1};
    case Direction::Right: return {row, col + 1};
    case Direction::None: return *this;
  }
  return *this;
}

int manhattan(Cell a, Cell b) { return std::abs(a.row - b.row) + std::abs(a.col - b.col); }

std::string_view policy_name(GhostPolicy p) {
  switch (p) {
    case GhostPolicy::Patrol: return "patrol";
    case GhostPolicy::RandomPatrol: return "random-patrol";
    case GhostPolicy::ChaseManhattan: return "chase-manhattan";
    case GhostPolicy::ChaseAStar: return "chase-astar";
  }
  return "?";
}

std::optional<GhostPolicy> parse_policy(std::string_view s) {
  for (auto p : {GhostPolicy::Patrol, GhostPolicy::RandomPatrol, GhostPolicy::ChaseManhattan,
                 GhostPolicy::ChaseAStar})
    if (policy_name(p) == s) return p;
  return std::nullopt;
}

std::string_view win_rule_name(WinRule w) {
  return w == WinRule::AllDots ? "all-dots" : "gate-then-dots";
}

std::string_view event_name(EventKind k) {
  switch (k) {
    case EventKind::Moved: return "moved";
    case EventKind::Blocked: return "blocked";
    case EventKind::DotCollected: return "dot-collected";
    case EventKind::GlyphAdvanced: return "glyph-advanced";
    case EventKind::GlyphCompleted: return "glyph-completed";
    case EventKind::GateOpened: return "gate-opened";
    case EventKind::Captured: return "captured";
    case EventKind::Won: return "won";
    case EventKind::Ignored: return "ignored";
    case EventKind::AuthoringFault: return "authoring-fault";
  }
  return "?";
}

bool WorldState::passable(Cell c) const {
  if (!in_bounds(c)) return false;
  switch (terrain_at(c)) {
    case Terrain::Wall: return false;
    case Terrain::Gate: return gates_open;
    case Terrain::Floor: return true;
  }
  return false;
}

TileCode WorldState::tile_at(Cell c) const {
  if (c == pacman) return TileCode::PacMan;
  for (const auto& g : ghosts)
    if (g.cell == c) return TileCode::Ghost;
  switch (terrain_at(c)) {
    case Terrain::Wall: return TileCode::Wall;
    case Terrain::Gate:
      if (!gates_open) return TileCode::Gate;
      break;
    case Terrain::Floor: break;
  }
  if (glyph && glyph->active == c) return TileCode::Glyph;
  if (has_dot(c)) return TileCode::Dot;
  return TileCode::Floor;
}

std::vector<uint8_t> WorldState::tile_matrix() const {
  std::vector<uint8_t> out(static_cast<size_t>(rows) * cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out[index({r, c})] = static_cast<uint8_t>(tile_at({r, c}));
  return out;
}

std::string WorldState::render() const {
  static constexpr char kChars[] = {'#', 'P', ' ', '.', 'G', 'Y', '='};
  std::string s;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) s += kChars[static_cast<int>(tile_at({r, c}))];
    s += '\n';
  }
  return s;
}

void WorldState::serialize_dynamic(ByteWriter& out) const {
  out.u32(static_cast<uint32_t>(rows));
  out.u32(static_cast<uint32_t>(cols));
  out.bytes(dots);
  out.i32(pacman.row);
  out.i32(pacman.col);
  out.u32(static_cast<uint32_t>(ghosts.size()));
  for (const auto& g : ghosts) {
    out.i32(g.cell.row);
    out.i32(g.cell.col);
    out.u8(static_cast<uint8_t>(g.dir));
    out.u8(static_cast<uint8_t>(g.policy));
  }
  out.i32(dots_remaining);
  out.u8(glyph ? 1 : 0);
  if (glyph) {
    out.i32(glyph->required);
    out.i32(glyph->completed);
    out.u8(glyph->active ? 1 : 0);
    out.i32(glyph->active ? glyph->active->row : -1);
    out.i32(glyph->active ? glyph->active->col : -1);
    out.i32(glyph->progress);
    out.u8(glyph->armed ? 1 : 0);
  }
  out.u8(gates_open ? 1 : 0);
  out.u64(rng.state());
  out.u8(captured ? 1 : 0);
  out.u8(won ? 1 : 0);
  out.u64(ticks);
}

bool win_satisfied(const WorldState& w) {
  if (w.dots_remaining != 0) return false;
  return w.win == WinRule::AllDots || w.gates_open;
}

namespace {

bool is_empty_floor(const WorldState& w, Cell c) {
  if (w.terrain_at(c) != Terrain::Floor || w.has_dot(c) || c == w.pacman) return false;
  if (w.glyph && w.glyph->active == c) return false;
  return std::none_of(w.ghosts.begin(), w.ghosts.end(), [&](const Ghost& g) { return g.cell == c; });
}

}  // namespace

void scatter_dots(WorldState& w, int n) {
  if (n <= 0) return;
  std::vector<Cell> candidates;
  for (int r = 0; r < w.rows; ++r)
    for (int c = 0; c < w.cols; ++c)
      if (is_empty_floor(w, {r, c})) candidates.push_back({r, c});
  if (candidates.size() < static_cast<size_t>(n))
    throw AuthoringError("scatter.dots requests " + std::to_string(n) + " dots but only " +
                         std::to_string(candidates.size()) + " empty cells exist");
  // Partial Fisher-Yates over the row-major candidate list.
  for (size_t i = 0; i < static_cast<size_t>(n); ++i) {
    const size_t j = i + static_cast<size_t>(w.rng.uniform(candidates.size() - i));
    std::swap(candidates[i], candidates[j]);
    w.dots[w.index(candidates[i])] = 1;
  }
  w.dots_remaining += n;
}

void spawn_glyph(WorldState& w) {
  if (!w.glyph) throw AuthoringError("map has no glyph quest");
  std::vector<Cell> candidates;
  for (int r = 0; r < w.rows; ++r)
    for (int c = 0; c < w.cols; ++c) {
      const Cell cell{r, c};
      if (w.has_glyph_marks && !w.glyph_marks[w.index(cell)]) continue;
      if (!is_empty_floor(w, cell) || manhattan(cell, w.pacman) <= 1) continue;
      candidates.push_back(cell);
    }
  if (candidates.empty()) throw AuthoringError("no eligible cell for a glyph tile");
  w.glyph->active = candidates[static_cast<size_t>(w.rng.uniform(candidates.size()))];
  w.glyph->progress = 0;
  w.glyph->armed = false;
}

void initialize(WorldState& w, uint64_t seed) {
  w.rng = SplitMix64(seed);
  if (w.glyph) w.glyph->required = 2 + static_cast<int>(w.rng.uniform(3));
  scatter_dots(w, w.scatter_dots);
  if (w.glyph && !w.glyph->pattern.empty()) spawn_glyph(w);
}

namespace {

Direction ghost_move(WorldState& w, size_t i) {
  Ghost& g = w.ghosts[i];
  switch (g.policy) {
    case GhostPolicy::Patrol:
      return ghost_step_patrol(w, i);
    case GhostPolicy::RandomPatrol: {
      const Direction pick = w.rng.uniform(2) == 0 ? Direction::Left : Direction::Right;
      if (w.passable(g.cell.moved(pick))) return pick;
      if (w.passable(g.cell.moved(reverse(pick)))) return reverse(pick);
      return Direction::None;
    }
    case GhostPolicy::ChaseManhattan:
      return ghost_step_manhattan(w, i);
    case GhostPolicy::ChaseAStar:
      if (auto d = ghost_step_astar(w, i)) return *d;
      return ghost_step_patrol(w, i);
  }
  return Direction::None;
}

void advance_glyph(WorldState& w, Direction cmd, bool moved, std::vector<WorldEvent>& events) {
  if (!w.glyph || !w.glyph->active) return;
  GlyphQuest& q = *w.glyph;
  if (!q.armed) {
    if (moved && w.pacman == *q.active) {
      q.armed = true;
      q.progress = 0;
      events.push_back({EventKind::GlyphAdvanced, w.pacman, 0});
    }
    return;
  }
  if (!moved || cmd != q.pattern[static_cast<size_t>(q.progress)]) {
    q.progress = 0;
    return;
  }
  ++q.progress;
  events.push_back({EventKind::GlyphAdvanced, w.pacman, q.progress});
  if (q.progress < static_cast<int>(q.pattern.size())) return;

  ++q.completed;
  const Cell done = *q.active;
  q.active.reset();
  q.armed = false;
  q.progress = 0;
  events.push_back({EventKind::GlyphCompleted, done, q.completed});
  if (q.completed >= q.required) {
    w.gates_open = true;
    events.push_back({EventKind::GateOpened, w.pacman, 0});
    return;
  }
  try {
    spawn_glyph(w);
  } catch (const AuthoringError&) {
    events.push_back({EventKind::AuthoringFault, w.pacman, 0});
  }
}

}  // namespace

std::vector<WorldEvent> tick(WorldState& w, uint8_t command, WorldUndo* undo) {
  std::vector<WorldEvent> events;
  if (w.terminal()) return events;
  if (command < 1 || command > 4) {
    events.push_back({EventKind::Ignored, w.pacman, command});
    return events;
  }
  if (undo) {
    undo->pacman = w.pacman;
    undo->ghosts = w.ghosts;
    undo->dots_remaining = w.dots_remaining;
    undo->collected_dot.reset();
    undo->glyph = w.glyph;
    undo->gates_open = w.gates_open;
    undo->rng_state = w.rng.state();
    undo->captured = w.captured;
    undo->won = w.won;
    undo->ticks = w.ticks;
  }
  const auto cmd = static_cast<Direction>(command);

  // (1) Pac-Man.
  const Cell from = w.pacman;
  const Cell to = from.moved(cmd);
  const bool moved = w.passable(to);
  if (moved) {
    w.pacman = to;
    events.push_back({EventKind::Moved, to, command});
  } else {
    events.push_back({EventKind::Blocked, from, command});
  }

  // (2) Dots and glyph progress at the new cell.
  if (w.has_dot(w.pacman)) {
    w.dots[w.index(w.pacman)] = 0;
    --w.dots_remaining;
    if (undo) undo->collected_dot = w.pacman;
    events.push_back({EventKind::DotCollected, w.pacman, w.dots_remaining});
  }
  advance_glyph(w, cmd, moved, events);
  if (win_satisfied(w)) {
    w.won = true;
    events.push_back({EventKind::Won, w.pacman, 0});
    ++w.ticks;
    return events;
  }

  // (3) Ghosts, in index order.
  std::vector<Cell> before;
  before.reserve(w.ghosts.size());
  for (size_t i = 0; i < w.ghosts.size(); ++i) {
    before.push_back(w.ghosts[i].cell);
    const Direction d = ghost_move(w, i);
    if (d != Direction::None) {
      w.ghosts[i].cell = w.ghosts[i].cell.moved(d);
      w.ghosts[i].dir = d;
    }
  }

  // (4) Capture: same cell, or the two swapped cells this tick.
  for (size_t i = 0; i < w.ghosts.size(); ++i) {
    const bool same = w.ghosts[i].cell == w.pacman;
    const bool swapped = moved && before[i] == to && w.ghosts[i].cell == from;
    if (same || swapped) {
      w.captured = true;
      events.push_back({EventKind::Captured, w.pacman, static_cast<int>(i)});
      break;
    }
  }

  // (5)
  ++w.ticks;
  return events;
}

void undo_tick(WorldState& w, const WorldUndo& u) {
  if (u.collected_dot) w.dots[w.index(*u.collected_dot)] = 1;
  w.pacman = u.pacman;
  w.ghosts = u.ghosts;
  w.dots_remaining = u.dots_remaining;
  w.glyph = u.glyph;
  w.gates_open = u.gates_open;
  w.rng.set_state(u.rng_state);
  w.captured = u.captured;
  w.won = u.won;
  w.ticks = u.ticks;
}

}  // namespace pacasm::world
