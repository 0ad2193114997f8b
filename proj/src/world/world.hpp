#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <stdexcept>

#include "asm/diagnostic.hpp"
#include "common/hash.hpp"
#include "world/rng.hpp"

namespace pacasm::world {

// Byte values programs read from the map window.
enum class TileCode : uint8_t {
  Wall = 0,
  PacMan = 1,
  Floor = 2,
  Dot = 3,
  Ghost = 4,
  Glyph = 5,
  Gate = 6,  // locked
};

enum class Terrain : uint8_t { Wall, Floor, Gate };

enum class Direction : uint8_t { None = 0, Up = 1, Down = 2, Left = 3, Right = 4 };

// Movement register values; a byte outside 1..4 is not a command.
using MoveCommand = Direction;

Direction reverse(Direction d);
char direction_letter(Direction d);  // U D L R, '-' for None
std::string_view direction_name(Direction d);

struct Cell {
  int row = 0;
  int col = 0;

  Cell moved(Direction d) const;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

int manhattan(Cell a, Cell b);

enum class GhostPolicy : uint8_t { Patrol, RandomPatrol, ChaseManhattan, ChaseAStar };

std::string_view policy_name(GhostPolicy p);
std::optional<GhostPolicy> parse_policy(std::string_view s);

struct Ghost {
  Cell cell;
  Direction dir = Direction::None;
  GhostPolicy policy = GhostPolicy::Patrol;
  Cell spawn;

  friend bool operator==(const Ghost&, const Ghost&) = default;
};

struct GlyphQuest {
  std::vector<Direction> pattern;
  int required = 0;   // R
  int completed = 0;  // 0..R
  std::optional<Cell> active;
  int progress = 0;    // matched moves of the pattern, 0..pattern.size()
  bool armed = false;  // Pac-Man has stepped onto the active glyph

  friend bool operator==(const GlyphQuest&, const GlyphQuest&) = default;
};

enum class WinRule : uint8_t { AllDots, GateThenDots };

std::string_view win_rule_name(WinRule w);

enum class EventKind : uint8_t {
  Moved,
  Blocked,
  DotCollected,
  GlyphAdvanced,
  GlyphCompleted,
  GateOpened,
  Captured,
  Won,
  Ignored,
  AuthoringFault,
};

std::string_view event_name(EventKind k);

struct WorldEvent {
  EventKind kind = EventKind::Moved;
  Cell cell;
  int value = 0;

  friend bool operator==(const WorldEvent&, const WorldEvent&) = default;
};

struct WorldState {
  // Static layout.
  int rows = 0;
  int cols = 0;
  std::vector<Terrain> terrain;
  std::vector<uint8_t> glyph_marks;  // 'Y' cells
  bool has_glyph_marks = false;
  WinRule win = WinRule::AllDots;
  uint64_t map_seed = 0;
  int scatter_dots = 0;

  // Dynamic state.
  std::vector<uint8_t> dots;
  Cell pacman;
  std::vector<Ghost> ghosts;
  int dots_remaining = 0;
  std::optional<GlyphQuest> glyph;
  bool gates_open = false;
  SplitMix64 rng;
  bool captured = false;
  bool won = false;
  uint64_t ticks = 0;

  size_t index(Cell c) const { return static_cast<size_t>(c.row) * cols + c.col; }
  bool in_bounds(Cell c) const { return c.row >= 0 && c.row < rows && c.col >= 0 && c.col < cols; }
  Terrain terrain_at(Cell c) const { return terrain[index(c)]; }
  bool has_dot(Cell c) const { return dots[index(c)] != 0; }
  // Walls and locked gates block everyone.
  bool passable(Cell c) const;
  bool terminal() const { return captured || won; }

  TileCode tile_at(Cell c) const;
  std::vector<uint8_t> tile_matrix() const;  // row-major TileCode bytes
  std::string render() const;                // map characters, one row per line

  // Little-endian canonical bytes of every dynamic field.
  void serialize_dynamic(ByteWriter& out) const;
};

// Inverse data for one tick: the dynamic fields a tick may touch, minus the
// grid (only a single dot can change per tick).
struct WorldUndo {
  Cell pacman;
  std::vector<Ghost> ghosts;
  int dots_remaining = 0;
  std::optional<Cell> collected_dot;
  std::optional<GlyphQuest> glyph;
  bool gates_open = false;
  uint64_t rng_state = 0;
  bool captured = false;
  bool won = false;
  uint64_t ticks = 0;
};

class AuthoringError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ParseResult {
  std::optional<WorldState> world;
  std::vector<Diagnostic> diagnostics;
};

inline constexpr int kMaxCells = 4096;

// Header of `key = value` lines, a blank line, then the character grid. A
// document without a blank line is all grid.
ParseResult parse_map(std::string_view text);

// Seeds the RNG, draws the glyph repetition count, scatters random dots and
// spawns the first glyph as the header requests.
void initialize(WorldState& w, uint64_t seed);

std::vector<WorldEvent> tick(WorldState& w, uint8_t command, WorldUndo* undo = nullptr);
void undo_tick(WorldState& w, const WorldUndo& u);

void spawn_glyph(WorldState& w);          // throws AuthoringError
void scatter_dots(WorldState& w, int n);  // throws AuthoringError

Direction ghost_step_manhattan(const WorldState& w, size_t ghost);
// nullopt when Pac-Man is unreachable.
std::optional<Direction> ghost_step_astar(const WorldState& w, size_t ghost);
Direction ghost_step_patrol(const WorldState& w, size_t ghost);

bool win_satisfied(const WorldState& w);

}  // namespace pacasm::world
