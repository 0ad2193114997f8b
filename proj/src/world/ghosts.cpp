#include <array>
#include <limits>
#include <queue>
#include <tuple>

#include "world/world.hpp"

namespace pacasm::world {

namespace {

// Tie order shared by both chase policies.
constexpr std::array<Direction, 4> kTieOrder = {Direction::Up, Direction::Left, Direction::Down,
                                                Direction::Right};

int tie_rank(Direction d) {
  for (int i = 0; i < 4; ++i)
    if (kTieOrder[static_cast<size_t>(i)] == d) return i;
  return 4;
}

}  // namespace

Direction ghost_step_patrol(const WorldState& w, size_t ghost) {
  const Ghost& g = w.ghosts[ghost];
  const Direction d = g.dir == Direction::None ? Direction::Right : g.dir;
  if (w.passable(g.cell.moved(d))) return d;
  if (w.passable(g.cell.moved(reverse(d)))) return reverse(d);
  return Direction::None;
}

Direction ghost_step_manhattan(const WorldState& w, size_t ghost) {
  const Ghost& g = w.ghosts[ghost];
  std::vector<Direction> legal;
  for (Direction d : kTieOrder)
    if (w.passable(g.cell.moved(d))) legal.push_back(d);
  if (legal.size() > 1 && g.dir != Direction::None) std::erase(legal, reverse(g.dir));

  Direction best = Direction::None;
  int best_dist = std::numeric_limits<int>::max();
  for (Direction d : legal) {
    const int dist = manhattan(g.cell.moved(d), w.pacman);
    if (dist < best_dist) {
      best_dist = dist;
      best = d;
    }
  }
  return best;
}

std::optional<Direction> ghost_step_astar(const WorldState& w, size_t ghost) {
  const Cell start = w.ghosts[ghost].cell;
  const Cell goal = w.pacman;
  if (start == goal) return Direction::None;

  const size_t n = static_cast<size_t>(w.rows) * w.cols;
  constexpr int kUnseen = std::numeric_limits<int>::max();
  std::vector<int> g(n, kUnseen);
  std::vector<int8_t> label(n, -1);  // tie rank of the first step from start
  std::vector<uint8_t> closed(n, 0);

  // (f, g, insertion order, cell index)
  using Entry = std::tuple<int, int, uint64_t, size_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> open;
  uint64_t inserted = 0;

  g[w.index(start)] = 0;
  open.emplace(manhattan(start, goal), 0, inserted++, w.index(start));

  while (!open.empty()) {
    const auto [f, gc, order, idx] = open.top();
    open.pop();
    if (closed[idx] || gc != g[idx]) continue;
    closed[idx] = 1;
    const Cell cur{static_cast<int>(idx / static_cast<size_t>(w.cols)),
                   static_cast<int>(idx % static_cast<size_t>(w.cols))};
    if (cur == goal) return kTieOrder[static_cast<size_t>(label[idx])];

    for (Direction d : kTieOrder) {
      const Cell next = cur.moved(d);
      if (!w.passable(next)) continue;
      const size_t ni = w.index(next);
      if (closed[ni]) continue;
      const int8_t first = cur == start ? static_cast<int8_t>(tie_rank(d)) : label[idx];
      const int ng = gc + 1;
      if (ng < g[ni]) {
        g[ni] = ng;
        label[ni] = first;
        open.emplace(ng + manhattan(next, goal), ng, inserted++, ni);
      } else if (ng == g[ni] && first < label[ni]) {
        label[ni] = first;
      }
    }
  }
  return std::nullopt;
}

}  // namespace pacasm::world
