#include <charconv>
#include <map>

#include "common/text.hpp"
#include "world/world.hpp"

namespace pacasm::world {

namespace {

struct GhostHeader {
  std::optional<GhostPolicy> policy;
  std::optional<Direction> dir;
  int line = 0;
};

std::optional<Direction> parse_direction(std::string_view s) {
  const std::string v = text::to_lower(s);
  if (v == "u" || v == "up") return Direction::Up;
  if (v == "d" || v == "down") return Direction::Down;
  if (v == "l" || v == "left") return Direction::Left;
  if (v == "r" || v == "right") return Direction::Right;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view text) : lines_(text::split_lines(text)) {}

  ParseResult run() {
    size_t grid_begin = 0;
    for (size_t i = 0; i < lines_.size(); ++i) {
      if (text::trim(lines_[i]).empty()) {
        for (size_t h = 0; h < i; ++h) header_line(h);
        grid_begin = i + 1;
        break;
      }
    }
    size_t grid_end = lines_.size();
    while (grid_end > grid_begin && text::trim(lines_[grid_end - 1]).empty()) --grid_end;
    grid(grid_begin, grid_end);

    ParseResult result;
    if (!has_errors(diags_)) result.world = std::move(w_);
    result.diagnostics = std::move(diags_);
    return result;
  }

 private:
  void error(std::string code, std::string message, size_t line, int column = 1, int width = 1) {
    diags_.push_back({Severity::Error, std::move(code), std::move(message), static_cast<int>(line) + 1,
                      column, column + width});
  }

  void header_line(size_t i) {
    const std::string_view raw = text::trim(lines_[i]);
    if (raw.empty() || raw.front() == ';') return;
    const size_t eq = raw.find('=');
    if (eq == std::string_view::npos) {
      error("bad-header", "expected `key = value`", i);
      return;
    }
    const std::string key(text::trim(raw.substr(0, eq)));
    const std::string value(text::trim(raw.substr(eq + 1)));
    const auto bad = [&] { error("bad-value", "bad value `" + value + "` for " + key, i); };

    if (key == "seed") {
      const auto v = text::parse_integer(value);
      if (!v || *v < 0) return bad();
      w_.map_seed = static_cast<uint64_t>(*v);
    } else if (key == "scatter.dots") {
      const auto v = text::parse_integer(value);
      if (!v || *v < 0 || *v > kMaxCells) return bad();
      w_.scatter_dots = static_cast<int>(*v);
    } else if (key == "stage.win") {
      if (value == "all-dots")
        w_.win = WinRule::AllDots;
      else if (value == "gate-then-dots")
        w_.win = WinRule::GateThenDots;
      else
        return bad();
    } else if (key == "glyph.pattern") {
      GlyphQuest q;
      for (char c : value) {
        const auto d = parse_direction(std::string_view(&c, 1));
        if (!d) return bad();
        q.pattern.push_back(*d);
      }
      if (q.pattern.empty()) return bad();
      w_.glyph = std::move(q);
    } else if (key.starts_with("ghost.")) {
      const size_t dot = key.find('.', 6);
      int index = -1;
      const std::string_view num = std::string_view(key).substr(6, dot == std::string::npos ? 0 : dot - 6);
      const auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), index);
      if (dot == std::string::npos || ec != std::errc() || p != num.data() + num.size() || index < 0) {
        error("unknown-key", "unknown key `" + key + "`", i);
        return;
      }
      const std::string field = key.substr(dot + 1);
      GhostHeader& g = ghosts_[index];
      g.line = static_cast<int>(i);
      if (field == "policy") {
        g.policy = parse_policy(value);
        if (!g.policy) return bad();
      } else if (field == "dir") {
        g.dir = parse_direction(value);
        if (!g.dir) return bad();
      } else {
        error("unknown-key", "unknown key `" + key + "`", i);
      }
    } else {
      error("unknown-key", "unknown key `" + key + "`", i);
    }
  }

  void grid(size_t begin, size_t end) {
    if (end - begin < 3) {
      error("too-small", "grid needs at least 3 rows", begin < lines_.size() ? begin : 0);
      return;
    }
    const size_t width = lines_[begin].size();
    if (width < 3) {
      error("too-small", "grid needs at least 3 columns", begin);
      return;
    }
    for (size_t i = begin; i < end; ++i) {
      if (lines_[i].size() != width) {
        error("ragged-grid",
              "row has " + std::to_string(lines_[i].size()) + " cells, expected " + std::to_string(width), i);
        return;
      }
    }
    const size_t rows = end - begin;
    if (rows * width > static_cast<size_t>(kMaxCells)) {
      error("oversize-grid", "grid has " + std::to_string(rows * width) + " cells, limit is " +
                                 std::to_string(kMaxCells),
            begin);
      return;
    }

    w_.rows = static_cast<int>(rows);
    w_.cols = static_cast<int>(width);
    w_.terrain.assign(rows * width, Terrain::Floor);
    w_.dots.assign(rows * width, 0);
    w_.glyph_marks.assign(rows * width, 0);
    bool have_pacman = false;

    for (size_t r = 0; r < rows; ++r) {
      const std::string& row = lines_[begin + r];
      for (size_t c = 0; c < width; ++c) {
        const Cell cell{static_cast<int>(r), static_cast<int>(c)};
        const size_t idx = w_.index(cell);
        const int column = static_cast<int>(c) + 1;
        switch (row[c]) {
          case '#': w_.terrain[idx] = Terrain::Wall; break;
          case '=': w_.terrain[idx] = Terrain::Gate; break;
          case ' ': break;
          case '.':
            w_.dots[idx] = 1;
            ++w_.dots_remaining;
            break;
          case 'Y':
            w_.glyph_marks[idx] = 1;
            w_.has_glyph_marks = true;
            break;
          case 'P':
            if (have_pacman) {
              error("duplicate-spawn", "second Pac-Man spawn", begin + r, column);
            }
            have_pacman = true;
            w_.pacman = cell;
            break;
          case 'G': {
            Ghost g;
            g.cell = g.spawn = cell;
            w_.ghosts.push_back(g);
            break;
          }
          default:
            error("unknown-char", std::string("unknown map character '") + row[c] + "'", begin + r, column);
            continue;
        }
        const bool border = r == 0 || c == 0 || r + 1 == rows || c + 1 == width;
        if (border && row[c] != '#')
          error("open-border", "border cell is not a wall", begin + r, column);
      }
    }
    if (!have_pacman) error("missing-spawn", "map has no Pac-Man spawn `P`", begin);

    for (const auto& [index, h] : ghosts_) {
      if (static_cast<size_t>(index) >= w_.ghosts.size()) {
        error("bad-value", "ghost." + std::to_string(index) + " has no `G` in the grid",
              static_cast<size_t>(h.line));
        continue;
      }
      Ghost& g = w_.ghosts[static_cast<size_t>(index)];
      if (h.policy) g.policy = *h.policy;
      if (h.dir) g.dir = *h.dir;
    }
    for (auto& g : w_.ghosts) {
      const bool patrols = g.policy == GhostPolicy::Patrol || g.policy == GhostPolicy::ChaseAStar;
      if (g.dir == Direction::None && patrols) g.dir = Direction::Right;
    }
  }

  std::vector<std::string> lines_;
  std::vector<Diagnostic> diags_;
  std::map<int, GhostHeader> ghosts_;
  WorldState w_;
};

}  // namespace

ParseResult parse_map(std::string_view text) { return Parser(text).run(); }

}  // namespace pacasm::world
