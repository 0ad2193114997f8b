#include "grade/stage.hpp"

#include <algorithm>

#include "common/text.hpp"

namespace pacasm::grade {

const std::vector<std::string>& stage_ids() {
  static const std::vector<std::string> ids = {"stage1", "stage2", "stage3", "stage4", "stage5", "optional"};
  return ids;
}

StageSpec parse_stage(const std::string& id, const std::string& map, const std::string& spec_text) {
  StageSpec s;
  s.id = id;
  s.map = map;
  auto parsed = world::parse_map(map);
  if (!parsed.world) throw StageError("bad-spec", id + ": map.txt does not parse");
  s.win = parsed.world->win;

  int n = 0;
  for (const auto& raw : text::split_lines(spec_text)) {
    ++n;
    const auto line = text::trim(raw);
    if (line.empty() || line.front() == ';') continue;
    const size_t eq = line.find('=');
    if (eq == std::string_view::npos)
      throw StageError("bad-spec", id + ": spec.txt line " + std::to_string(n) + " is not `key = value`");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string value(text::trim(line.substr(eq + 1)));
    if (key == "title") {
      s.title = value;
    } else if (key == "budget") {
      const auto v = text::parse_integer(value);
      if (!v || *v <= 0) throw StageError("bad-spec", id + ": bad budget");
      s.budget = static_cast<uint64_t>(*v);
    } else if (key == "seeds") {
      s.seeds.clear();
      std::string_view rest = value;
      while (!rest.empty()) {
        const size_t comma = rest.find(',');
        const auto v = text::parse_integer(text::trim(rest.substr(0, comma)));
        if (!v || *v < 0) throw StageError("bad-spec", id + ": bad seed list");
        s.seeds.push_back(static_cast<uint64_t>(*v));
        rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
      }
    } else if (key == "notes") {
      if (!s.notes.empty()) s.notes += '\n';
      s.notes += value;
    } else {
      throw StageError("bad-spec", id + ": unknown key `" + key + "` in spec.txt");
    }
  }
  if (s.seeds.empty()) s.seeds.push_back(parsed.world->map_seed);
  return s;
}

StageSpec load_stage(const std::filesystem::path& stages_dir, const std::string& id) {
  const auto& ids = stage_ids();
  if (std::find(ids.begin(), ids.end(), id) == ids.end())
    throw StageError("unknown-stage", "unknown stage `" + id + "`");
  const auto dir = stages_dir / id;
  const auto map = text::read_file((dir / "map.txt").string());
  if (!map) throw StageError("io", "cannot read " + (dir / "map.txt").string());
  const auto spec = text::read_file((dir / "spec.txt").string());
  if (!spec) throw StageError("io", "cannot read " + (dir / "spec.txt").string());
  StageSpec s = parse_stage(id, *map, *spec);
  s.dir = dir;
  return s;
}

}  // namespace pacasm::grade
