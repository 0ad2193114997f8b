#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "world/world.hpp"

namespace pacasm::grade {

// Bundled stage ids in pack order.
const std::vector<std::string>& stage_ids();

struct StageSpec {
  std::string id;
  std::string title;
  std::string map;  // map document
  world::WinRule win = world::WinRule::AllDots;
  uint64_t budget = 10'000'000;
  std::vector<uint64_t> seeds;  // never empty
  std::string notes;
  std::filesystem::path dir;
};

class StageError : public std::runtime_error {
 public:
  StageError(std::string code, const std::string& msg) : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string& code() const { return code_; }  // unknown-stage, io, bad-spec

 private:
  std::string code_;
};

// spec.txt holds `key = value` lines: title, budget, seeds (comma
// separated), notes (repeatable, joined with newlines).
StageSpec parse_stage(const std::string& id, const std::string& map, const std::string& spec_text);

// Reads <stages_dir>/<id>/{map.txt,spec.txt}; throws StageError.
StageSpec load_stage(const std::filesystem::path& stages_dir, const std::string& id);

}  // namespace pacasm::grade
