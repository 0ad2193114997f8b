#include "protocol/host.hpp"

#include <optional>

#include <json.hpp>

#include "common/hash.hpp"
#include "common/text.hpp"
#include "debug/trace.hpp"
#include "grade/grader.hpp"

namespace pacasm::protocol {

using json = nlohmann::ordered_json;

namespace {

struct ProtocolError {
  std::string code;
  std::string message;
  json detail = nullptr;
};

[[noreturn]] void fail(std::string code, std::string message, json detail = nullptr) {
  throw ProtocolError{std::move(code), std::move(message), std::move(detail)};
}

json error_response(const ProtocolError& e) {
  json err;
  err["code"] = e.code;
  err["message"] = e.message;
  if (!e.detail.is_null()) err["detail"] = e.detail;
  json r;
  r["ok"] = false;
  r["error"] = std::move(err);
  return r;
}

uint64_t get_uint(const json& req, const char* key, uint64_t fallback) {
  if (!req.contains(key)) return fallback;
  const json& v = req[key];
  if (v.is_number_unsigned()) return v.get<uint64_t>();
  if (v.is_number_integer() && v.get<int64_t>() >= 0) return static_cast<uint64_t>(v.get<int64_t>());
  if (v.is_string()) {
    if (auto n = text::parse_integer(v.get<std::string>()); n && *n >= 0) return static_cast<uint64_t>(*n);
  }
  fail("bad-request", std::string("field `") + key + "` must be a non-negative integer");
}

std::string get_string(const json& req, const char* key) {
  if (!req.contains(key) || !req[key].is_string())
    fail("bad-request", std::string("field `") + key + "` must be a string");
  return req[key].get<std::string>();
}

json diagnostics_json(const std::vector<Diagnostic>& diags) {
  json a = json::array();
  for (const auto& d : diags) a.push_back(json::parse(to_json(d)));
  return a;
}

json world_view(const world::WorldState& w) {
  json j;
  j["rows"] = w.rows;
  j["cols"] = w.cols;
  json grid = json::array();
  const auto tiles = w.tile_matrix();
  for (int r = 0; r < w.rows; ++r) {
    std::string row;
    for (int c = 0; c < w.cols; ++c) row += static_cast<char>('0' + tiles[static_cast<size_t>(r * w.cols + c)]);
    grid.push_back(row);
  }
  j["tiles"] = std::move(grid);
  j["pacman"] = {w.pacman.row, w.pacman.col};
  json ghosts = json::array();
  for (const auto& g : w.ghosts) {
    json gj;
    gj["cell"] = {g.cell.row, g.cell.col};
    gj["policy"] = world::policy_name(g.policy);
    gj["dir"] = world::direction_name(g.dir);
    ghosts.push_back(std::move(gj));
  }
  j["ghosts"] = std::move(ghosts);
  j["dots_remaining"] = w.dots_remaining;
  j["gates_open"] = w.gates_open;
  if (w.glyph) {
    json q;
    q["required"] = w.glyph->required;
    q["completed"] = w.glyph->completed;
    q["active"] = w.glyph->active ? json{w.glyph->active->row, w.glyph->active->col} : json(nullptr);
    q["progress"] = w.glyph->progress;
    q["armed"] = w.glyph->armed;
    j["glyph"] = std::move(q);
  }
  j["won"] = w.won;
  j["captured"] = w.captured;
  j["ticks"] = w.ticks;
  return j;
}

json summary(const debug::TraceLog& t) {
  const auto& s = t.session();
  json j;
  j["outcome"] = s.outcome_text();
  j["pc"] = hex32(s.machine().pc);
  j["cycles"] = s.machine().cycles;
  j["moves"] = s.moves();
  j["position"] = t.position();
  j["digest"] = hex64(s.digest());
  return j;
}

json step_payload(const debug::TraceLog& t, const debug::StepResult& r) {
  json j;
  j["steps"] = r.steps;
  j["reason"] = debug::stop_reason_name(r.reason);
  if (!r.notice.empty()) j["notice"] = r.notice;
  j["state"] = summary(t);
  return j;
}

json region_view(const debug::TraceLog& t, const json& region) {
  const auto& s = t.session();
  if (!region.is_object() || !region.contains("kind") || !region["kind"].is_string())
    fail("bad-request", "each region needs a string `kind`");
  const std::string kind = region["kind"].get<std::string>();
  json j;
  j["kind"] = kind;
  if (kind == "registers") {
    json regs;
    for (unsigned r = 0; r < 32; ++r) regs[std::string(isa::register_name(r))] = hex32(s.machine().regs[r]);
    j["pc"] = hex32(s.machine().pc);
    j["cycles"] = s.machine().cycles;
    j["regs"] = std::move(regs);
  } else if (kind == "memory") {
    const uint64_t addr = get_uint(region, "addr", 0);
    const uint64_t len = get_uint(region, "len", 0);
    std::optional<std::vector<uint8_t>> bytes;
    if (addr <= 0xffffffffULL && len <= 0xffffffffULL)
      bytes = debug::read_memory(s, static_cast<uint32_t>(addr), static_cast<uint32_t>(len));
    if (!bytes) fail("out-of-range", "memory region is outside the address space or longer than 64 KiB");
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    for (uint8_t b : *bytes) {
      hex += kHex[b >> 4];
      hex += kHex[b & 15];
    }
    j["addr"] = hex32(static_cast<uint32_t>(addr));
    j["len"] = len;
    j["bytes"] = std::move(hex);
  } else if (kind == "world") {
    j["world"] = world_view(s.world());
  } else if (kind == "last-instructions") {
    const uint64_t n = get_uint(region, "n", 16);
    json list = json::array();
    for (const auto& v : debug::last_instructions(s, static_cast<size_t>(n))) {
      json iv;
      iv["addr"] = hex32(v.addr);
      iv["word"] = hex32(v.word);
      iv["text"] = v.text;
      iv["line"] = v.line ? json(*v.line) : json(nullptr);
      list.push_back(std::move(iv));
    }
    j["instructions"] = std::move(list);
  } else {
    fail("bad-request", "unknown region kind `" + kind + "`");
  }
  return j;
}

}  // namespace

struct Host::Slot {
  std::mutex mu;
  std::optional<debug::TraceLog> trace;
  std::string source;
};

Host::Host(std::filesystem::path stages_dir) : stages_dir_(std::move(stages_dir)) {}
Host::~Host() = default;

std::string Host::open() {
  std::lock_guard guard(mu_);
  std::string token = "s" + std::to_string(next_++);
  slots_.emplace(token, std::make_shared<Slot>());
  return token;
}

bool Host::close(const std::string& token) {
  std::lock_guard guard(mu_);
  return slots_.erase(token) > 0;
}

size_t Host::session_count() const {
  std::lock_guard guard(mu_);
  return slots_.size();
}

std::string Host::handle(const std::string& token, std::string_view request) {
  std::shared_ptr<Slot> slot;
  {
    std::lock_guard guard(mu_);
    if (auto it = slots_.find(token); it != slots_.end()) slot = it->second;
  }
  try {
    if (!slot) fail("unknown-session", "no session with token `" + token + "`");
    const json req = json::parse(request, nullptr, false);
    if (req.is_discarded() || !req.is_object()) fail("bad-request", "request is not a JSON object");
    if (!req.contains("op") || !req["op"].is_string()) fail("bad-request", "request has no string `op`");
    const std::string op = req["op"].get<std::string>();

    std::lock_guard guard(slot->mu);
    const auto loaded = [&]() -> debug::TraceLog& {
      if (!slot->trace) fail("no-program", "send `load` first");
      return *slot->trace;
    };

    json payload;
    if (op == "load") {
      std::string source = get_string(req, "source");
      std::string map;
      uint64_t seed = 0;
      if (req.contains("stage")) {
        try {
          const auto stage = grade::load_stage(stages_dir_, get_string(req, "stage"));
          map = stage.map;
          seed = stage.seeds.front();
        } catch (const grade::StageError& e) {
          fail(e.code(), e.what());
        }
      } else {
        map = get_string(req, "map");
      }
      seed = get_uint(req, "seed", seed);
      auto built = assembler::build(assembler::SourceUnit::from_text(source));
      if (!built.ok()) fail("assemble-error", "program has errors", diagnostics_json(built.diagnostics));
      try {
        slot->trace.emplace(machine::Session(std::move(*built.program), map, seed));
      } catch (const machine::SessionError& e) {
        fail(e.code() == "map" ? "map-error" : e.code() + "-error", e.what(), diagnostics_json(e.diagnostics()));
      }
      slot->source = std::move(source);
      payload["entry"] = hex32(slot->trace->session().program().entry);
      payload["text_bytes"] = slot->trace->session().program().text.size();
      payload["data_bytes"] = slot->trace->session().program().data.size();
      payload["warnings"] = diagnostics_json(built.diagnostics);
      payload["state"] = summary(*slot->trace);
    } else if (op == "run") {
      auto& t = loaded();
      payload = step_payload(t, t.step_forward(get_uint(req, "budget", cpu::kDefaultBudget)));
    } else if (op == "step") {
      auto& t = loaded();
      payload = step_payload(t, t.step_forward(get_uint(req, "n", 1)));
    } else if (op == "back") {
      auto& t = loaded();
      payload = step_payload(t, t.step_backward(get_uint(req, "n", 1)));
    } else if (op == "breakpoint") {
      auto& t = loaded();
      const uint64_t addr = get_uint(req, "addr", UINT64_MAX);
      if (addr > 0xffffffffULL) fail("bad-request", "field `addr` is required");
      bool on = true;
      if (req.contains("on")) {
        if (!req["on"].is_boolean()) fail("bad-request", "field `on` must be a boolean");
        on = req["on"].get<bool>();
      }
      t.set_breakpoint(static_cast<uint32_t>(addr), on);
      json list = json::array();
      for (uint32_t a : t.breakpoints()) list.push_back(hex32(a));
      payload["breakpoints"] = std::move(list);
    } else if (op == "state") {
      auto& t = loaded();
      if (!req.contains("regions") || !req["regions"].is_array())
        fail("bad-request", "field `regions` must be an array");
      json regions = json::array();
      for (const auto& r : req["regions"]) regions.push_back(region_view(t, r));
      payload["regions"] = std::move(regions);
      payload["state"] = summary(t);
    } else if (op == "world") {
      payload = world_view(loaded().session().world());
    } else if (op == "grade") {
      const std::string stage_id = get_string(req, "stage");
      const std::string source = req.contains("source") ? get_string(req, "source") : slot->source;
      if (!req.contains("source") && !slot->trace) fail("no-program", "send `load` or include `source`");
      grade::GradeOptions opts;
      if (req.contains("timestamp")) opts.timestamp_ms = static_cast<int64_t>(get_uint(req, "timestamp", 0));
      try {
        const auto stage = grade::load_stage(stages_dir_, stage_id);
        payload = json::parse(grade::to_json(grade::grade(assembler::SourceUnit::from_text(source), stage, opts)));
      } catch (const grade::StageError& e) {
        fail(e.code(), e.what());
      }
    } else {
      fail("unknown-op", "unknown op `" + op + "`");
    }
    json r;
    r["ok"] = true;
    r["payload"] = std::move(payload);
    return r.dump();
  } catch (const ProtocolError& e) {
    return error_response(e).dump();
  } catch (const std::exception& e) {
    return error_response({"internal", e.what()}).dump();
  }
}

}  // namespace pacasm::protocol
