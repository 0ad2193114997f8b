#include "grade/grader.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>

#include <json.hpp>

#include "common/hash.hpp"
#include "common/text.hpp"
#include "debug/trace.hpp"
#include "machine/session.hpp"

namespace pacasm::grade {

std::string_view status_name(Status s) {
  switch (s) {
    case Status::Accepted: return "accepted";
    case Status::AssembleError: return "assemble-error";
    case Status::RuntimeFailure: return "runtime-failure";
  }
  return "?";
}

std::string failure_name(Failure f, cpu::FaultKind kind) {
  switch (f) {
    case Failure::None: return "none";
    case Failure::AssemblerDiagnostics: return "assembler-diagnostics";
    case Failure::NoMovementCommands: return "no-movement-commands";
    case Failure::StoppedPrematurely: return "stopped-prematurely";
    case Failure::CapturedByGhost: return "captured-by-ghost";
    case Failure::Fault: return "fault(" + std::string(cpu::name(kind)) + ")";
    case Failure::StepLimitExceeded: return "step-limit-exceeded";
  }
  return "?";
}

namespace {

constexpr size_t kSignalInstructions = 16;
constexpr uint32_t kSliceBytes = 64;

Failure classify(const machine::Session& s) {
  switch (s.outcome()) {
    case machine::Outcome::Won: return Failure::None;
    case machine::Outcome::Fault: return Failure::Fault;
    case machine::Outcome::Captured: return Failure::CapturedByGhost;
    case machine::Outcome::StepLimit: return Failure::StepLimitExceeded;
    default: break;
  }
  return s.moves() == 0 ? Failure::NoMovementCommands : Failure::StoppedPrematurely;
}

RuntimeSignals capture(const machine::Session& s) {
  RuntimeSignals sig;
  for (auto& v : debug::last_instructions(s, kSignalInstructions))
    sig.last_instructions.push_back({v.addr, std::move(v.text), v.line});
  sig.regs = s.machine().regs;
  sig.pc = s.machine().pc;
  if (auto addr = s.last_access()) {
    const uint32_t hi = cpu::MemoryLayout::kMmioEnd - kSliceBytes;
    const uint32_t centered = *addr >= kSliceBytes / 2 ? (*addr - kSliceBytes / 2) & ~3u : 0;
    sig.memory_base = std::min(centered, hi);
    sig.memory = debug::read_memory(s, sig.memory_base, kSliceBytes).value_or(std::vector<uint8_t>{});
  }
  sig.world = s.world().render();
  sig.dots_remaining = s.world().dots_remaining;
  sig.moves = s.moves();
  return sig;
}

// Map and authoring problems belong to the stage, not the submission.
machine::Session open_session(const assembler::Program& p, const StageSpec& stage, uint64_t seed) {
  try {
    return machine::Session(p, stage.map, seed);
  } catch (const machine::SessionError& e) {
    throw StageError("bad-spec", stage.id + ": " + e.what());
  }
}

int64_t now_ms() {
  using namespace std::chrono;
  return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

}  // namespace

GradeReport grade(const assembler::SourceUnit& submission, const StageSpec& stage, const GradeOptions& options) {
  GradeReport r;
  r.stage = stage.id;
  r.seeds = stage.seeds;
  r.timestamp_ms = options.timestamp_ms.value_or(now_ms());

  auto built = assembler::build(submission);
  r.diagnostics = std::move(built.diagnostics);
  if (!built.ok()) {
    r.status = Status::AssembleError;
    r.failure = Failure::AssemblerDiagnostics;
    return r;
  }

  const uint64_t budget = options.budget.value_or(stage.budget);
  Fnv1a64 digest;
  uint64_t worst = 0;
  for (uint64_t seed : stage.seeds) {
    auto s = open_session(*built.program, stage, seed);
    s.set_costs(options.costs);
    s.advance(budget);

    SeedRun run;
    run.seed = seed;
    run.failure = classify(s);
    run.fault = s.machine().halt.fault;
    run.cycles = s.machine().cycles;
    run.moves = s.moves();
    run.digest = s.digest();
    ByteWriter w;
    w.u64(run.digest);
    digest.update(w.data());
    r.runs.push_back(run);

    if (run.failure != Failure::None && !r.failing_seed) {
      r.failing_seed = seed;
      r.failure = run.failure;
      r.fault = run.fault;
      r.cycles = run.cycles;
      r.moves = run.moves;
      r.signals = capture(s);
    }
    if (!r.failing_seed && run.cycles >= worst) {
      worst = run.cycles;
      r.cycles = run.cycles;
      r.moves = run.moves;
    }
  }
  r.digest = digest.value();
  r.status = r.failing_seed ? Status::RuntimeFailure : Status::Accepted;
  return r;
}

std::string to_json(const GradeReport& r) {
  nlohmann::ordered_json j;
  j["status"] = status_name(r.status);
  j["failure"] = r.failure == Failure::None ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(r.failure_text());
  j["cycles"] = r.cycles ? nlohmann::ordered_json(*r.cycles) : nlohmann::ordered_json(nullptr);
  j["moves"] = r.moves;
  j["seeds"] = r.seeds;
  if (r.failing_seed) j["failing_seed"] = *r.failing_seed;
  j["digest"] = hex64(r.digest);
  j["timestamp"] = r.timestamp_ms;
  j["stage"] = r.stage;
  auto diags = nlohmann::ordered_json::array();
  for (const auto& d : r.diagnostics) diags.push_back(nlohmann::ordered_json::parse(pacasm::to_json(d)));
  j["diagnostics"] = std::move(diags);
  return j.dump();
}

std::string PackReport::table() const {
  std::string out;
  char buf[160];
  std::snprintf(buf, sizeof buf, "%-24s %-10s %10s  %s\n", "stage", "result", "cycles", "failure");
  out += buf;
  for (const auto& s : stages) {
    const std::string cycles = s.cycles ? std::to_string(*s.cycles) : "-";
    const std::string why = !s.error.empty() ? s.error : s.failure;
    std::snprintf(buf, sizeof buf, "%-24s %-10s %10s  %s\n", s.id.c_str(), s.accepted ? "accepted" : "FAILED",
                  cycles.c_str(), s.accepted ? "" : why.c_str());
    out += buf;
  }
  return out;
}

namespace {

StageCheck check_reference(const StageSpec& stage, const std::filesystem::path& file, std::string id) {
  StageCheck c;
  c.id = std::move(id);
  const auto src = text::read_file(file.string());
  if (!src) {
    c.error = "cannot read " + file.string();
    return c;
  }
  GradeReport report;
  try {
    report = grade(assembler::SourceUnit::from_text(*src, file.filename().string()), stage, {0, {}, {}});
  } catch (const StageError& e) {
    c.error = e.what();
    return c;
  }
  c.accepted = report.accepted();
  c.failure = report.failure_text();
  c.cycles = report.cycles;
  return c;
}

}  // namespace

PackReport verify_stage_pack(const std::filesystem::path& stages_dir) {
  PackReport pack;
  pack.ok = true;
  for (const auto& id : stage_ids()) {
    StageSpec stage;
    try {
      stage = load_stage(stages_dir, id);
    } catch (const StageError& e) {
      pack.stages.push_back({id, false, {}, {}, e.what()});
      pack.ok = false;
      continue;
    }
    pack.stages.push_back(check_reference(stage, stage.dir / "reference.s", id));
    pack.ok = pack.ok && pack.stages.back().accepted;

    if (id == "stage4") {
      const StageCheck& plain = pack.stages.back();
      StageCheck parity = check_reference(stage, stage.dir / "reference_parity.s", id + "/reference_parity");
      if (parity.accepted && plain.accepted && !(*parity.cycles < *plain.cycles)) {
        parity.accepted = false;
        parity.error = "parity reference is not faster than the map-reading reference";
      }
      pack.ok = pack.ok && parity.accepted;
      pack.stages.push_back(std::move(parity));
    }
  }
  return pack;
}

}  // namespace pacasm::grade
