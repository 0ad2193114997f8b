#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "asm/assembler.hpp"
#include "cpu/emulator.hpp"
#include "grade/stage.hpp"

namespace pacasm::grade {

enum class Status : uint8_t { Accepted, AssembleError, RuntimeFailure };

enum class Failure : uint8_t {
  None,
  AssemblerDiagnostics,
  NoMovementCommands,
  StoppedPrematurely,
  CapturedByGhost,
  Fault,
  StepLimitExceeded,
};

std::string_view status_name(Status s);
// "fault(<kind>)" for faults.
std::string failure_name(Failure f, cpu::FaultKind kind = cpu::FaultKind::Unaligned);

// Execution signals of the failing run, kept for feedback.
struct RuntimeSignals {
  struct Instruction {
    uint32_t addr = 0;
    std::string text;
    std::optional<int> line;
  };
  std::vector<Instruction> last_instructions;  // oldest first, at most 16
  std::array<uint32_t, 32> regs{};
  uint32_t pc = 0;
  uint32_t memory_base = 0;     // 64-byte slice around the last accessed address
  std::vector<uint8_t> memory;  // empty when nothing was accessed
  std::string world;            // rendered grid
  int dots_remaining = 0;
  uint64_t moves = 0;
};

struct SeedRun {
  uint64_t seed = 0;
  Failure failure = Failure::None;
  cpu::FaultKind fault = cpu::FaultKind::Unaligned;
  uint64_t cycles = 0;
  uint64_t moves = 0;
  uint64_t digest = 0;
};

struct GradeReport {
  std::string stage;
  Status status = Status::RuntimeFailure;
  Failure failure = Failure::None;
  cpu::FaultKind fault = cpu::FaultKind::Unaligned;
  std::optional<uint64_t> cycles;  // absent when the program never ran
  uint64_t moves = 0;
  std::vector<uint64_t> seeds;
  std::vector<SeedRun> runs;
  std::optional<uint64_t> failing_seed;
  uint64_t digest = 0;
  int64_t timestamp_ms = 0;
  std::vector<Diagnostic> diagnostics;
  std::optional<RuntimeSignals> signals;

  bool accepted() const { return status == Status::Accepted; }
  std::string failure_text() const { return failure_name(failure, fault); }
};

struct GradeOptions {
  std::optional<int64_t> timestamp_ms;  // defaults to the wall clock
  std::optional<uint64_t> budget;       // overrides the stage budget
  cpu::CostTable costs;
};

// Phase 1 assembles and checks; phase 2 runs every seed. All seeds must win;
// cycles are the worst case.
GradeReport grade(const assembler::SourceUnit& submission, const StageSpec& stage,
                  const GradeOptions& options = {});

// One JSON object: status, failure, cycles, moves, seeds, digest,
// timestamp, stage, diagnostics (plus failing_seed when rejected at runtime).
std::string to_json(const GradeReport& r);

struct StageCheck {
  std::string id;  // "stage4/reference_parity" for the parity reference
  bool accepted = false;
  std::string failure;
  std::optional<uint64_t> cycles;
  std::string error;  // stage loading problems
};

struct PackReport {
  std::vector<StageCheck> stages;
  bool ok = false;
  std::string table() const;
};

// Grades every bundled reference; the stage-4 parity reference must also
// beat the map-reading one.
PackReport verify_stage_pack(const std::filesystem::path& stages_dir);

}  // namespace pacasm::grade
