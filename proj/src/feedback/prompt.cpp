#include <cstdio>

#include "asm/isa.hpp"
#include "common/hash.hpp"
#include "feedback/feedback.hpp"

namespace pacasm::feedback {

std::optional<FeedbackContext> FeedbackContext::from_report(const grade::GradeReport& r,
                                                            const assembler::SourceUnit& src) {
  if (r.accepted()) return std::nullopt;
  FeedbackContext ctx;
  ctx.stage = r.stage;
  ctx.source = src;
  ctx.failure = r.failure;
  ctx.fault = r.fault;
  if (r.status == grade::Status::AssembleError) {
    ctx.kind = Phase::Assemble;
    ctx.diagnostics = r.diagnostics;
  } else {
    ctx.kind = Phase::Runtime;
    ctx.signals = r.signals.value_or(grade::RuntimeSignals{});
  }
  return ctx;
}

const std::string& system_text() {
  static const std::string text = [] {
    std::string s;
    s += "# Role\n";
    s += "You are an expert in computer system architecture and a skilled instructor.\n\n";
    s += "# Context\n";
    s += "Students learn assembly programming on a gamified platform. Their programs steer a Pac-Man "
         "character through a maze by writing to memory-mapped I/O registers, and are graded on "
         "finishing the stage and on the number of CPU cycles used. The platform manual follows.\n\n";
    s += platform_manual();
    if (!s.ends_with('\n')) s += '\n';
    s += "\n# Statement\n";
    s += "The student's submission failed. Explain what went wrong and point them to the next thing "
         "to check, using the assembler output or the execution signals provided.\n\n";
    s += "# Personality\n";
    s += "Be clear, direct, and instructional.\n\n";
    s += "# Guardrail\n";
    s += "Give hints and explanations only. Never provide a complete or corrected solution, never "
         "rewrite the student's program, and never write more than two lines of assembly in a row.\n";
    return s;
  }();
  return text;
}

size_t estimate_tokens(std::string_view s) { return (s.size() + 3) / 4; }

namespace {

struct Sections {
  std::string head;
  std::vector<std::string> instructions;  // oldest first
  std::string registers;
  std::string memory;
  std::string tail;
  bool runtime = false;

  std::string render(bool with_memory, size_t skip) const {
    std::string out = head;
    if (runtime) {
      out += "Last executed instructions (oldest first):\n";
      if (instructions.size() == skip) out += "  (none)\n";
      for (size_t i = skip; i < instructions.size(); ++i) out += instructions[i];
      out += registers;
      if (with_memory) out += memory;
      else if (!memory.empty()) out += "Memory slice omitted for length.\n";
    }
    out += tail;
    return out;
  }
};

std::string source_listing(const assembler::SourceUnit& src) {
  std::string out = "Student code:\n";
  char buf[16];
  for (size_t i = 0; i < src.lines.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%4zu | ", i + 1);
    out += buf;
    out += src.lines[i];
    out += '\n';
  }
  return out;
}

Sections assemble_sections(const FeedbackContext& ctx) {
  Sections s;
  s.head = "Phase: assembly\nStage: " + ctx.stage + "\nAssembler output:\n";
  for (const auto& d : ctx.diagnostics) {
    s.head += "  " + to_human(d, ctx.source.origin) + "\n";
    if (d.line >= 1 && static_cast<size_t>(d.line) <= ctx.source.lines.size())
      s.head += "    source line " + std::to_string(d.line) + ": " + ctx.source.lines[d.line - 1] + "\n";
  }
  s.tail = source_listing(ctx.source);
  return s;
}

Sections runtime_sections(const FeedbackContext& ctx) {
  Sections s;
  s.runtime = true;
  const grade::RuntimeSignals sig = ctx.signals.value_or(grade::RuntimeSignals{});
  s.head = "Phase: execution\nStage: " + ctx.stage + "\nFailure: " + grade::failure_name(ctx.failure, ctx.fault) +
           "\n";
  char buf[160];
  for (const auto& ins : sig.last_instructions) {
    const std::string line = ins.line ? "line " + std::to_string(*ins.line) : "line ?";
    std::snprintf(buf, sizeof buf, "  %s  %-9s %s\n", hex32(ins.addr).c_str(), line.c_str(), ins.text.c_str());
    s.instructions.emplace_back(buf);
  }
  s.registers = "Registers:\n";
  for (unsigned r = 0; r < 32; ++r) {
    std::snprintf(buf, sizeof buf, "  %-6s= %s", std::string(isa::register_name(static_cast<uint8_t>(r))).c_str(), hex32(sig.regs[r]).c_str());
    s.registers += buf;
    if (r % 4 == 3) s.registers += '\n';
  }
  s.registers += "  pc    = " + hex32(sig.pc) + "\n";
  if (!sig.memory.empty()) {
    s.memory = "Memory around the last accessed address:\n";
    for (size_t i = 0; i < sig.memory.size(); i += 16) {
      s.memory += "  " + hex32(sig.memory_base + static_cast<uint32_t>(i)) + ":";
      for (size_t k = i; k < i + 16 && k < sig.memory.size(); ++k) {
        std::snprintf(buf, sizeof buf, " %02x", sig.memory[k]);
        s.memory += buf;
      }
      s.memory += '\n';
    }
  }
  s.tail = "World: " + std::to_string(sig.dots_remaining) + " dots remaining, " + std::to_string(sig.moves) +
           " moves issued\n" + sig.world + source_listing(ctx.source);
  return s;
}

}  // namespace

PromptBundle build_prompt(const FeedbackContext& ctx, const PromptLimits& limits) {
  const Sections s = ctx.kind == Phase::Assemble ? assemble_sections(ctx) : runtime_sections(ctx);
  PromptBundle b;
  b.system = system_text();
  b.user = s.render(true, 0);
  if (estimate_tokens(b.user) <= limits.max_user_tokens) return b;
  b.user = s.render(false, 0);
  for (size_t skip = 1; estimate_tokens(b.user) > limits.max_user_tokens && skip <= s.instructions.size(); ++skip)
    b.user = s.render(false, skip);
  const size_t max_bytes = limits.max_user_tokens * 4;
  if (b.user.size() > max_bytes) b.user.resize(max_bytes);
  return b;
}

}  // namespace pacasm::feedback
