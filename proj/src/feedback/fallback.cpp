#include "feedback/feedback.hpp"

namespace pacasm::feedback {

std::string_view fallback_template(grade::Failure f) {
  using grade::Failure;
  switch (f) {
    case Failure::None:
      return "The submission was accepted. Look for instructions you can remove from the hot path to "
             "lower the cycle count.\n";
    case Failure::AssemblerDiagnostics:
      return "The program did not assemble, so it never ran.\n"
             "Next steps:\n"
             "  - Read each diagnostic and go to the line and column it names.\n"
             "  - Check the spelling of mnemonics and that every register starts with `$`.\n"
             "  - Make sure every label you branch or jump to is defined exactly once, with a colon.\n"
             "  - Check that immediates fit in 16 bits, or load large constants with `li`.\n";
    case Failure::NoMovementCommands:
      return "The program ran but never issued a movement command, so Pac-Man did not move.\n"
             "Next steps:\n"
             "  - Movement is requested by storing 1, 2, 3 or 4 to address 0x30000.\n"
             "  - Check that the base register really holds 0x30000 when the store runs.\n"
             "  - Check that control actually reaches your store instructions.\n";
    case Failure::StoppedPrematurely:
      return "The program stopped before the stage was finished.\n"
             "Next steps:\n"
             "  - Count the moves you need and compare with the moves issued.\n"
             "  - Moves into a wall or locked gate are blocked but still use a tick.\n"
             "  - Check the exit condition of every loop and where `break` is reached.\n"
             "  - If the program fell off the end of the code, add the missing moves or a loop.\n";
    case Failure::CapturedByGhost:
      return "A ghost caught Pac-Man.\n"
             "Next steps:\n"
             "  - Ghosts move once after every move you issue. Work out where the ghost will be after "
             "each of your moves.\n"
             "  - Read the live map at 0x30010 to find the ghost (tile value 4) before stepping near it.\n"
             "  - Waiting is possible: a move into a wall uses a tick without moving Pac-Man.\n";
    case Failure::Fault:
      return "The CPU stopped with a fault.\n"
             "Next steps:\n"
             "  - Unaligned: lw and sw need addresses that are multiples of 4.\n"
             "  - Out of region: check the base register and offset of the failing load or store.\n"
             "  - Store into code: data belongs in .data or on the stack, not in .text.\n"
             "  - Invalid instruction: make sure control never jumps into data words.\n";
    case Failure::StepLimitExceeded:
      return "The program used up its step budget, which usually means a loop never ends.\n"
             "Next steps:\n"
             "  - Check that each loop variable is updated on every iteration.\n"
             "  - Check that the loop condition compares against the right register and value.\n"
             "  - Make sure the branch back to the loop start is not taken after the goal is reached.\n";
  }
  return "No explanation is available for this outcome.\n";
}

std::string fallback_text(const FeedbackContext& ctx) {
  std::string out = "Outcome: " + grade::failure_name(ctx.failure, ctx.fault) + "\n";
  out += fallback_template(ctx.failure);
  if (ctx.kind == Phase::Assemble && !ctx.diagnostics.empty()) {
    const Diagnostic& d = ctx.diagnostics.front();
    out += "First diagnostic: " + to_human(d, ctx.source.origin) + "\n";
  }
  if (ctx.kind == Phase::Runtime && ctx.signals && !ctx.signals->last_instructions.empty()) {
    const auto& last = ctx.signals->last_instructions.back();
    out += "Last instruction executed: " + last.text;
    if (last.line) out += " (line " + std::to_string(*last.line) + ")";
    out += "\n";
  }
  return out;
}

std::string redact(std::string text, std::string_view secret) {
  if (secret.empty()) return text;
  for (size_t pos = text.find(secret); pos != std::string::npos; pos = text.find(secret, pos))
    text.replace(pos, secret.size(), "[redacted]");
  return text;
}

FeedbackResult request_feedback(const PromptBundle& bundle, const FeedbackContext& ctx, Transport* transport,
                                std::string_view secret) {
  FeedbackResult r;
  if (transport) {
    TransportReply reply = transport->complete(bundle);
    if (reply.ok && !reply.text.empty()) {
      r.text = redact(std::move(reply.text), secret);
      r.from_model = true;
      return r;
    }
    r.notice = redact("feedback service unavailable (" + (reply.ok ? std::string("empty reply") : reply.error) +
                          "); showing built-in guidance",
                      secret);
  }
  r.text = fallback_text(ctx);
  return r;
}

}  // namespace pacasm::feedback
