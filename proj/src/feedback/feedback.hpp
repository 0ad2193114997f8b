#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asm/assembler.hpp"
#include "grade/grader.hpp"

namespace pacasm::feedback {

enum class Phase : uint8_t { Assemble, Runtime };

struct FeedbackContext {
  Phase kind = Phase::Assemble;
  std::string stage;
  assembler::SourceUnit source;
  std::vector<Diagnostic> diagnostics;          // Assemble only
  std::optional<grade::RuntimeSignals> signals;  // Runtime only
  grade::Failure failure = grade::Failure::None;
  cpu::FaultKind fault = cpu::FaultKind::Unaligned;

  // nullopt for an accepted report.
  static std::optional<FeedbackContext> from_report(const grade::GradeReport& r, const assembler::SourceUnit& src);
};

struct PromptBundle {
  std::string system;
  std::string user;

  friend bool operator==(const PromptBundle&, const PromptBundle&) = default;
};

struct PromptLimits {
  size_t max_user_tokens = 3000;
};

std::string_view platform_manual();
const std::string& system_text();

// Rough token count: one token per four bytes, rounded up.
size_t estimate_tokens(std::string_view s);

// Deterministic. Over budget, the memory slice goes first, then the oldest
// instructions, then the text is cut.
PromptBundle build_prompt(const FeedbackContext& ctx, const PromptLimits& limits = {});

// Canned explanation plus checklist for every failure variant.
std::string_view fallback_template(grade::Failure f);
std::string fallback_text(const FeedbackContext& ctx);

struct TransportConfig {
  std::string endpoint;  // full chat-completions URL
  std::string api_key;
  std::string model = "qwen3:14b";
  std::chrono::milliseconds timeout{30'000};

  // PACASM_LLM_ENDPOINT, PACASM_LLM_API_KEY, PACASM_LLM_MODEL; nullopt when
  // no endpoint is set.
  static std::optional<TransportConfig> from_env();
};

struct TransportReply {
  bool ok = false;
  std::string text;   // model output when ok
  std::string error;  // reason otherwise
};

class Transport {
 public:
  virtual ~Transport() = default;
  virtual TransportReply complete(const PromptBundle& bundle) = 0;
};

// Chat-completions over HTTP(S).
class HttpTransport final : public Transport {
 public:
  explicit HttpTransport(TransportConfig config) : config_(std::move(config)) {}
  TransportReply complete(const PromptBundle& bundle) override;

  // The JSON request body; never contains the key.
  std::string request_body(const PromptBundle& bundle) const;

 private:
  TransportConfig config_;
};

struct FeedbackResult {
  std::string text;
  bool from_model = false;
  std::string notice;  // set when the fallback replaced a failed request
};

// Null transport means offline: the fallback is returned without a notice.
FeedbackResult request_feedback(const PromptBundle& bundle, const FeedbackContext& ctx, Transport* transport,
                                std::string_view secret = {});

// Replaces every occurrence of a non-empty secret.
std::string redact(std::string text, std::string_view secret);

}  // namespace pacasm::feedback
