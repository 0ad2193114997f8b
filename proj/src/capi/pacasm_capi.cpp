#include "pacasm/pacasm.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include <json.hpp>

#include "asm/assembler.hpp"
#include "feedback/feedback.hpp"
#include "grade/grader.hpp"
#include "grade/leaderboard.hpp"
#include "machine/session.hpp"
#include "protocol/host.hpp"

using namespace pacasm;

struct pacasm_program {
  assembler::Program program;
};

struct pacasm_session {
  machine::Session session;
};

struct pacasm_report {
  grade::GradeReport report;
  assembler::SourceUnit source;
};

struct pacasm_host {
  protocol::Host host;
};

namespace {

thread_local std::string g_last_error;

pacasm_status fail(pacasm_status s, std::string message) {
  g_last_error = std::move(message);
  return s;
}

pacasm_status ok() {
  g_last_error.clear();
  return PACASM_OK;
}

char* dup(std::string_view s) {
  auto* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.data(), s.size());
  p[s.size()] = '\0';
  return p;
}

void put(char** out, std::string_view s) {
  if (out) *out = dup(s);
}

// Runs `body`, mapping escaping exceptions to status codes.
template <typename F>
pacasm_status guarded(F&& body) {
  try {
    return body();
  } catch (const std::bad_alloc&) {
    return fail(PACASM_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(PACASM_INTERNAL, e.what());
  }
}

std::string summary_line(const grade::GradeReport& r) {
  std::string s(r.accepted() ? "accepted" : grade::status_name(r.status));
  if (!r.accepted()) s += ", " + r.failure_text();
  if (r.cycles) s += ", cycles=" + std::to_string(*r.cycles);
  return s;
}

}  // namespace

extern "C" {

const char* pacasm_version(void) { return "0.1.0"; }

const char* pacasm_status_name(pacasm_status status) {
  switch (status) {
    case PACASM_OK: return "ok";
    case PACASM_INVALID_ARGUMENT: return "invalid-argument";
    case PACASM_ASSEMBLE: return "assemble";
    case PACASM_MAP: return "map";
    case PACASM_LOAD: return "load";
    case PACASM_IO: return "io";
    case PACASM_NOT_FOUND: return "not-found";
    case PACASM_REJECTED: return "rejected";
    case PACASM_PROTOCOL: return "protocol";
    case PACASM_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* pacasm_last_error_message(void) { return g_last_error.c_str(); }

void pacasm_free(char* s) { std::free(s); }

pacasm_status pacasm_assemble(const char* source, const char* origin, pacasm_program** program,
                              char** diagnostics_jsonl) {
  if (!source || !program) return fail(PACASM_INVALID_ARGUMENT, "source and program are required");
  *program = nullptr;
  if (diagnostics_jsonl) *diagnostics_jsonl = nullptr;
  return guarded([&] {
    auto built = assembler::build(assembler::SourceUnit::from_text(source, origin ? origin : "inline"));
    put(diagnostics_jsonl, to_jsonl(built.diagnostics));
    if (!built.ok()) {
      std::string first;
      for (const auto& d : built.diagnostics)
        if (d.severity == Severity::Error) {
          first = to_human(d, origin ? origin : "inline");
          break;
        }
      return fail(PACASM_ASSEMBLE, first);
    }
    *program = new pacasm_program{std::move(*built.program)};
    return ok();
  });
}

void pacasm_program_free(pacasm_program* program) { delete program; }

const uint8_t* pacasm_program_text(const pacasm_program* program, size_t* size) {
  if (!program) return nullptr;
  if (size) *size = program->program.text.size();
  return program->program.text.data();
}

const uint8_t* pacasm_program_data(const pacasm_program* program, size_t* size) {
  if (!program) return nullptr;
  if (size) *size = program->program.data.size();
  return program->program.data.data();
}

uint32_t pacasm_program_entry(const pacasm_program* program) { return program ? program->program.entry : 0; }

pacasm_status pacasm_program_listing(const pacasm_program* program, char** listing) {
  if (!program || !listing) return fail(PACASM_INVALID_ARGUMENT, "program and listing are required");
  return guarded([&] {
    *listing = dup(assembler::listing(program->program));
    return ok();
  });
}

pacasm_status pacasm_disassemble(uint32_t word, uint32_t addr, const pacasm_program* program, char** text) {
  if (!text) return fail(PACASM_INVALID_ARGUMENT, "text is required");
  return guarded([&] {
    static const assembler::SymbolTable kNone;
    *text = dup(assembler::disassemble(word, addr, program ? program->program.symbols : kNone));
    return ok();
  });
}

pacasm_status pacasm_map_validate(const char* map_document, char** diagnostics_jsonl) {
  if (!map_document) return fail(PACASM_INVALID_ARGUMENT, "map document is required");
  if (diagnostics_jsonl) *diagnostics_jsonl = nullptr;
  return guarded([&] {
    const auto parsed = world::parse_map(map_document);
    put(diagnostics_jsonl, to_jsonl(parsed.diagnostics));
    if (!parsed.world) return fail(PACASM_MAP, "map document has errors");
    world::WorldState w = *parsed.world;
    try {
      world::initialize(w, w.map_seed);
    } catch (const world::AuthoringError& e) {
      return fail(PACASM_LOAD, e.what());
    }
    return ok();
  });
}

pacasm_status pacasm_session_create(const pacasm_program* program, const char* map_document, uint64_t seed,
                                    pacasm_session** session) {
  if (!program || !map_document || !session)
    return fail(PACASM_INVALID_ARGUMENT, "program, map and session are required");
  *session = nullptr;
  return guarded([&] {
    try {
      *session = new pacasm_session{machine::Session(program->program, map_document, seed)};
    } catch (const machine::SessionError& e) {
      std::string msg = e.what();
      for (const auto& d : e.diagnostics()) msg += "\n" + to_human(d, "map");
      return fail(e.code() == "map" ? PACASM_MAP : PACASM_LOAD, msg);
    }
    return ok();
  });
}

void pacasm_session_free(pacasm_session* session) { delete session; }

pacasm_status pacasm_session_advance(pacasm_session* session, uint64_t budget) {
  if (!session) return fail(PACASM_INVALID_ARGUMENT, "session is required");
  return guarded([&] {
    session->session.advance(budget);
    return ok();
  });
}

pacasm_status pacasm_session_outcome(const pacasm_session* session, char** outcome) {
  if (!session || !outcome) return fail(PACASM_INVALID_ARGUMENT, "session and outcome are required");
  return guarded([&] {
    *outcome = dup(session->session.outcome_text());
    return ok();
  });
}

uint64_t pacasm_session_cycles(const pacasm_session* session) {
  return session ? session->session.machine().cycles : 0;
}

uint64_t pacasm_session_moves(const pacasm_session* session) { return session ? session->session.moves() : 0; }

uint64_t pacasm_session_digest(const pacasm_session* session) { return session ? session->session.digest() : 0; }

pacasm_status pacasm_session_events(const pacasm_session* session, char** events) {
  if (!session || !events) return fail(PACASM_INVALID_ARGUMENT, "session and events are required");
  return guarded([&] {
    std::string out;
    for (const auto& e : session->session.events()) out += machine::describe(e) + "\n";
    *events = dup(out);
    return ok();
  });
}

pacasm_status pacasm_session_render(const pacasm_session* session, char** grid) {
  if (!session || !grid) return fail(PACASM_INVALID_ARGUMENT, "session and grid are required");
  return guarded([&] {
    *grid = dup(session->session.world().render());
    return ok();
  });
}

pacasm_status pacasm_grade(const char* source, const char* origin, const char* stages_dir, const char* stage_id,
                           int64_t timestamp_ms, pacasm_report** report) {
  if (!source || !stages_dir || !stage_id || !report)
    return fail(PACASM_INVALID_ARGUMENT, "source, stages_dir, stage_id and report are required");
  *report = nullptr;
  return guarded([&] {
    try {
      const auto stage = grade::load_stage(stages_dir, stage_id);
      auto src = assembler::SourceUnit::from_text(source, origin ? origin : "inline");
      grade::GradeOptions opts;
      if (timestamp_ms >= 0) opts.timestamp_ms = timestamp_ms;
      auto r = grade::grade(src, stage, opts);
      *report = new pacasm_report{std::move(r), std::move(src)};
    } catch (const grade::StageError& e) {
      if (e.code() == "unknown-stage") return fail(PACASM_NOT_FOUND, e.what());
      if (e.code() == "io") return fail(PACASM_IO, e.what());
      return fail(PACASM_LOAD, e.what());
    }
    return ok();
  });
}

void pacasm_report_free(pacasm_report* report) { delete report; }

int pacasm_report_accepted(const pacasm_report* report) { return report && report->report.accepted() ? 1 : 0; }

pacasm_status pacasm_report_json(const pacasm_report* report, char** json) {
  if (!report || !json) return fail(PACASM_INVALID_ARGUMENT, "report and json are required");
  return guarded([&] {
    *json = dup(grade::to_json(report->report));
    return ok();
  });
}

pacasm_status pacasm_report_summary(const pacasm_report* report, char** summary) {
  if (!report || !summary) return fail(PACASM_INVALID_ARGUMENT, "report and summary are required");
  return guarded([&] {
    *summary = dup(summary_line(report->report));
    return ok();
  });
}

pacasm_status pacasm_report_feedback(const pacasm_report* report, char** feedback_text, char** notice) {
  if (!report || !feedback_text) return fail(PACASM_INVALID_ARGUMENT, "report and feedback are required");
  return guarded([&] {
    const auto ctx = feedback::FeedbackContext::from_report(report->report, report->source);
    if (!ctx) {
      *feedback_text = dup(feedback::fallback_template(grade::Failure::None));
      put(notice, "");
      return ok();
    }
    const auto bundle = feedback::build_prompt(*ctx);
    const auto config = feedback::TransportConfig::from_env();
    std::optional<feedback::HttpTransport> transport;
    if (config) transport.emplace(*config);
    const auto result = feedback::request_feedback(bundle, *ctx, transport ? &*transport : nullptr,
                                                   config ? config->api_key : std::string_view{});
    *feedback_text = dup(result.text);
    put(notice, result.notice);
    return ok();
  });
}

pacasm_status pacasm_report_prompt(const pacasm_report* report, char** prompt_json) {
  if (!report || !prompt_json) return fail(PACASM_INVALID_ARGUMENT, "report and prompt_json are required");
  return guarded([&] {
    const auto ctx = feedback::FeedbackContext::from_report(report->report, report->source);
    if (!ctx) return fail(PACASM_INVALID_ARGUMENT, "report was accepted; there is nothing to explain");
    const auto bundle = feedback::build_prompt(*ctx);
    nlohmann::ordered_json j;
    j["system"] = bundle.system;
    j["user"] = bundle.user;
    *prompt_json = dup(j.dump());
    return ok();
  });
}

pacasm_status pacasm_board_submit(const char* board_path, const char* student, const pacasm_report* report,
                                  uint32_t* rank) {
  if (!board_path || !student || !report || !rank)
    return fail(PACASM_INVALID_ARGUMENT, "board_path, student, report and rank are required");
  return guarded([&] {
    try {
      grade::Leaderboard board(board_path);
      *rank = board.submit(report->report, student);
    } catch (const grade::SubmissionRejected& e) {
      return fail(PACASM_REJECTED, e.what());
    } catch (const std::runtime_error& e) {
      return fail(PACASM_IO, e.what());
    }
    return ok();
  });
}

pacasm_status pacasm_board_standings(const char* board_path, const char* stage_id, char** jsonl) {
  if (!board_path || !stage_id || !jsonl)
    return fail(PACASM_INVALID_ARGUMENT, "board_path, stage_id and jsonl are required");
  return guarded([&] {
    std::string out;
    try {
      grade::Leaderboard board(board_path);
      uint32_t rank = 0;
      for (const auto& e : board.standings(stage_id)) {
        nlohmann::ordered_json j;
        j["rank"] = ++rank;
        j["student"] = e.student;
        j["stage"] = e.stage;
        j["cycles"] = e.cycles;
        j["ts"] = e.timestamp_ms;
        out += j.dump() + "\n";
      }
    } catch (const std::runtime_error& e) {
      return fail(PACASM_IO, e.what());
    }
    *jsonl = dup(out);
    return ok();
  });
}

pacasm_status pacasm_verify_stage_pack(const char* stages_dir, char** table) {
  if (!stages_dir) return fail(PACASM_INVALID_ARGUMENT, "stages_dir is required");
  return guarded([&] {
    const auto pack = grade::verify_stage_pack(stages_dir);
    put(table, pack.table());
    if (!pack.ok) return fail(PACASM_REJECTED, "stage pack verification failed");
    return ok();
  });
}

pacasm_status pacasm_host_create(const char* stages_dir, pacasm_host** host) {
  if (!stages_dir || !host) return fail(PACASM_INVALID_ARGUMENT, "stages_dir and host are required");
  return guarded([&] {
    *host = new pacasm_host{protocol::Host(stages_dir)};
    return ok();
  });
}

void pacasm_host_free(pacasm_host* host) { delete host; }

pacasm_status pacasm_host_open(pacasm_host* host, char** token) {
  if (!host || !token) return fail(PACASM_INVALID_ARGUMENT, "host and token are required");
  return guarded([&] {
    *token = dup(host->host.open());
    return ok();
  });
}

pacasm_status pacasm_host_close(pacasm_host* host, const char* token) {
  if (!host || !token) return fail(PACASM_INVALID_ARGUMENT, "host and token are required");
  return guarded([&] {
    if (!host->host.close(token)) return fail(PACASM_NOT_FOUND, std::string("no session `") + token + "`");
    return ok();
  });
}

pacasm_status pacasm_host_handle(pacasm_host* host, const char* token, const char* request, char** response) {
  if (!host || !token || !request || !response)
    return fail(PACASM_INVALID_ARGUMENT, "host, token, request and response are required");
  return guarded([&] {
    *response = dup(host->host.handle(token, request));
    return ok();
  });
}

}  // extern "C"
