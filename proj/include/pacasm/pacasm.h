/* C interface to the pacasm core: assembler, emulator, grid world, grader,
 * leaderboard, feedback and the session protocol host.
 *
 * Strings returned through char** out-parameters are heap allocated and must
 * be released with pacasm_free(). Handles are released with their matching
 * *_free() function; passing NULL to any *_free() is a no-op. After a call
 * fails, pacasm_last_error_message() describes the failure on the calling
 * thread. */
#ifndef PACASM_PACASM_H
#define PACASM_PACASM_H

#include <stddef.h>
#include <stdint.h>

#if defined(PACASM_BUILDING_LIBRARY)
#define PACASM_API __attribute__((visibility("default")))
#else
#define PACASM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pacasm_status {
  PACASM_OK = 0,
  PACASM_INVALID_ARGUMENT = 1,
  PACASM_ASSEMBLE = 2, /* source has errors; diagnostics are returned */
  PACASM_MAP = 3,      /* map document has errors */
  PACASM_LOAD = 4,     /* program or world could not be initialized */
  PACASM_IO = 5,
  PACASM_NOT_FOUND = 6, /* unknown stage id or session token */
  PACASM_REJECTED = 7,  /* leaderboard refused a rejected report */
  PACASM_PROTOCOL = 8,
  PACASM_INTERNAL = 9
} pacasm_status;

typedef struct pacasm_program pacasm_program;
typedef struct pacasm_session pacasm_session;
typedef struct pacasm_report pacasm_report;
typedef struct pacasm_host pacasm_host;

PACASM_API const char* pacasm_version(void);
PACASM_API const char* pacasm_status_name(pacasm_status status);
/* Message for the last failed call on this thread; "" when none. */
PACASM_API const char* pacasm_last_error_message(void);
PACASM_API void pacasm_free(char* s);

/* ---- assembler ---- */

/* Assembles and checks `source`. On PACASM_ASSEMBLE *program stays NULL.
 * diagnostics_jsonl, when non-NULL, receives one JSON object per line for
 * every diagnostic, warnings included. */
PACASM_API pacasm_status pacasm_assemble(const char* source, const char* origin, pacasm_program** program,
                                         char** diagnostics_jsonl);
PACASM_API void pacasm_program_free(pacasm_program* program);
/* Big-endian images; the pointers live as long as the program. */
PACASM_API const uint8_t* pacasm_program_text(const pacasm_program* program, size_t* size);
PACASM_API const uint8_t* pacasm_program_data(const pacasm_program* program, size_t* size);
PACASM_API uint32_t pacasm_program_entry(const pacasm_program* program);
/* Address, word and disassembly per text word, then the symbol table. */
PACASM_API pacasm_status pacasm_program_listing(const pacasm_program* program, char** listing);
/* Disassembles one word; symbols of `program` are used when non-NULL. */
PACASM_API pacasm_status pacasm_disassemble(uint32_t word, uint32_t addr, const pacasm_program* program,
                                            char** text);

/* ---- maps ---- */

/* PACASM_OK for a valid map; diagnostics as for pacasm_assemble. */
PACASM_API pacasm_status pacasm_map_validate(const char* map_document, char** diagnostics_jsonl);

/* ---- sessions ---- */

PACASM_API pacasm_status pacasm_session_create(const pacasm_program* program, const char* map_document,
                                               uint64_t seed, pacasm_session** session);
PACASM_API void pacasm_session_free(pacasm_session* session);
/* Runs until the session finishes or `budget` steps have executed. */
PACASM_API pacasm_status pacasm_session_advance(pacasm_session* session, uint64_t budget);
/* "won", "captured", "break", "pc-left-text", "step-limit-exceeded",
 * "fault(<kind>)" or "running". */
PACASM_API pacasm_status pacasm_session_outcome(const pacasm_session* session, char** outcome);
PACASM_API uint64_t pacasm_session_cycles(const pacasm_session* session);
PACASM_API uint64_t pacasm_session_moves(const pacasm_session* session);
PACASM_API uint64_t pacasm_session_digest(const pacasm_session* session);
/* Event log, one human-readable entry per line. */
PACASM_API pacasm_status pacasm_session_events(const pacasm_session* session, char** events);
/* Current map characters, one row per line. */
PACASM_API pacasm_status pacasm_session_render(const pacasm_session* session, char** grid);

/* ---- grading ---- */

/* Grades `source` against stage `stage_id` of the pack in `stages_dir`.
 * timestamp_ms < 0 uses the wall clock. PACASM_OK means a report was
 * produced, accepted or not. */
PACASM_API pacasm_status pacasm_grade(const char* source, const char* origin, const char* stages_dir,
                                      const char* stage_id, int64_t timestamp_ms, pacasm_report** report);
PACASM_API void pacasm_report_free(pacasm_report* report);
PACASM_API int pacasm_report_accepted(const pacasm_report* report);
PACASM_API pacasm_status pacasm_report_json(const pacasm_report* report, char** json);
/* Human one-line summary, e.g. "accepted, cycles=6" or
 * "runtime-failure, captured-by-ghost, cycles=12". */
PACASM_API pacasm_status pacasm_report_summary(const pacasm_report* report, char** summary);
/* Feedback for a rejected report: the configured chat endpoint when the
 * PACASM_LLM_* environment is set, otherwise built-in guidance. `notice`
 * may be NULL; it receives "" or a degradation notice. */
PACASM_API pacasm_status pacasm_report_feedback(const pacasm_report* report, char** feedback, char** notice);
/* The prompt that feedback would send, as {"system": ..., "user": ...}. */
PACASM_API pacasm_status pacasm_report_prompt(const pacasm_report* report, char** prompt_json);

/* ---- leaderboard ---- */

PACASM_API pacasm_status pacasm_board_submit(const char* board_path, const char* student,
                                             const pacasm_report* report, uint32_t* rank);
/* Best entry per student for the stage, in rank order, one JSON object per
 * line with a leading "rank" field. */
PACASM_API pacasm_status pacasm_board_standings(const char* board_path, const char* stage_id, char** jsonl);

/* ---- stage pack ---- */

/* PACASM_OK when every reference is accepted, PACASM_REJECTED otherwise;
 * `table` receives the per-stage results either way. */
PACASM_API pacasm_status pacasm_verify_stage_pack(const char* stages_dir, char** table);

/* ---- session protocol ---- */

PACASM_API pacasm_status pacasm_host_create(const char* stages_dir, pacasm_host** host);
PACASM_API void pacasm_host_free(pacasm_host* host);
/* Opens a protocol session and returns its token. */
PACASM_API pacasm_status pacasm_host_open(pacasm_host* host, char** token);
PACASM_API pacasm_status pacasm_host_close(pacasm_host* host, const char* token);
/* Handles one JSON request; protocol-level errors are reported inside the
 * response, so this returns PACASM_OK whenever a response was produced. */
PACASM_API pacasm_status pacasm_host_handle(pacasm_host* host, const char* token, const char* request,
                                            char** response);

#ifdef __cplusplus
}
#endif

#endif /* PACASM_PACASM_H */
