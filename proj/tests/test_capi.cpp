#include <doctest.h>

#include <unistd.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include <json.hpp>

#include "../include/pacasm/pacasm.h"

namespace {

const std::string kStages = PACASM_STAGES;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Takes ownership of a library string.
std::string take(char* s) {
  REQUIRE(s != nullptr);
  std::string out(s);
  pacasm_free(s);
  return out;
}

const char* kStage1 = "main: li $t1, 0x30000\n li $t0, 4\n sw $t0, 0($t1)\n sw $t0, 0($t1)\n break\n";

}  // namespace

TEST_CASE("status names and version") {
  CHECK(std::string(pacasm_version()).size() > 0);
  CHECK(std::string(pacasm_status_name(PACASM_OK)) == "ok");
  CHECK(std::string(pacasm_status_name(PACASM_NOT_FOUND)) == "not-found");
  pacasm_free(nullptr);
  pacasm_program_free(nullptr);
  pacasm_session_free(nullptr);
  pacasm_report_free(nullptr);
  pacasm_host_free(nullptr);
}

TEST_CASE("assemble, inspect and disassemble") {
  pacasm_program* p = nullptr;
  char* diags = nullptr;
  REQUIRE(pacasm_assemble(kStage1, "s1.s", &p, &diags) == PACASM_OK);
  CHECK(take(diags).empty());
  size_t n = 0;
  const uint8_t* text = pacasm_program_text(p, &n);
  CHECK(n == 28);
  CHECK(text[0] == 0x3c);
  pacasm_program_data(p, &n);
  CHECK(n == 0);
  CHECK(pacasm_program_entry(p) == 0);
  char* listing = nullptr;
  REQUIRE(pacasm_program_listing(p, &listing) == PACASM_OK);
  CHECK(take(listing).find("break") != std::string::npos);
  char* dis = nullptr;
  REQUIRE(pacasm_disassemble(0x8d2a0004u, 0, p, &dis) == PACASM_OK);
  CHECK(take(dis) == "lw $t2, 4($t1)");
  pacasm_program_free(p);

  p = nullptr;
  REQUIRE(pacasm_assemble("main: addi $t0\n bogus\n", "bad.s", &p, &diags) == PACASM_ASSEMBLE);
  CHECK(p == nullptr);
  const auto lines = take(diags);
  CHECK(std::count(lines.begin(), lines.end(), '\n') >= 2);
  CHECK(nlohmann::json::parse(lines.substr(0, lines.find('\n')))["severity"] == "error");
  CHECK(std::string(pacasm_last_error_message()).size() > 0);

  CHECK(pacasm_assemble(nullptr, nullptr, &p, nullptr) == PACASM_INVALID_ARGUMENT);
  CHECK(pacasm_assemble(kStage1, nullptr, nullptr, nullptr) == PACASM_INVALID_ARGUMENT);
}

TEST_CASE("maps and sessions") {
  char* diags = nullptr;
  CHECK(pacasm_map_validate("#####\n#P..#\n#####\n", &diags) == PACASM_OK);
  CHECK(take(diags).empty());
  CHECK(pacasm_map_validate("#####\n#P..#\n####\n", &diags) == PACASM_MAP);
  CHECK(take(diags).find("ragged") != std::string::npos);

  pacasm_program* p = nullptr;
  REQUIRE(pacasm_assemble(kStage1, nullptr, &p, nullptr) == PACASM_OK);
  pacasm_session* s = nullptr;
  CHECK(pacasm_session_create(p, "#####\n#...#\n#####\n", 0, &s) == PACASM_MAP);
  CHECK(s == nullptr);
  REQUIRE(pacasm_session_create(p, "#####\n#P..#\n#####\n", 0, &s) == PACASM_OK);
  pacasm_program_free(p);  // the session keeps its own copy
  char* out = nullptr;
  REQUIRE(pacasm_session_outcome(s, &out) == PACASM_OK);
  CHECK(take(out) == "running");
  REQUIRE(pacasm_session_advance(s, 1000) == PACASM_OK);
  REQUIRE(pacasm_session_outcome(s, &out) == PACASM_OK);
  CHECK(take(out) == "won");
  CHECK(pacasm_session_cycles(s) == 6);
  CHECK(pacasm_session_moves(s) == 2);
  CHECK(pacasm_session_digest(s) == 0xaaabff968029dd2dULL);
  REQUIRE(pacasm_session_events(s, &out) == PACASM_OK);
  CHECK(take(out).find("won at (1,3)") != std::string::npos);
  REQUIRE(pacasm_session_render(s, &out) == PACASM_OK);
  CHECK(take(out) == "#####\n#  P#\n#####\n");
  pacasm_session_free(s);
}

TEST_CASE("grading, feedback and the leaderboard") {
  pacasm_report* r = nullptr;
  REQUIRE(pacasm_grade(kStage1, "s1.s", kStages.c_str(), "stage1", 1000, &r) == PACASM_OK);
  CHECK(pacasm_report_accepted(r) == 1);
  char* out = nullptr;
  REQUIRE(pacasm_report_summary(r, &out) == PACASM_OK);
  CHECK(take(out) == "accepted, cycles=6");
  REQUIRE(pacasm_report_json(r, &out) == PACASM_OK);
  const auto j = nlohmann::json::parse(take(out));
  CHECK(j["cycles"] == 6);
  CHECK(j["timestamp"] == 1000);

  const auto dir = std::filesystem::temp_directory_path() / ("pacasm_capi_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto board = (dir / "board.jsonl").string();
  uint32_t rank = 0;
  REQUIRE(pacasm_board_submit(board.c_str(), "alice", r, &rank) == PACASM_OK);
  CHECK(rank == 1);
  REQUIRE(pacasm_report_feedback(r, &out, nullptr) == PACASM_OK);
  CHECK(take(out).find("accepted") != std::string::npos);
  CHECK(pacasm_report_prompt(r, &out) == PACASM_INVALID_ARGUMENT);
  pacasm_report_free(r);

  REQUIRE(pacasm_grade("main: break\n", nullptr, kStages.c_str(), "stage1", 2000, &r) == PACASM_OK);
  CHECK(pacasm_report_accepted(r) == 0);
  REQUIRE(pacasm_report_summary(r, &out) == PACASM_OK);
  CHECK(take(out) == "runtime-failure, no-movement-commands, cycles=1");
  CHECK(pacasm_board_submit(board.c_str(), "bob", r, &rank) == PACASM_REJECTED);
  ::unsetenv("PACASM_LLM_ENDPOINT");
  char* notice = nullptr;
  REQUIRE(pacasm_report_feedback(r, &out, &notice) == PACASM_OK);
  CHECK(take(out).rfind("Outcome: no-movement-commands", 0) == 0);
  CHECK(take(notice).empty());
  REQUIRE(pacasm_report_prompt(r, &out) == PACASM_OK);
  const auto prompt = nlohmann::json::parse(take(out));
  CHECK(prompt["user"].get<std::string>().find("Failure: no-movement-commands") != std::string::npos);
  pacasm_report_free(r);

  REQUIRE(pacasm_board_standings(board.c_str(), "stage1", &out) == PACASM_OK);
  const auto first = nlohmann::ordered_json::parse(take(out));
  CHECK(first["rank"] == 1);
  CHECK(first["student"] == "alice");
  CHECK(pacasm_grade(kStage1, nullptr, kStages.c_str(), "stage7", 0, &r) == PACASM_NOT_FOUND);
  std::filesystem::remove_all(dir);
}

TEST_CASE("stage pack and protocol host") {
  char* table = nullptr;
  REQUIRE(pacasm_verify_stage_pack(kStages.c_str(), &table) == PACASM_OK);
  CHECK(take(table).find("stage4/reference_parity") != std::string::npos);

  pacasm_host* h = nullptr;
  REQUIRE(pacasm_host_create(kStages.c_str(), &h) == PACASM_OK);
  char* token = nullptr;
  REQUIRE(pacasm_host_open(h, &token) == PACASM_OK);
  const auto t = take(token);
  char* resp = nullptr;
  const std::string load = nlohmann::json{{"op", "load"}, {"stage", "stage1"}, {"source", kStage1}}.dump();
  REQUIRE(pacasm_host_handle(h, t.c_str(), load.c_str(), &resp) == PACASM_OK);
  CHECK(nlohmann::json::parse(take(resp))["ok"] == true);
  REQUIRE(pacasm_host_handle(h, t.c_str(), R"({"op":"run"})", &resp) == PACASM_OK);
  CHECK(nlohmann::json::parse(take(resp))["payload"]["state"]["outcome"] == "won");
  REQUIRE(pacasm_host_handle(h, "nope", R"({"op":"run"})", &resp) == PACASM_OK);
  CHECK(nlohmann::json::parse(take(resp))["error"]["code"] == "unknown-session");
  CHECK(pacasm_host_close(h, t.c_str()) == PACASM_OK);
  CHECK(pacasm_host_close(h, t.c_str()) == PACASM_NOT_FOUND);
  pacasm_host_free(h);
}
