// pacasm command-line front end. Everything goes through the C API.

#include <pthread.h>
#include <signal.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <thread>

#include <CLI11.hpp>
#include <httplib.h>
#include <json.hpp>

#include "pacasm/pacasm.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;
constexpr int kExitUsage = 2;

using json = nlohmann::ordered_json;

struct CString {
  char* p = nullptr;
  ~CString() { pacasm_free(p); }
  char** out() { return &p; }
  std::string str() const { return p ? p : ""; }
};

template <typename T, void (*Free)(T*)>
struct Handle {
  T* p = nullptr;
  ~Handle() { Free(p); }
  T** out() { return &p; }
};

using Program = Handle<pacasm_program, pacasm_program_free>;
using Session = Handle<pacasm_session, pacasm_session_free>;
using Report = Handle<pacasm_report, pacasm_report_free>;
using Host = Handle<pacasm_host, pacasm_host_free>;

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

bool write_file(const std::string& path, const uint8_t* data, size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(size));
  return static_cast<bool>(out);
}

std::string stages_dir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PACASM_STAGES"); env && *env) return env;
  return PACASM_DEFAULT_STAGES;
}

int io_error(const std::string& what) {
  std::cerr << "error: " << what << "\n";
  return kExitUsage;
}

void print_diagnostics(const std::string& jsonl, bool as_json) {
  std::istringstream in(jsonl);
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    if (as_json) {
      std::cerr << line << "\n";
      continue;
    }
    const auto d = json::parse(line);
    std::cerr << d.value("line", 0) << ":" << d.value("column", 0) << ": " << d.value("severity", "") << "["
              << d.value("code", "") << "]: " << d.value("message", "") << "\n";
  }
}

// Assembles `path`; diagnostics go to stderr. Returns an exit code on failure.
std::optional<int> assemble_file(const std::string& path, Program& program, bool json_diags) {
  const auto source = read_file(path);
  if (!source) return io_error("cannot read " + path);
  CString diags;
  const pacasm_status st = pacasm_assemble(source->c_str(), path.c_str(), program.out(), diags.out());
  if (json_diags) {
    print_diagnostics(diags.str(), true);
  } else {
    std::istringstream in(diags.str());
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      const auto d = json::parse(line);
      std::cerr << path << ":" << d.value("line", 0) << ":" << d.value("column", 0) << ": "
                << d.value("severity", "") << "[" << d.value("code", "") << "]: " << d.value("message", "")
                << "\n";
    }
  }
  if (st == PACASM_ASSEMBLE) return kExitDomain;
  if (st != PACASM_OK) return io_error(pacasm_last_error_message());
  return std::nullopt;
}

// ---- asm ----

struct AsmArgs {
  std::string file;
  std::string out;
  bool json_diagnostics = false;
};

int cmd_asm(const AsmArgs& a) {
  Program program;
  if (auto rc = assemble_file(a.file, program, a.json_diagnostics)) return *rc;
  CString listing;
  pacasm_program_listing(program.p, listing.out());
  std::cout << listing.str();
  if (!a.out.empty()) {
    size_t text_size = 0;
    size_t data_size = 0;
    const uint8_t* text = pacasm_program_text(program.p, &text_size);
    const uint8_t* data = pacasm_program_data(program.p, &data_size);
    if (!write_file(a.out, text, text_size)) return io_error("cannot write " + a.out);
    if (!write_file(a.out + ".data", data, data_size)) return io_error("cannot write " + a.out + ".data");
  }
  return kExitOk;
}

// ---- run ----

struct RunArgs {
  std::string file;
  std::string map;
  std::string stage;
  std::string stages;
  uint64_t seed = 0;
  bool seed_set = false;
  uint64_t budget = 10'000'000;
  bool trace = false;
};

// Map document from --map or the stage pack; sets the seed default from the
// stage's spec.txt when the stage is used.
std::optional<std::string> resolve_map(const std::string& map, const std::string& stage, const std::string& stages,
                                       uint64_t& seed, bool seed_set) {
  if (!map.empty()) return read_file(map);
  const std::string dir = stages_dir(stages) + "/" + stage;
  auto doc = read_file(dir + "/map.txt");
  if (doc && !seed_set) {
    if (auto spec = read_file(dir + "/spec.txt")) {
      std::istringstream in(*spec);
      for (std::string line; std::getline(in, line);) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(0, eq);
        key.erase(key.find_last_not_of(" \t") + 1);
        if (key != "seeds") continue;
        seed = std::strtoull(line.c_str() + eq + 1, nullptr, 0);
      }
    }
  }
  return doc;
}

int cmd_run(RunArgs a) {
  if (a.map.empty() == a.stage.empty()) return io_error("give exactly one of --map or --stage");
  const auto map = resolve_map(a.map, a.stage, a.stages, a.seed, a.seed_set);
  if (!map) return io_error(a.map.empty() ? "unknown stage `" + a.stage + "`" : "cannot read map " + a.map);
  Program program;
  if (auto rc = assemble_file(a.file, program, false)) return *rc;
  Session session;
  const pacasm_status st = pacasm_session_create(program.p, map->c_str(), a.seed, session.out());
  if (st != PACASM_OK) {
    std::cerr << "error: " << pacasm_last_error_message() << "\n";
    return kExitDomain;
  }
  pacasm_session_advance(session.p, a.budget);
  if (a.trace) {
    CString events;
    pacasm_session_events(session.p, events.out());
    std::cout << events.str();
  }
  CString outcome;
  pacasm_session_outcome(session.p, outcome.out());
  char digest[32];
  std::snprintf(digest, sizeof digest, "0x%016llx",
                static_cast<unsigned long long>(pacasm_session_digest(session.p)));
  std::cout << outcome.str() << ", cycles=" << pacasm_session_cycles(session.p)
            << ", moves=" << pacasm_session_moves(session.p) << ", digest=" << digest << "\n";
  return outcome.str() == "won" ? kExitOk : kExitDomain;
}

// ---- grade ----

struct GradeArgs {
  std::string file;
  std::string stage;
  std::string stages;
  std::string board;
  std::string student;
  bool feedback = false;
  bool json_out = false;
  int64_t timestamp = -1;
};

int cmd_grade(const GradeArgs& a) {
  const auto source = read_file(a.file);
  if (!source) return io_error("cannot read " + a.file);
  if (!a.board.empty() && a.student.empty()) return io_error("--board needs --student");
  Report report;
  const pacasm_status st =
      pacasm_grade(source->c_str(), a.file.c_str(), stages_dir(a.stages).c_str(), a.stage.c_str(), a.timestamp,
                   report.out());
  if (st != PACASM_OK) return io_error(pacasm_last_error_message());

  const bool accepted = pacasm_report_accepted(report.p) != 0;
  std::optional<uint32_t> rank;
  if (accepted && !a.board.empty()) {
    uint32_t r = 0;
    if (pacasm_board_submit(a.board.c_str(), a.student.c_str(), report.p, &r) != PACASM_OK)
      return io_error(pacasm_last_error_message());
    rank = r;
  }
  if (a.json_out) {
    CString js;
    pacasm_report_json(report.p, js.out());
    auto j = json::parse(js.str());
    if (rank) j["rank"] = *rank;
    std::cout << j.dump() << "\n";
  } else {
    CString summary;
    pacasm_report_summary(report.p, summary.out());
    std::cout << summary.str();
    if (rank) std::cout << ", rank=" << *rank;
    std::cout << "\n";
  }
  if (!accepted) {
    CString diags;
    CString js;
    pacasm_report_json(report.p, js.out());
    for (const auto& d : json::parse(js.str())["diagnostics"])
      std::cerr << a.file << ":" << d.value("line", 0) << ":" << d.value("column", 0) << ": "
                << d.value("severity", "") << "[" << d.value("code", "") << "]: " << d.value("message", "")
                << "\n";
  }
  if (!accepted && a.feedback) {
    CString text;
    CString notice;
    pacasm_report_feedback(report.p, text.out(), notice.out());
    if (!notice.str().empty()) std::cerr << "note: " << notice.str() << "\n";
    std::cout << "\n" << text.str();
  }
  return accepted ? kExitOk : kExitDomain;
}

// ---- board ----

int cmd_board(const std::string& board, const std::string& stage, bool json_out) {
  CString rows;
  if (pacasm_board_standings(board.c_str(), stage.c_str(), rows.out()) != PACASM_OK)
    return io_error(pacasm_last_error_message());
  if (json_out) {
    std::cout << rows.str();
    return kExitOk;
  }
  std::printf("%-6s %-20s %12s %16s\n", "rank", "student", "cycles", "timestamp");
  std::istringstream in(rows.str());
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto j = json::parse(line);
    std::printf("%-6u %-20s %12llu %16lld\n", j["rank"].get<unsigned>(), j["student"].get<std::string>().c_str(),
                static_cast<unsigned long long>(j["cycles"].get<uint64_t>()),
                static_cast<long long>(j["ts"].get<int64_t>()));
  }
  return kExitOk;
}

// ---- map ----

int cmd_map(const std::string& file, bool json_diags) {
  const auto doc = read_file(file);
  if (!doc) return io_error("cannot read " + file);
  CString diags;
  const pacasm_status st = pacasm_map_validate(doc->c_str(), diags.out());
  print_diagnostics(diags.str(), json_diags);
  if (st == PACASM_OK) {
    std::cout << file << ": valid\n";
    return kExitOk;
  }
  if (st == PACASM_LOAD) std::cerr << "error: " << pacasm_last_error_message() << "\n";
  return kExitDomain;
}

// ---- verify ----

int cmd_verify(const std::string& stages) {
  CString table;
  const pacasm_status st = pacasm_verify_stage_pack(stages_dir(stages).c_str(), table.out());
  std::cout << table.str();
  if (st == PACASM_OK) return kExitOk;
  if (st == PACASM_REJECTED) return kExitDomain;
  return io_error(pacasm_last_error_message());
}

// ---- debug ----

json call(pacasm_host* host, const std::string& token, const json& req) {
  CString resp;
  pacasm_host_handle(host, token.c_str(), req.dump().c_str(), resp.out());
  return json::parse(resp.str());
}

void print_state(const json& s) {
  std::cout << "pc=" << s["pc"].get<std::string>() << " cycles=" << s["cycles"] << " moves=" << s["moves"]
            << " outcome=" << s["outcome"].get<std::string>() << "\n";
}

constexpr const char* kDebugHelp =
    "commands:\n"
    "  s [n]          step forward n instructions (default 1)\n"
    "  b [n]          step backward n instructions (default 1)\n"
    "  r [budget]     run until a breakpoint or the end\n"
    "  bp ADDR        set a breakpoint     del ADDR   remove it\n"
    "  regs           registers            mem ADDR LEN   memory bytes\n"
    "  world          the map              last [n]   recent instructions\n"
    "  q              quit\n";

int cmd_debug(RunArgs a) {
  if (a.map.empty() == a.stage.empty()) return io_error("give exactly one of --map or --stage");
  const auto map = resolve_map(a.map, a.stage, a.stages, a.seed, a.seed_set);
  if (!map) return io_error(a.map.empty() ? "unknown stage `" + a.stage + "`" : "cannot read map " + a.map);
  const auto source = read_file(a.file);
  if (!source) return io_error("cannot read " + a.file);

  Host host;
  if (pacasm_host_create(stages_dir(a.stages).c_str(), host.out()) != PACASM_OK)
    return io_error(pacasm_last_error_message());
  CString token;
  pacasm_host_open(host.p, token.out());
  const std::string tok = token.str();

  json load = call(host.p, tok, {{"op", "load"}, {"source", *source}, {"map", *map}, {"seed", a.seed}});
  if (!load["ok"].get<bool>()) {
    std::cerr << "error: " << load["error"]["message"].get<std::string>() << "\n";
    for (const auto& d : load["error"].value("detail", json::array()))
      std::cerr << a.file << ":" << d.value("line", 0) << ": " << d.value("message", "") << "\n";
    return kExitDomain;
  }
  print_state(load["payload"]["state"]);
  std::cout << kDebugHelp;

  for (std::string line; std::cout << "(pacasm) " << std::flush, std::getline(std::cin, line);) {
    std::istringstream in(line);
    std::string cmd;
    in >> cmd;
    if (cmd.empty()) continue;
    if (cmd == "q" || cmd == "quit") break;
    std::string arg1;
    std::string arg2;
    in >> arg1 >> arg2;
    json req;
    if (cmd == "s" || cmd == "b" || cmd == "r") {
      req["op"] = cmd == "s" ? "step" : cmd == "b" ? "back" : "run";
      if (!arg1.empty()) req[cmd == "r" ? "budget" : "n"] = arg1;
    } else if (cmd == "bp" || cmd == "del") {
      req = {{"op", "breakpoint"}, {"addr", arg1}, {"on", cmd == "bp"}};
    } else if (cmd == "regs") {
      req = {{"op", "state"}, {"regions", json::array({{{"kind", "registers"}}})}};
    } else if (cmd == "mem") {
      req = {{"op", "state"},
             {"regions", json::array({{{"kind", "memory"}, {"addr", arg1}, {"len", arg2.empty() ? "64" : arg2}}})}};
    } else if (cmd == "last") {
      req = {{"op", "state"},
             {"regions", json::array({{{"kind", "last-instructions"}, {"n", arg1.empty() ? "16" : arg1}}})}};
    } else if (cmd == "world") {
      req = {{"op", "world"}};
    } else {
      std::cout << kDebugHelp;
      continue;
    }
    const json resp = call(host.p, tok, req);
    if (!resp["ok"].get<bool>()) {
      std::cout << "error[" << resp["error"]["code"].get<std::string>()
                << "]: " << resp["error"]["message"].get<std::string>() << "\n";
      continue;
    }
    const json& p = resp["payload"];
    const std::string op = req["op"];
    if (op == "step" || op == "back" || op == "run") {
      std::cout << p["steps"] << " step(s), " << p["reason"].get<std::string>() << "\n";
      if (p.contains("notice")) std::cout << "note: " << p["notice"].get<std::string>() << "\n";
      print_state(p["state"]);
    } else if (op == "breakpoint") {
      std::cout << "breakpoints:";
      for (const auto& b : p["breakpoints"]) std::cout << " " << b.get<std::string>();
      std::cout << "\n";
    } else if (op == "world") {
      static constexpr char kChars[] = "#P .GY=";
      for (const auto& row : p["tiles"]) {
        for (char c : row.get<std::string>()) std::cout << kChars[c - '0'];
        std::cout << "\n";
      }
      std::cout << "dots remaining " << p["dots_remaining"] << ", ticks " << p["ticks"] << "\n";
    } else {
      const json& region = p["regions"][0];
      if (region["kind"] == "registers") {
        int i = 0;
        for (const auto& [name, value] : region["regs"].items()) {
          std::printf("%-6s %s%s", name.c_str(), value.get<std::string>().c_str(), ++i % 4 == 0 ? "\n" : "   ");
        }
        std::printf("pc     %s\n", region["pc"].get<std::string>().c_str());
      } else if (region["kind"] == "memory") {
        const std::string bytes = region["bytes"];
        const auto base = std::strtoul(region["addr"].get<std::string>().c_str(), nullptr, 16);
        for (size_t i = 0; i < bytes.size(); i += 32) {
          std::printf("0x%08lx:", base + i / 2);
          for (size_t k = i; k < i + 32 && k < bytes.size(); k += 2) std::printf(" %s", bytes.substr(k, 2).c_str());
          std::printf("\n");
        }
      } else {
        for (const auto& ins : region["instructions"]) {
          std::printf("%s  %-28s line %s\n", ins["addr"].get<std::string>().c_str(),
                      ins["text"].get<std::string>().c_str(), ins["line"].is_null() ? "?" : ins["line"].dump().c_str());
        }
      }
    }
  }
  return kExitOk;
}

// ---- serve ----

int cmd_serve(const std::string& bind, int port, const std::string& stages) {
  // Signals are taken synchronously by a dedicated thread.
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &set, nullptr);

  Host host;
  if (pacasm_host_create(stages_dir(stages).c_str(), host.out()) != PACASM_OK)
    return io_error(pacasm_last_error_message());

  httplib::Server server;
  const auto send_json = [](httplib::Response& res, int status, const std::string& body) {
    res.status = status;
    res.set_content(body, "application/json");
  };
  server.Get("/health", [&](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, R"({"ok":true})");
  });
  server.Post("/session", [&](const httplib::Request&, httplib::Response& res) {
    CString token;
    pacasm_host_open(host.p, token.out());
    send_json(res, 200, json{{"ok", true}, {"payload", {{"token", token.str()}}}}.dump());
  });
  server.Post(R"(/session/([A-Za-z0-9]+))", [&](const httplib::Request& req, httplib::Response& res) {
    CString resp;
    pacasm_host_handle(host.p, req.matches[1].str().c_str(), req.body.c_str(), resp.out());
    send_json(res, 200, resp.str());
  });
  server.Delete(R"(/session/([A-Za-z0-9]+))", [&](const httplib::Request& req, httplib::Response& res) {
    if (pacasm_host_close(host.p, req.matches[1].str().c_str()) == PACASM_OK) {
      send_json(res, 200, R"({"ok":true,"payload":{}})");
    } else {
      send_json(res, 404,
                json{{"ok", false}, {"error", {{"code", "unknown-session"}, {"message", "no such session"}}}}.dump());
    }
  });

  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(bind);
  } else if (!server.bind_to_port(bind, port)) {
    bound = -1;
  }
  if (bound < 0) return io_error("cannot listen on " + bind + ":" + std::to_string(port));

  std::thread waiter([&] {
    int sig = 0;
    sigwait(&set, &sig);
    server.stop();
  });
  std::cout << "listening on http://" << bind << ":" << bound << std::endl;
  server.listen_after_bind();
  // Wake the waiter if the server stopped for another reason.
  pthread_kill(waiter.native_handle(), SIGTERM);
  waiter.join();
  std::cout << "shut down" << std::endl;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pacasm: assembler, emulator, grader and debugger for the Pac-Man assembly course"};
  app.require_subcommand(1);
  app.set_version_flag("--version", pacasm_version());

  AsmArgs asm_args;
  auto* asm_cmd = app.add_subcommand("asm", "Assemble a file and print its listing");
  asm_cmd->add_option("file", asm_args.file, "Assembly source")->required();
  asm_cmd->add_option("--out", asm_args.out, "Write the text image here and the data image to <out>.data");
  asm_cmd->add_flag("--json-diagnostics", asm_args.json_diagnostics, "Diagnostics as JSON lines on stderr");

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run a program on a map");
  run_cmd->add_option("file", run_args.file, "Assembly source")->required();
  run_cmd->add_option("--map", run_args.map, "Map document");
  run_cmd->add_option("--stage", run_args.stage, "Use the map and first seed of a bundled stage");
  run_cmd->add_option("--stages", run_args.stages, "Stage pack directory");
  auto* seed_opt = run_cmd->add_option("--seed", run_args.seed, "World seed");
  run_cmd->add_option("--budget", run_args.budget, "Step budget")->capture_default_str();
  run_cmd->add_flag("--trace", run_args.trace, "Print the event log");

  RunArgs dbg_args;
  auto* dbg_cmd = app.add_subcommand("debug", "Interactive time-travel debugger on standard input");
  dbg_cmd->add_option("file", dbg_args.file, "Assembly source")->required();
  dbg_cmd->add_option("--map", dbg_args.map, "Map document");
  dbg_cmd->add_option("--stage", dbg_args.stage, "Use the map of a bundled stage");
  dbg_cmd->add_option("--stages", dbg_args.stages, "Stage pack directory");
  auto* dbg_seed = dbg_cmd->add_option("--seed", dbg_args.seed, "World seed");

  GradeArgs grade_args;
  auto* grade_cmd = app.add_subcommand("grade", "Grade a submission against a stage");
  grade_cmd->add_option("file", grade_args.file, "Assembly source")->required();
  grade_cmd->add_option("--stage", grade_args.stage, "Stage id (stage1..stage5, optional)")->required();
  grade_cmd->add_option("--stages", grade_args.stages, "Stage pack directory");
  grade_cmd->add_option("--board", grade_args.board, "Leaderboard file to submit accepted runs to");
  grade_cmd->add_option("--student", grade_args.student, "Student id for the leaderboard");
  grade_cmd->add_flag("--feedback", grade_args.feedback, "Explain a rejection");
  grade_cmd->add_flag("--json", grade_args.json_out, "Print the report as JSON");
  grade_cmd->add_option("--timestamp", grade_args.timestamp, "Report timestamp in ms (default: now)");

  std::string board_path;
  std::string board_stage;
  bool board_json = false;
  auto* board_cmd = app.add_subcommand("board", "Show leaderboard standings");
  board_cmd->add_option("--board", board_path, "Leaderboard file")->required();
  board_cmd->add_option("--stage", board_stage, "Stage id")->required();
  board_cmd->add_flag("--json", board_json, "JSON lines output");

  std::string map_file;
  bool map_json = false;
  auto* map_cmd = app.add_subcommand("map", "Validate a map document");
  map_cmd->add_option("file", map_file, "Map document")->required();
  map_cmd->add_flag("--json-diagnostics", map_json, "Diagnostics as JSON lines on stderr");

  std::string verify_stages;
  auto* verify_cmd = app.add_subcommand("verify", "Grade every bundled reference solution");
  verify_cmd->add_option("--stages", verify_stages, "Stage pack directory");

  std::string serve_bind = "127.0.0.1";
  int serve_port = 8765;
  std::string serve_stages;
  auto* serve_cmd = app.add_subcommand("serve", "Serve the session protocol over HTTP");
  serve_cmd->add_option("--port", serve_port, "Port (0 picks a free one)")->capture_default_str();
  serve_cmd->add_option("--bind", serve_bind, "Address to listen on")->capture_default_str();
  serve_cmd->add_option("--stages", serve_stages, "Stage pack directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }

  if (asm_cmd->parsed()) return cmd_asm(asm_args);
  if (run_cmd->parsed()) {
    run_args.seed_set = seed_opt->count() > 0;
    return cmd_run(run_args);
  }
  if (dbg_cmd->parsed()) {
    dbg_args.seed_set = dbg_seed->count() > 0;
    return cmd_debug(dbg_args);
  }
  if (grade_cmd->parsed()) return cmd_grade(grade_args);
  if (board_cmd->parsed()) return cmd_board(board_path, board_stage, board_json);
  if (map_cmd->parsed()) return cmd_map(map_file, map_json);
  if (verify_cmd->parsed()) return cmd_verify(verify_stages);
  if (serve_cmd->parsed()) return cmd_serve(serve_bind, serve_port, serve_stages);
  return kExitUsage;
}
