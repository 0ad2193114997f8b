#include "asm/diagnostic.hpp"

#include <algorithm>

#include "json.hpp"

namespace pacasm {

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

std::string to_json(const Diagnostic& d) {
  nlohmann::ordered_json j;
  j["severity"] = d.severity == Severity::Error ? "error" : "warning";
  j["code"] = d.code;
  j["line"] = d.line;
  j["column"] = d.column;
  j["message"] = d.message;
  return j.dump();
}

std::string to_jsonl(const std::vector<Diagnostic>& diags) {
  std::string out;
  for (const auto& d : diags) {
    out += to_json(d);
    out += '\n';
  }
  return out;
}

std::string to_human(const Diagnostic& d, std::string_view origin) {
  std::string s(origin);
  s += ':' + std::to_string(d.line) + ':' + std::to_string(d.column) + ": ";
  s += d.severity == Severity::Error ? "error" : "warning";
  s += '[' + d.code + "]: " + d.message;
  return s;
}

}  // namespace pacasm
