#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pacasm {

enum class Severity { Error, Warning };

// Shared by the assembler and the map parser.
struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  int line = 1;
  int column = 1;
  int end_column = 1;

  friend bool operator==(const Diagnostic&, const Diagnostic&) = default;
};

bool has_errors(const std::vector<Diagnostic>& diags);

// One {severity, code, line, column, message} JSON object per line.
std::string to_jsonl(const std::vector<Diagnostic>& diags);
std::string to_json(const Diagnostic& d);

// "origin:line:column: error[code]: message"
std::string to_human(const Diagnostic& d, std::string_view origin);

}  // namespace pacasm
