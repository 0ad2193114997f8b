#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "asm/diagnostic.hpp"
#include "asm/isa.hpp"

namespace pacasm::assembler {

struct SourceUnit {
  std::vector<std::string> lines;  // line N is lines[N-1]
  std::string origin = "inline";

  static SourceUnit from_text(std::string_view text, std::string origin = "inline");
  std::string text() const;
};

enum class Section : uint8_t { Text, Data };

struct Operand {
  enum class Kind : uint8_t { Register, Immediate, Symbol, Memory, String };
  Kind kind = Kind::Immediate;
  uint8_t reg = 0;    // Register, or base register for Memory
  int64_t value = 0;  // Immediate, or offset for Memory
  std::string text;   // Symbol name or decoded String literal
  int column = 1;
  int end_column = 1;
};

enum class StatementKind : uint8_t { LabelDef, Directive, Instruction, Pseudo };

struct Statement {
  StatementKind kind = StatementKind::Instruction;
  std::string mnemonic;  // label name for LabelDef; ".word" etc. for directives
  std::vector<Operand> operands;
  int line = 1;
  int column = 1;
  Section section = Section::Text;
  uint32_t address = 0;
  uint32_t size = 0;  // bytes emitted
};

struct Symbol {
  uint32_t address = 0;
  Section section = Section::Text;
  int line = 0;

  friend bool operator==(const Symbol&, const Symbol&) = default;
};

using SymbolTable = std::map<std::string, Symbol, std::less<>>;

enum class ReferenceKind : uint8_t { Branch, Jump, Address };

// A use of a symbol; resolved == false means the symbol was undefined and the
// encoded field holds zero.
struct Reference {
  std::string symbol;
  ReferenceKind kind = ReferenceKind::Address;
  uint32_t site = 0;
  int line = 1;
  int column = 1;
  int end_column = 1;
  bool resolved = false;
};

struct Program {
  std::string origin = "inline";
  std::vector<Statement> statements;
  SymbolTable symbols;
  std::vector<uint8_t> text;  // big-endian words at kTextBase
  std::vector<uint8_t> data;  // at kDataBase
  std::map<uint32_t, int> line_map;  // text address -> source line
  std::vector<Reference> references;
  uint32_t entry = 0;
  int source_lines = 1;

  std::optional<int> line_of(uint32_t text_address) const;
  uint32_t word_at(uint32_t text_address) const;
};

struct AssembleResult {
  std::optional<Program> program;  // empty when any error was reported
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return program.has_value(); }
};

inline constexpr uint32_t kTextBase = 0x00000000;
inline constexpr uint32_t kTextLimit = 0x00010000;
inline constexpr uint32_t kDataBase = 0x00010000;
inline constexpr uint32_t kDataLimit = 0x00020000;

// Two passes: pass 1 parses, sizes, and places labels; pass 2 encodes.
AssembleResult assemble(const SourceUnit& src);

// Symbol definition and executable-target rules. Empty result means clean.
std::vector<Diagnostic> check_semantics(const Program& p);

// assemble() followed by check_semantics(); the program is dropped if either
// reported an error.
AssembleResult build(const SourceUnit& src);

std::string disassemble(uint32_t word, uint32_t addr, const SymbolTable& symbols);
std::string disassemble(const isa::Instruction& inst, uint32_t addr, const SymbolTable& symbols);

// "address  word  disassembly" per text word plus a symbol listing.
std::string listing(const Program& p);

}  // namespace pacasm::assembler
