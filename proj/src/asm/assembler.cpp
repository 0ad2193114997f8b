#include "asm/assembler.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <limits>
#include <sstream>

#include "common/hash.hpp"
#include "common/text.hpp"

namespace pacasm::assembler {

using isa::Format;
using isa::Instruction;
using isa::Op;

SourceUnit SourceUnit::from_text(std::string_view text, std::string origin) {
  SourceUnit u;
  u.lines = text::split_lines(text);
  u.origin = std::move(origin);
  return u;
}

std::string SourceUnit::text() const {
  std::string s;
  for (const auto& l : lines) {
    s += l;
    s += '\n';
  }
  return s;
}

std::optional<int> Program::line_of(uint32_t text_address) const {
  auto it = line_map.find(text_address);
  if (it == line_map.end()) return std::nullopt;
  return it->second;
}

uint32_t Program::word_at(uint32_t text_address) const {
  const size_t off = text_address - kTextBase;
  if (off + 4 > text.size()) return 0;
  return (uint32_t{text[off]} << 24) | (uint32_t{text[off + 1]} << 16) |
         (uint32_t{text[off + 2]} << 8) | uint32_t{text[off + 3]};
}

namespace {

enum class Pseudo : uint8_t { Li, La, Move, Nop, B, Blt, Bgt, Ble, Bge };

struct PseudoInfo {
  Pseudo op;
  std::string_view mnemonic;
};

constexpr PseudoInfo kPseudos[] = {
    {Pseudo::Li, "li"},   {Pseudo::La, "la"},   {Pseudo::Move, "move"},
    {Pseudo::Nop, "nop"}, {Pseudo::B, "b"},     {Pseudo::Blt, "blt"},
    {Pseudo::Bgt, "bgt"}, {Pseudo::Ble, "ble"}, {Pseudo::Bge, "bge"},
};

std::optional<Pseudo> lookup_pseudo(std::string_view m) {
  for (const auto& p : kPseudos)
    if (p.mnemonic == m) return p.op;
  return std::nullopt;
}

bool is_ident_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}
bool is_ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.';
}

// Removes '#' and '//' comments outside of string and character literals.
std::string_view strip_comment(std::string_view line) {
  bool in_string = false;
  for (size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') {
      in_string = true;
    } else if (c == '\'' && i + 2 < line.size() && line[i + 2] == '\'') {
      i += 2;
    } else if (c == '#' || (c == '/' && i + 1 < line.size() && line[i + 1] == '/')) {
      return line.substr(0, i);
    }
  }
  return line;
}

struct RawToken {
  std::string text;
  int column;  // 1-based
};

// Splits operands on commas outside quotes and parentheses.
std::vector<RawToken> split_operands(std::string_view s, int base_column) {
  std::vector<RawToken> out;
  size_t start = 0;
  int depth = 0;
  bool in_string = false;
  auto flush = [&](size_t end) {
    std::string_view piece = s.substr(start, end - start);
    size_t lead = 0;
    while (lead < piece.size() && std::isspace(static_cast<unsigned char>(piece[lead]))) ++lead;
    out.push_back({std::string(text::trim(piece)), base_column + static_cast<int>(start + lead)});
  };
  for (size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (in_string) {
      if (c == '\\') ++i;
      else if (c == '"') in_string = false;
      continue;
    }
    if (c == '"') in_string = true;
    else if (c == '(') ++depth;
    else if (c == ')') --depth;
    else if (c == ',' && depth == 0) {
      flush(i);
      start = i + 1;
    }
  }
  flush(s.size());
  if (out.size() == 1 && out[0].text.empty()) out.clear();
  return out;
}

std::optional<std::string> decode_string(std::string_view lit) {
  if (lit.size() < 2 || lit.front() != '"' || lit.back() != '"') return std::nullopt;
  std::string r;
  for (size_t i = 1; i + 1 < lit.size(); ++i) {
    char c = lit[i];
    if (c == '"') return std::nullopt;
    if (c == '\\') {
      if (i + 2 >= lit.size()) return std::nullopt;
      switch (lit[++i]) {
        case 'n': c = '\n'; break;
        case 't': c = '\t'; break;
        case 'r': c = '\r'; break;
        case '0': c = '\0'; break;
        case '\\': c = '\\'; break;
        case '"': c = '"'; break;
        case '\'': c = '\''; break;
        default: return std::nullopt;
      }
    }
    r += c;
  }
  return r;
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !is_ident_start(s[0])) return false;
  return std::all_of(s.begin() + 1, s.end(), is_ident_char);
}

class Assembler {
 public:
  explicit Assembler(const SourceUnit& src) : src_(src) {}

  AssembleResult run() {
    program_.origin = src_.origin;
    program_.source_lines = static_cast<int>(src_.lines.size());
    pass1();
    if (!has_errors(diags_)) pass2();
    AssembleResult r;
    std::stable_sort(diags_.begin(), diags_.end(), [](const Diagnostic& a, const Diagnostic& b) {
      return a.line < b.line;
    });
    r.diagnostics = std::move(diags_);
    if (!has_errors(r.diagnostics)) r.program = std::move(program_);
    return r;
  }

 private:
  void error(int line, int col, int end_col, std::string code, std::string msg) {
    diags_.push_back({Severity::Error, std::move(code), std::move(msg), line, col, end_col});
  }
  void warning(int line, int col, int end_col, std::string code, std::string msg) {
    diags_.push_back({Severity::Warning, std::move(code), std::move(msg), line, col, end_col});
  }
  void error(const Operand& o, int line, std::string code, std::string msg) {
    error(line, o.column, o.end_column, std::move(code), std::move(msg));
  }

  // ---- pass 1 -------------------------------------------------------------

  std::optional<Operand> parse_operand(const RawToken& tok, int line) {
    Operand o;
    o.column = tok.column;
    o.end_column = tok.column + static_cast<int>(tok.text.size());
    const std::string& t = tok.text;
    if (t.empty()) {
      error(line, tok.column, tok.column, "malformed-operand", "empty operand");
      return std::nullopt;
    }
    if (t.front() == '"') {
      auto s = decode_string(t);
      if (!s) {
        error(o, line, "bad-string", "malformed string literal " + t);
        return std::nullopt;
      }
      o.kind = Operand::Kind::String;
      o.text = *s;
      return o;
    }
    if (auto lp = t.find('('); lp != std::string::npos) {
      if (t.back() != ')') {
        error(o, line, "malformed-operand", "expected offset($reg), got '" + t + "'");
        return std::nullopt;
      }
      std::string_view off = text::trim(std::string_view(t).substr(0, lp));
      std::string reg = text::to_lower(text::trim(std::string_view(t).substr(lp + 1, t.size() - lp - 2)));
      auto r = isa::parse_register(reg);
      if (!r) {
        error(o, line, "unknown-register", "unknown base register '" + reg + "'");
        return std::nullopt;
      }
      int64_t v = 0;
      if (!off.empty()) {
        auto n = text::parse_integer(off);
        if (!n) {
          error(o, line, "malformed-operand", "memory offset must be an integer, got '" +
                                                  std::string(off) + "'");
          return std::nullopt;
        }
        v = *n;
      }
      o.kind = Operand::Kind::Memory;
      o.reg = *r;
      o.value = v;
      note_register_use(*r, reg, o, line);
      return o;
    }
    if (t.front() == '$') {
      std::string lower = text::to_lower(t);
      auto r = isa::parse_register(lower);
      if (!r) {
        error(o, line, "unknown-register", "unknown register '" + t + "'");
        return std::nullopt;
      }
      o.kind = Operand::Kind::Register;
      o.reg = *r;
      note_register_use(*r, lower, o, line);
      return o;
    }
    if (auto n = text::parse_integer(t)) {
      o.kind = Operand::Kind::Immediate;
      o.value = *n;
      return o;
    }
    if (is_identifier(t)) {
      o.kind = Operand::Kind::Symbol;
      o.text = t;
      return o;
    }
    error(o, line, "malformed-operand", "cannot parse operand '" + t + "'");
    return std::nullopt;
  }

  void note_register_use(uint8_t reg, const std::string&, const Operand& o, int line) {
    if (reg == isa::kAt)
      warning(line, o.column, o.end_column, "reserved-register",
              "$at is the assembler temporary; pseudo-instructions overwrite it");
  }

  Section& section() { return section_; }
  uint32_t& counter() { return section_ == Section::Text ? text_pc_ : data_pc_; }
  uint32_t base() const { return section_ == Section::Text ? kTextBase : kDataBase; }
  uint32_t limit() const { return section_ == Section::Text ? kTextLimit - kTextBase : kDataLimit - kDataBase; }

  void flush_labels() {
    for (auto& [name, line] : pending_labels_) define_label(name, line, base() + counter());
    pending_labels_.clear();
  }

  void define_label(const std::string& name, std::pair<int, int> pos, uint32_t addr) {
    auto [line, col] = pos;
    if (program_.symbols.count(name)) {
      error(line, col, col + static_cast<int>(name.size()), "duplicate-label",
            "label '" + name + "' already defined on line " +
                std::to_string(program_.symbols.at(name).line));
      return;
    }
    program_.symbols[name] = Symbol{addr, section_, line};
  }

  bool reserve(Statement& st, uint32_t bytes, uint32_t align = 1) {
    uint32_t& pc = counter();
    uint32_t pad = (align - pc % align) % align;
    if (pad && st.section == Section::Data) {
      Statement padding;
      padding.kind = StatementKind::Directive;
      padding.mnemonic = ".space";
      padding.line = st.line;
      padding.section = Section::Data;
      padding.address = base() + pc;
      padding.size = pad;
      padding.operands.push_back(Operand{Operand::Kind::Immediate, 0, pad, {}, st.column, st.column});
      pc += pad;
      program_.statements.push_back(std::move(padding));
    }
    flush_labels();
    st.address = base() + pc;
    st.size = bytes;
    if (uint64_t{pc} + bytes > limit()) {
      if (!overflow_reported_[static_cast<int>(section_)]) {
        error(st.line, st.column, st.column + static_cast<int>(st.mnemonic.size()),
              "section-overflow",
              std::string(section_ == Section::Text ? ".text" : ".data") + " section exceeds " +
                  std::to_string(limit()) + " bytes");
        overflow_reported_[static_cast<int>(section_)] = true;
      }
      return false;
    }
    pc += bytes;
    return true;
  }

  bool expect_count(const Statement& st, size_t lo, size_t hi, std::string_view what) {
    const size_t n = st.operands.size();
    if (n >= lo && n <= hi) return true;
    error(st.line, st.column, st.column + static_cast<int>(st.mnemonic.size()), "operand-count",
          "'" + st.mnemonic + "' expects " + std::string(what) + ", got " + std::to_string(n) +
              " operand(s)");
    return false;
  }

  bool expect_kind(const Statement& st, size_t i, std::initializer_list<Operand::Kind> kinds,
                   std::string_view what) {
    const Operand& o = st.operands[i];
    for (auto k : kinds)
      if (o.kind == k) return true;
    error(o, st.line, "malformed-operand",
          "operand " + std::to_string(i + 1) + " of '" + st.mnemonic + "' must be " + std::string(what));
    return false;
  }

  using K = Operand::Kind;

  // Returns the byte size of an instruction or pseudo-instruction, or
  // nullopt after reporting a shape error.
  std::optional<uint32_t> size_instruction(const Statement& st) {
    if (auto op = isa::lookup(st.mnemonic)) {
      switch (isa::info(*op).format) {
        case Format::R3:
        case Format::ShiftVar:
          if (!expect_count(st, 3, 3, "three registers")) return std::nullopt;
          for (size_t i = 0; i < 3; ++i)
            if (!expect_kind(st, i, {K::Register}, "a register")) return std::nullopt;
          break;
        case Format::Shift:
          if (!expect_count(st, 3, 3, "rd, rt, shift-amount")) return std::nullopt;
          if (!expect_kind(st, 0, {K::Register}, "a register") ||
              !expect_kind(st, 1, {K::Register}, "a register") ||
              !expect_kind(st, 2, {K::Immediate}, "an integer shift amount"))
            return std::nullopt;
          break;
        case Format::JumpReg:
          if (!expect_count(st, 1, 1, "one register") ||
              !expect_kind(st, 0, {K::Register}, "a register"))
            return std::nullopt;
          break;
        case Format::JumpLink:
          if (!expect_count(st, 1, 2, "[rd,] rs")) return std::nullopt;
          for (size_t i = 0; i < st.operands.size(); ++i)
            if (!expect_kind(st, i, {K::Register}, "a register")) return std::nullopt;
          break;
        case Format::ArithImm:
        case Format::LogicImm:
          if (!expect_count(st, 3, 3, "rt, rs, immediate")) return std::nullopt;
          if (!expect_kind(st, 0, {K::Register}, "a register") ||
              !expect_kind(st, 1, {K::Register}, "a register") ||
              !expect_kind(st, 2, {K::Immediate}, "an integer immediate"))
            return std::nullopt;
          break;
        case Format::Lui:
          if (!expect_count(st, 2, 2, "rt, immediate")) return std::nullopt;
          if (!expect_kind(st, 0, {K::Register}, "a register") ||
              !expect_kind(st, 1, {K::Immediate}, "an integer immediate"))
            return std::nullopt;
          break;
        case Format::Memory:
          if (!expect_count(st, 2, 2, "rt, offset(base)")) return std::nullopt;
          if (!expect_kind(st, 0, {K::Register}, "a register") ||
              !expect_kind(st, 1, {K::Memory}, "offset(base)"))
            return std::nullopt;
          break;
        case Format::Branch:
          if (!expect_count(st, 3, 3, "rs, rt, target")) return std::nullopt;
          if (!expect_kind(st, 0, {K::Register}, "a register") ||
              !expect_kind(st, 1, {K::Register}, "a register") ||
              !expect_kind(st, 2, {K::Symbol, K::Immediate}, "a label or address"))
            return std::nullopt;
          break;
        case Format::Jump:
          if (!expect_count(st, 1, 1, "a target") ||
              !expect_kind(st, 0, {K::Symbol, K::Immediate}, "a label or address"))
            return std::nullopt;
          break;
        case Format::Halt:
          if (!expect_count(st, 0, 0, "no operands")) return std::nullopt;
          break;
      }
      return 4;
    }
    auto ps = lookup_pseudo(st.mnemonic);
    if (!ps) return std::nullopt;
    switch (*ps) {
      case Pseudo::Li:
        if (!expect_count(st, 2, 2, "rt, immediate") ||
            !expect_kind(st, 0, {K::Register}, "a register") ||
            !expect_kind(st, 1, {K::Immediate}, "an integer immediate"))
          return std::nullopt;
        return 8;
      case Pseudo::La:
        if (!expect_count(st, 2, 2, "rt, label") ||
            !expect_kind(st, 0, {K::Register}, "a register") ||
            !expect_kind(st, 1, {K::Symbol, K::Immediate}, "a label or address"))
          return std::nullopt;
        return 8;
      case Pseudo::Move:
        if (!expect_count(st, 2, 2, "rd, rs") || !expect_kind(st, 0, {K::Register}, "a register") ||
            !expect_kind(st, 1, {K::Register}, "a register"))
          return std::nullopt;
        return 4;
      case Pseudo::Nop:
        if (!expect_count(st, 0, 0, "no operands")) return std::nullopt;
        return 4;
      case Pseudo::B:
        if (!expect_count(st, 1, 1, "a target") ||
            !expect_kind(st, 0, {K::Symbol, K::Immediate}, "a label or address"))
          return std::nullopt;
        return 4;
      case Pseudo::Blt:
      case Pseudo::Bgt:
      case Pseudo::Ble:
      case Pseudo::Bge: {
        if (!expect_count(st, 3, 3, "rs, rt|immediate, target") ||
            !expect_kind(st, 0, {K::Register}, "a register") ||
            !expect_kind(st, 1, {K::Register, K::Immediate}, "a register or integer") ||
            !expect_kind(st, 2, {K::Symbol, K::Immediate}, "a label or address"))
          return std::nullopt;
        if (st.operands[1].kind == K::Register) return 8;
        return (*ps == Pseudo::Blt || *ps == Pseudo::Bge) ? 8 : 12;
      }
    }
    return std::nullopt;
  }

  void directive(Statement& st) {
    const std::string& m = st.mnemonic;
    if (m == ".text" || m == ".data") {
      if (!expect_count(st, 0, 0, "no operands")) return;
      flush_labels();
      section_ = m == ".text" ? Section::Text : Section::Data;
      return;
    }
    if (m == ".globl" || m == ".global") {
      if (expect_count(st, 1, 1, "a symbol")) expect_kind(st, 0, {K::Symbol}, "a symbol");
      return;
    }
    const bool known = m == ".word" || m == ".byte" || m == ".asciiz" || m == ".space";
    if (!known) {
      error(st.line, st.column, st.column + static_cast<int>(m.size()), "unknown-directive",
            "unknown directive '" + m + "'");
      return;
    }
    if (section_ == Section::Text && m != ".word") {
      error(st.line, st.column, st.column + static_cast<int>(m.size()),
            "directive-not-allowed-in-text", "'" + m + "' is only allowed in .data");
      return;
    }
    st.section = section_;
    if (m == ".word") {
      if (!expect_count(st, 1, std::numeric_limits<size_t>::max(), "at least one value")) return;
      for (size_t i = 0; i < st.operands.size(); ++i) {
        if (!expect_kind(st, i, {K::Immediate, K::Symbol}, "an integer or label")) return;
        const Operand& o = st.operands[i];
        if (o.kind == K::Immediate && (o.value < std::numeric_limits<int32_t>::min() ||
                                       o.value > std::numeric_limits<uint32_t>::max())) {
          error(o, st.line, "immediate-out-of-range", "value does not fit in 32 bits");
          return;
        }
      }
      if (reserve(st, 4 * static_cast<uint32_t>(st.operands.size()), 4))
        program_.statements.push_back(st);
    } else if (m == ".byte") {
      if (!expect_count(st, 1, std::numeric_limits<size_t>::max(), "at least one value")) return;
      for (size_t i = 0; i < st.operands.size(); ++i) {
        if (!expect_kind(st, i, {K::Immediate}, "an integer")) return;
        if (st.operands[i].value < -128 || st.operands[i].value > 255) {
          error(st.operands[i], st.line, "immediate-out-of-range", "value does not fit in a byte");
          return;
        }
      }
      if (reserve(st, static_cast<uint32_t>(st.operands.size()))) program_.statements.push_back(st);
    } else if (m == ".asciiz") {
      if (!expect_count(st, 1, 1, "one string") || !expect_kind(st, 0, {K::String}, "a string"))
        return;
      if (reserve(st, static_cast<uint32_t>(st.operands[0].text.size() + 1)))
        program_.statements.push_back(st);
    } else {  // .space
      if (!expect_count(st, 1, 1, "a byte count") ||
          !expect_kind(st, 0, {K::Immediate}, "an integer"))
        return;
      const int64_t n = st.operands[0].value;
      if (n < 0 || n > static_cast<int64_t>(limit())) {
        error(st.operands[0], st.line, "immediate-out-of-range", "bad .space size");
        return;
      }
      if (reserve(st, static_cast<uint32_t>(n))) program_.statements.push_back(st);
    }
  }

  void parse_line(int line_no, std::string_view raw) {
    std::string_view line = strip_comment(raw);
    size_t pos = 0;
    auto skip_ws = [&] {
      while (pos < line.size() && std::isspace(static_cast<unsigned char>(line[pos]))) ++pos;
    };
    // Leading labels.
    for (;;) {
      skip_ws();
      size_t p = pos;
      if (p >= line.size() || !is_ident_start(line[p])) break;
      while (p < line.size() && is_ident_char(line[p])) ++p;
      size_t q = p;
      while (q < line.size() && (line[q] == ' ' || line[q] == '\t')) ++q;
      if (q >= line.size() || line[q] != ':') break;
      std::string name(line.substr(pos, p - pos));
      const int col = static_cast<int>(pos) + 1;
      Statement lbl;
      lbl.kind = StatementKind::LabelDef;
      lbl.mnemonic = name;
      lbl.line = line_no;
      lbl.column = col;
      lbl.section = section_;
      lbl.address = base() + counter();
      program_.statements.push_back(lbl);
      pending_labels_.emplace_back(name, std::make_pair(line_no, col));
      pos = q + 1;
    }
    skip_ws();
    if (pos >= line.size()) return;

    size_t mend = pos;
    while (mend < line.size() && !std::isspace(static_cast<unsigned char>(line[mend]))) ++mend;
    Statement st;
    st.line = line_no;
    st.column = static_cast<int>(pos) + 1;
    st.mnemonic = text::to_lower(line.substr(pos, mend - pos));
    st.section = section_;

    bool operands_ok = true;
    for (const auto& tok : split_operands(line.substr(mend), static_cast<int>(mend) + 1)) {
      auto o = parse_operand(tok, line_no);
      if (!o) operands_ok = false;
      else st.operands.push_back(std::move(*o));
    }

    if (st.mnemonic.front() == '.') {
      st.kind = StatementKind::Directive;
      if (operands_ok) directive(st);
      return;
    }
    const bool base_op = isa::lookup(st.mnemonic).has_value();
    const bool pseudo = lookup_pseudo(st.mnemonic).has_value();
    if (!base_op && !pseudo) {
      error(line_no, st.column, st.column + static_cast<int>(st.mnemonic.size()), "unknown-mnemonic",
            "unknown instruction '" + st.mnemonic + "'");
      return;
    }
    st.kind = base_op ? StatementKind::Instruction : StatementKind::Pseudo;
    if (section_ != Section::Text) {
      error(line_no, st.column, st.column + static_cast<int>(st.mnemonic.size()),
            "instruction-in-data", "instructions must be placed in .text");
      return;
    }
    if (!operands_ok) return;
    auto size = size_instruction(st);
    if (!size) return;
    if (reserve(st, *size)) program_.statements.push_back(std::move(st));
  }

  void pass1() {
    for (size_t i = 0; i < src_.lines.size(); ++i) parse_line(static_cast<int>(i) + 1, src_.lines[i]);
    flush_labels();
    auto main = program_.symbols.find("main");
    program_.entry = main != program_.symbols.end() ? main->second.address : kTextBase;
  }

  // ---- pass 2 -------------------------------------------------------------

  struct Target {
    uint32_t address = 0;
    bool resolved = false;
  };

  Target resolve(const Operand& o, ReferenceKind kind, uint32_t site, int line) {
    Reference ref;
    ref.kind = kind;
    ref.site = site;
    ref.line = line;
    ref.column = o.column;
    ref.end_column = o.end_column;
    Target t;
    if (o.kind == K::Immediate) {
      t = {static_cast<uint32_t>(o.value), true};
    } else {
      ref.symbol = o.text;
      auto it = program_.symbols.find(o.text);
      if (it != program_.symbols.end()) t = {it->second.address, true};
    }
    ref.resolved = t.resolved;
    program_.references.push_back(std::move(ref));
    targets_.push_back(t.address);
    return t;
  }

  bool check_range(const Operand& o, int line, int64_t v, int64_t lo, int64_t hi, const char* what) {
    if (v >= lo && v <= hi) return true;
    error(o, line, "immediate-out-of-range",
          std::string(what) + " " + std::to_string(v) + " outside [" + std::to_string(lo) + ", " +
              std::to_string(hi) + "]");
    return false;
  }

  std::optional<int32_t> branch_offset(const Operand& o, uint32_t addr, int line) {
    Target t = resolve(o, ReferenceKind::Branch, addr, line);
    if (!t.resolved) return 0;
    const int32_t diff = static_cast<int32_t>(t.address - (addr + 4));
    if (diff % 4 != 0) {
      error(o, line, "misaligned-target", "branch target is not word aligned");
      return std::nullopt;
    }
    if (!check_range(o, line, diff / 4, -32768, 32767, "branch offset")) return std::nullopt;
    return diff / 4;
  }

  std::optional<uint32_t> jump_index(const Operand& o, uint32_t addr, int line) {
    Target t = resolve(o, ReferenceKind::Jump, addr, line);
    if (!t.resolved) return 0;
    if (t.address % 4 != 0) {
      error(o, line, "misaligned-target", "jump target is not word aligned");
      return std::nullopt;
    }
    if ((t.address & 0xf0000000u) != ((addr + 4) & 0xf0000000u)) {
      error(o, line, "immediate-out-of-range", "jump target outside the current 256 MB region");
      return std::nullopt;
    }
    return (t.address >> 2) & 0x03ffffff;
  }

  void emit(const Statement& st, const Instruction& in) {
    const uint32_t w = isa::encode(in);
    const uint32_t addr = kTextBase + static_cast<uint32_t>(program_.text.size());
    program_.line_map[addr] = st.line;
    program_.text.push_back(static_cast<uint8_t>(w >> 24));
    program_.text.push_back(static_cast<uint8_t>(w >> 16));
    program_.text.push_back(static_cast<uint8_t>(w >> 8));
    program_.text.push_back(static_cast<uint8_t>(w));
  }

  void emit_word(std::vector<uint8_t>& out, uint32_t w) {
    out.push_back(static_cast<uint8_t>(w >> 24));
    out.push_back(static_cast<uint8_t>(w >> 16));
    out.push_back(static_cast<uint8_t>(w >> 8));
    out.push_back(static_cast<uint8_t>(w));
  }

  static uint8_t reg(const Operand& o) { return o.reg; }

  void lower_base(const Statement& st, Op op) {
    const auto& ops = st.operands;
    const uint32_t addr = st.address;
    Instruction in;
    in.op = op;
    switch (isa::info(op).format) {
      case Format::R3:
        in.rd = reg(ops[0]);
        in.rs = reg(ops[1]);
        in.rt = reg(ops[2]);
        break;
      case Format::ShiftVar:
        in.rd = reg(ops[0]);
        in.rt = reg(ops[1]);
        in.rs = reg(ops[2]);
        break;
      case Format::Shift:
        if (!check_range(ops[2], st.line, ops[2].value, 0, 31, "shift amount")) return;
        in.rd = reg(ops[0]);
        in.rt = reg(ops[1]);
        in.shamt = static_cast<uint8_t>(ops[2].value);
        break;
      case Format::JumpReg:
        in.rs = reg(ops[0]);
        break;
      case Format::JumpLink:
        if (ops.size() == 1) {
          in.rd = isa::kRa;
          in.rs = reg(ops[0]);
        } else {
          in.rd = reg(ops[0]);
          in.rs = reg(ops[1]);
        }
        break;
      case Format::ArithImm:
        if (!check_range(ops[2], st.line, ops[2].value, -32768, 32767, "signed immediate")) return;
        in.rt = reg(ops[0]);
        in.rs = reg(ops[1]);
        in.imm = static_cast<int32_t>(ops[2].value);
        break;
      case Format::LogicImm:
        if (!check_range(ops[2], st.line, ops[2].value, 0, 65535, "unsigned immediate")) return;
        in.rt = reg(ops[0]);
        in.rs = reg(ops[1]);
        in.imm = static_cast<int32_t>(ops[2].value);
        break;
      case Format::Lui:
        if (!check_range(ops[1], st.line, ops[1].value, 0, 65535, "unsigned immediate")) return;
        in.rt = reg(ops[0]);
        in.imm = static_cast<int32_t>(ops[1].value);
        break;
      case Format::Memory:
        if (!check_range(ops[1], st.line, ops[1].value, -32768, 32767, "memory offset")) return;
        in.rt = reg(ops[0]);
        in.rs = ops[1].reg;
        in.imm = static_cast<int32_t>(ops[1].value);
        break;
      case Format::Branch: {
        auto off = branch_offset(ops[2], addr, st.line);
        if (!off) return;
        in.rs = reg(ops[0]);
        in.rt = reg(ops[1]);
        in.imm = *off;
        break;
      }
      case Format::Jump: {
        auto idx = jump_index(ops[0], addr, st.line);
        if (!idx) return;
        in.target = *idx;
        break;
      }
      case Format::Halt:
        break;
    }
    emit(st, in);
  }

  static Instruction make(Op op, uint8_t rd, uint8_t rs, uint8_t rt, int32_t imm = 0) {
    Instruction in;
    in.op = op;
    in.rd = rd;
    in.rs = rs;
    in.rt = rt;
    in.imm = imm;
    return in;
  }

  void lower_pseudo(const Statement& st, Pseudo ps) {
    const auto& ops = st.operands;
    const uint8_t at = isa::kAt;
    switch (ps) {
      case Pseudo::Li:
      case Pseudo::La: {
        uint32_t value = 0;
        if (ps == Pseudo::Li) {
          if (!check_range(ops[1], st.line, ops[1].value, std::numeric_limits<int32_t>::min(),
                           std::numeric_limits<uint32_t>::max(), "immediate"))
            return;
          value = static_cast<uint32_t>(ops[1].value);
        } else {
          value = resolve(ops[1], ReferenceKind::Address, st.address, st.line).address;
        }
        emit(st, make(Op::Lui, 0, 0, at, static_cast<int32_t>(value >> 16)));
        emit(st, make(Op::Ori, 0, at, reg(ops[0]), static_cast<int32_t>(value & 0xffff)));
        return;
      }
      case Pseudo::Move:
        emit(st, make(Op::Addu, reg(ops[0]), reg(ops[1]), isa::kZero));
        return;
      case Pseudo::Nop:
        emit(st, make(Op::Sll, 0, 0, 0));
        return;
      case Pseudo::B: {
        auto off = branch_offset(ops[0], st.address, st.line);
        if (!off) return;
        emit(st, make(Op::Beq, 0, isa::kZero, isa::kZero, *off));
        return;
      }
      case Pseudo::Blt:
      case Pseudo::Bgt:
      case Pseudo::Ble:
      case Pseudo::Bge: {
        const uint8_t rs = reg(ops[0]);
        uint32_t branch_addr = st.address;
        if (ops[1].kind == K::Register) {
          const uint8_t rt = reg(ops[1]);
          // blt/bge: rs < rt; bgt/ble: rt < rs.
          const bool swap = ps == Pseudo::Bgt || ps == Pseudo::Ble;
          emit(st, make(Op::Slt, at, swap ? rt : rs, swap ? rs : rt));
          branch_addr += 4;
        } else {
          if (!check_range(ops[1], st.line, ops[1].value, -32768, 32767, "signed immediate")) return;
          const auto imm = static_cast<int32_t>(ops[1].value);
          if (ps == Pseudo::Blt || ps == Pseudo::Bge) {
            emit(st, make(Op::Slti, 0, rs, at, imm));
            branch_addr += 4;
          } else {
            emit(st, make(Op::Addi, 0, isa::kZero, at, imm));
            emit(st, make(Op::Slt, at, at, rs));
            branch_addr += 8;
          }
        }
        auto off = branch_offset(ops[2], branch_addr, st.line);
        if (!off) return;
        const Op br = (ps == Pseudo::Blt || ps == Pseudo::Bgt) ? Op::Bne : Op::Beq;
        emit(st, make(br, 0, at, isa::kZero, *off));
        return;
      }
    }
  }

  void pass2() {
    for (const Statement& st : program_.statements) {
      const size_t before = program_.text.size();
      if (st.kind == StatementKind::Instruction) {
        lower_base(st, *isa::lookup(st.mnemonic));
      } else if (st.kind == StatementKind::Pseudo) {
        lower_pseudo(st, *lookup_pseudo(st.mnemonic));
      } else if (st.kind == StatementKind::Directive) {
        std::vector<uint8_t>& out = st.section == Section::Text ? program_.text : program_.data;
        if (st.mnemonic == ".word") {
          for (size_t i = 0; i < st.operands.size(); ++i) {
            const Operand& o = st.operands[i];
            uint32_t v = static_cast<uint32_t>(o.value);
            if (o.kind == K::Symbol)
              v = resolve(o, ReferenceKind::Address, st.address + 4 * static_cast<uint32_t>(i), st.line).address;
            if (st.section == Section::Text) program_.line_map[static_cast<uint32_t>(out.size())] = st.line;
            emit_word(out, v);
          }
        } else if (st.mnemonic == ".byte") {
          for (const auto& o : st.operands) out.push_back(static_cast<uint8_t>(o.value));
        } else if (st.mnemonic == ".asciiz") {
          out.insert(out.end(), st.operands[0].text.begin(), st.operands[0].text.end());
          out.push_back(0);
        } else if (st.mnemonic == ".space") {
          out.insert(out.end(), static_cast<size_t>(st.operands[0].value), uint8_t{0});
        }
        continue;
      } else {
        continue;
      }
      // An error inside lowering leaves the text short; keep later addresses stable.
      while (program_.text.size() < before + st.size) program_.text.push_back(0);
    }
  }

  const SourceUnit& src_;
  Program program_;
  std::vector<Diagnostic> diags_;
  Section section_ = Section::Text;
  uint32_t text_pc_ = 0;
  uint32_t data_pc_ = 0;
  bool overflow_reported_[2] = {false, false};
  std::vector<std::pair<std::string, std::pair<int, int>>> pending_labels_;
  std::vector<uint32_t> targets_;
};

}  // namespace

AssembleResult assemble(const SourceUnit& src) { return Assembler(src).run(); }

std::vector<Diagnostic> check_semantics(const Program& p) {
  std::vector<Diagnostic> out;
  for (const Reference& r : p.references) {
    if (!r.resolved) {
      out.push_back({Severity::Error, "undefined-symbol", "symbol '" + r.symbol + "' is not defined",
                     r.line, r.column, r.end_column});
      continue;
    }
    if (r.kind == ReferenceKind::Address) continue;
    bool executable = true;
    uint32_t target = 0;
    if (!r.symbol.empty()) {
      const Symbol& s = p.symbols.at(r.symbol);
      executable = s.section == Section::Text;
      target = s.address;
    } else {
      const uint32_t w = p.word_at(r.site);
      if (auto in = isa::decode(w)) {
        target = r.kind == ReferenceKind::Jump ? isa::jump_destination(*in, r.site)
                                               : isa::branch_destination(*in, r.site);
      }
      executable = target >= kTextBase && target < kTextLimit;
    }
    if (!executable)
      out.push_back({Severity::Error, "target-not-executable",
                     (r.symbol.empty() ? std::string("address ") + hex32(target)
                                       : "'" + r.symbol + "'") +
                         " is outside the executable text region",
                     r.line, r.column, r.end_column});
  }
  auto main = p.symbols.find("main");
  if (main != p.symbols.end() && main->second.section != Section::Text) {
    out.push_back({Severity::Error, "entry-not-executable", "entry label 'main' must be in .text",
                   main->second.line, 1, 1});
  } else if (p.entry - kTextBase >= p.text.size()) {
    const int line = main != p.symbols.end() ? main->second.line : 1;
    out.push_back({Severity::Error, "no-entry", "program has no instruction at its entry point",
                   line, 1, 1});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
  return out;
}

AssembleResult build(const SourceUnit& src) {
  AssembleResult r = assemble(src);
  if (!r.program) return r;
  auto sem = check_semantics(*r.program);
  if (!sem.empty()) {
    r.diagnostics.insert(r.diagnostics.end(), sem.begin(), sem.end());
    std::stable_sort(r.diagnostics.begin(), r.diagnostics.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.line < b.line; });
    if (has_errors(sem)) r.program.reset();
  }
  return r;
}

namespace {

std::string target_text(uint32_t target, const SymbolTable& symbols) {
  for (const auto& [name, sym] : symbols)
    if (sym.section == Section::Text && sym.address == target) return name;
  return hex32(target);
}

}  // namespace

std::string disassemble(const Instruction& in, uint32_t addr, const SymbolTable& symbols) {
  const auto& oi = isa::info(in.op);
  auto r = [](unsigned i) { return std::string(isa::register_name(i)); };
  std::string m(oi.mnemonic);
  switch (oi.format) {
    case Format::R3:
      return m + ' ' + r(in.rd) + ", " + r(in.rs) + ", " + r(in.rt);
    case Format::ShiftVar:
      return m + ' ' + r(in.rd) + ", " + r(in.rt) + ", " + r(in.rs);
    case Format::Shift:
      return m + ' ' + r(in.rd) + ", " + r(in.rt) + ", " + std::to_string(in.shamt);
    case Format::JumpReg:
      return m + ' ' + r(in.rs);
    case Format::JumpLink:
      return m + ' ' + r(in.rd) + ", " + r(in.rs);
    case Format::ArithImm:
    case Format::LogicImm:
      return m + ' ' + r(in.rt) + ", " + r(in.rs) + ", " + std::to_string(in.imm);
    case Format::Lui:
      return m + ' ' + r(in.rt) + ", " + std::to_string(in.imm);
    case Format::Memory:
      return m + ' ' + r(in.rt) + ", " + std::to_string(in.imm) + '(' + r(in.rs) + ')';
    case Format::Branch:
      return m + ' ' + r(in.rs) + ", " + r(in.rt) + ", " +
             target_text(isa::branch_destination(in, addr), symbols);
    case Format::Jump:
      return m + ' ' + target_text(isa::jump_destination(in, addr), symbols);
    case Format::Halt:
      return m;
  }
  return m;
}

std::string disassemble(uint32_t word, uint32_t addr, const SymbolTable& symbols) {
  if (auto in = isa::decode(word)) return disassemble(*in, addr, symbols);
  return ".word " + hex32(word);
}

std::string listing(const Program& p) {
  std::ostringstream out;
  out << "# text\n";
  for (uint32_t off = 0; off + 4 <= p.text.size(); off += 4) {
    const uint32_t addr = kTextBase + off;
    const uint32_t w = p.word_at(addr);
    char head[40];
    std::snprintf(head, sizeof head, "%08x  %08x  ", addr, w);
    out << head << disassemble(w, addr, p.symbols);
    if (auto line = p.line_of(addr)) out << "    ; line " << *line;
    out << '\n';
  }
  out << "# symbols\n";
  for (const auto& [name, sym] : p.symbols) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%08x", sym.address);
    out << buf << "  " << (sym.section == Section::Text ? ".text" : ".data") << "  " << name << '\n';
  }
  out << "# entry " << hex32(p.entry) << '\n';
  return out.str();
}

}  // namespace pacasm::assembler
