#include <doctest.h>

#include <fstream>
#include <random>
#include <set>
#include <sstream>

#include "asm/assembler.hpp"
#include "asm/isa.hpp"
#include "common/text.hpp"

using namespace pacasm;
using assembler::SourceUnit;

namespace {

assembler::AssembleResult asm_text(const std::string& s) { return assembler::assemble(SourceUnit::from_text(s)); }
assembler::AssembleResult build_text(const std::string& s) { return assembler::build(SourceUnit::from_text(s)); }

std::vector<uint32_t> words(const assembler::Program& p) {
  std::vector<uint32_t> out;
  for (uint32_t a = 0; a < p.text.size(); a += 4) out.push_back(p.word_at(a));
  return out;
}

bool has_code(const std::vector<Diagnostic>& ds, const std::string& code) {
  for (const auto& d : ds)
    if (d.code == code) return true;
  return false;
}

struct RefLine {
  uint32_t word;
  std::string text;
};

std::vector<RefLine> reference_encodings() {
  std::ifstream in(std::string(PACASM_FIXTURES) + "/reference_encodings.txt");
  std::vector<RefLine> out;
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    const auto sp = line.find(' ');
    out.push_back({static_cast<uint32_t>(std::stoul(line.substr(0, sp), nullptr, 16)), line.substr(sp + 1)});
  }
  return out;
}

}  // namespace

TEST_CASE("encodings match the reference assembler") {
  const auto ref = reference_encodings();
  REQUIRE(ref.size() > 400);
  std::string src = "L0:\n";
  for (const auto& r : ref) src += r.text + "\n";
  src += "L1:\n";
  auto res = asm_text(src);
  REQUIRE(res.ok());
  const auto got = words(*res.program);
  REQUIRE(got.size() == ref.size());
  std::set<std::string> seen;
  for (size_t i = 0; i < ref.size(); ++i) {
    INFO(ref[i].text);
    CHECK(got[i] == ref[i].word);
    seen.insert(ref[i].text.substr(0, ref[i].text.find(' ')));
  }
  for (const auto& oi : isa::op_table()) CHECK_MESSAGE(seen.count(std::string(oi.mnemonic)), oi.mnemonic);
}

TEST_CASE("decode inverts encode on reference words") {
  for (const auto& r : reference_encodings()) {
    auto in = isa::decode(r.word);
    REQUIRE(in);
    CHECK(isa::encode(*in) == r.word);
  }
}

TEST_CASE("assemble of disassemble is identity on sampled legal words") {
  std::mt19937_64 rng(7);
  int checked = 0;
  const auto check_word = [&](uint32_t w) {
    const std::string text = assembler::disassemble(w, 0, {});
    auto res = asm_text(text);
    INFO(text);
    REQUIRE(res.ok());
    REQUIRE(res.program->text.size() == 4);
    CHECK(res.program->word_at(0) == w);
    ++checked;
  };
  // Random raw words that happen to decode.
  int raw = 0;
  while (raw < 600) {
    const auto w = static_cast<uint32_t>(rng());
    if (!isa::decode(w)) continue;
    check_word(w);
    ++raw;
  }
  // Random fields for every operation, so rare formats are covered too.
  for (int i = 0; i < 1200; ++i) {
    const auto& oi = isa::op_table()[rng() % isa::op_table().size()];
    isa::Instruction in;
    in.op = oi.op;
    const auto r = [&] { return static_cast<uint8_t>(rng() % 32); };
    switch (oi.format) {
      case isa::Format::R3: in.rd = r(); in.rs = r(); in.rt = r(); break;
      case isa::Format::Shift: in.rd = r(); in.rt = r(); in.shamt = static_cast<uint8_t>(rng() % 32); break;
      case isa::Format::ShiftVar: in.rd = r(); in.rt = r(); in.rs = r(); break;
      case isa::Format::JumpReg: in.rs = r(); break;
      case isa::Format::JumpLink: in.rd = r(); in.rs = r(); break;
      case isa::Format::ArithImm:
      case isa::Format::Memory:
      case isa::Format::Branch:
        in.rs = r();
        in.rt = r();
        in.imm = static_cast<int16_t>(rng());
        break;
      case isa::Format::LogicImm: in.rs = r(); in.rt = r(); in.imm = static_cast<int32_t>(rng() % 65536); break;
      case isa::Format::Lui: in.rt = r(); in.imm = static_cast<int32_t>(rng() % 65536); break;
      case isa::Format::Jump: in.target = static_cast<uint32_t>(rng() % (1u << 26)); break;
      case isa::Format::Halt: break;
    }
    const uint32_t w = isa::encode(in);
    REQUIRE(isa::decode(w) == in);
    check_word(w);
  }
  CHECK(checked >= 1000);
}

TEST_CASE("non-canonical words do not decode") {
  CHECK_FALSE(isa::decode(0x00000001));  // sll with funct 1
  CHECK_FALSE(isa::decode(0x01000008 | (1 << 11)));  // jr with rd set
  CHECK_FALSE(isa::decode(0xfc000000));
  CHECK(assembler::disassemble(0xfc000000, 0, {}) == ".word 0xfc000000");
}

TEST_CASE("registers parse by name and number") {
  CHECK(isa::parse_register("$zero") == 0);
  CHECK(isa::parse_register("$31") == 31);
  CHECK(isa::parse_register("$s8") == 30);
  CHECK(isa::parse_register("$fp") == 30);
  CHECK_FALSE(isa::parse_register("$32"));
  CHECK_FALSE(isa::parse_register("t0"));
  for (unsigned i = 0; i < 32; ++i) CHECK(isa::parse_register(isa::register_name(i)) == i);
}

TEST_CASE("pseudo-instructions expand as documented") {
  auto res = asm_text(
      "main:\n"
      "  li $t0, 0x12345678\n"
      "  la $t1, main\n"
      "  move $t2, $t3\n"
      "  nop\n"
      "  b main\n"
      "  blt $t0, $t1, main\n"
      "  bge $t0, 5, main\n"
      "  bgt $t0, 5, main\n");
  REQUIRE(res.ok());
  const auto w = words(*res.program);
  REQUIRE(w.size() == 2 + 2 + 1 + 1 + 1 + 2 + 2 + 3);
  CHECK(assembler::disassemble(w[0], 0, {}) == "lui $at, 4660");
  CHECK(assembler::disassemble(w[1], 4, {}) == "ori $t0, $at, 22136");
  CHECK(assembler::disassemble(w[4], 16, {}) == "addu $t2, $t3, $zero");
  CHECK(w[5] == 0);
  CHECK(assembler::disassemble(w[7], 28, {}) == "slt $at, $t0, $t1");
  CHECK(assembler::disassemble(w[8], 32, {}) == "bne $at, $zero, 0x00000000");
  CHECK(assembler::disassemble(w[9], 36, {}) == "slti $at, $t0, 5");
  CHECK(assembler::disassemble(w[10], 40, {}) == "beq $at, $zero, 0x00000000");
  CHECK(assembler::disassemble(w[11], 44, {}) == "addi $at, $zero, 5");
  CHECK(assembler::disassemble(w[12], 48, {}) == "slt $at, $at, $t0");
}

TEST_CASE("labels, sections and data directives") {
  auto res = build_text(
      "        .data\n"
      "b1:     .byte 1, 2\n"
      "w1:     .word 0xdeadbeef, w1\n"
      "s1:     .asciiz \"hi\"\n"
      "        .text\n"
      "main:   la $t0, w1\n"
      "        lw $t1, 0($t0)\n"
      "        break\n");
  REQUIRE(res.ok());
  const auto& p = *res.program;
  CHECK(p.symbols.at("b1").address == 0x10000);
  CHECK(p.symbols.at("w1").address == 0x10004);  // word-aligned
  CHECK(p.symbols.at("s1").address == 0x1000c);
  CHECK(p.data[4] == 0xde);
  CHECK(p.data[11] == 0x04);
  CHECK(p.data[12] == 'h');
  CHECK(p.data[14] == 0);
  CHECK(p.entry == 0);
  CHECK(p.line_of(8) == 7);
}

TEST_CASE("diagnostics carry codes and positions") {
  SUBCASE("unknown mnemonic") {
    auto r = asm_text("main:\n  frob $t0\n");
    CHECK_FALSE(r.ok());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].code == "unknown-mnemonic");
    CHECK(r.diagnostics[0].line == 2);
    CHECK(r.diagnostics[0].column == 3);
  }
  SUBCASE("operand count") { CHECK(has_code(asm_text("add $t0, $t1\n").diagnostics, "operand-count")); }
  SUBCASE("unknown register") { CHECK(has_code(asm_text("add $t0, $t1, $q9\n").diagnostics, "unknown-register")); }
  SUBCASE("immediate range") {
    CHECK(has_code(asm_text("addi $t0, $t0, 40000\n").diagnostics, "immediate-out-of-range"));
    CHECK(has_code(asm_text("sll $t0, $t0, 32\n").diagnostics, "immediate-out-of-range"));
    CHECK(has_code(asm_text("andi $t0, $t0, -1\n").diagnostics, "immediate-out-of-range"));
  }
  SUBCASE("duplicate label") {
    auto r = asm_text("a:\nnop\na:\nnop\n");
    REQUIRE(has_code(r.diagnostics, "duplicate-label"));
    CHECK(r.diagnostics[0].line == 3);
  }
  SUBCASE("undefined symbol") {
    auto r = build_text("main: j nowhere\n");
    CHECK_FALSE(r.ok());
    CHECK(has_code(r.diagnostics, "undefined-symbol"));
  }
  SUBCASE("branch into data") {
    auto r = build_text(".data\nd: .word 0\n.text\nmain: beq $zero, $zero, d\n");
    CHECK(has_code(r.diagnostics, "target-not-executable"));
  }
  SUBCASE("entry in data") {
    CHECK(has_code(build_text(".data\nmain: .word 0\n.text\nnop\n").diagnostics, "entry-not-executable"));
  }
  SUBCASE("empty program") {
    auto r = build_text("");
    CHECK_FALSE(r.ok());
    CHECK(has_code(r.diagnostics, "no-entry"));
    CHECK(has_code(build_text("# only a comment\n").diagnostics, "no-entry"));
  }
  SUBCASE("instruction in data") { CHECK(has_code(asm_text(".data\nadd $t0,$t0,$t0\n").diagnostics, "instruction-in-data")); }
  SUBCASE("byte directive in text") {
    CHECK(has_code(asm_text(".text\n.byte 1\n").diagnostics, "directive-not-allowed-in-text"));
  }
  SUBCASE("unknown directive") { CHECK(has_code(asm_text(".frob 1\n").diagnostics, "unknown-directive")); }
  SUBCASE("explicit $at is a warning") {
    auto r = build_text("main: addi $at, $zero, 1\n");
    CHECK(r.ok());
    REQUIRE(r.diagnostics.size() == 1);
    CHECK(r.diagnostics[0].severity == Severity::Warning);
    CHECK(r.diagnostics[0].code == "reserved-register");
  }
}

TEST_CASE("the stage-1 reference is clean") {
  auto src = text::read_file(std::string(PACASM_STAGES) + "/stage1/reference.s");
  REQUIRE(src);
  auto r = build_text(*src);
  CHECK(r.ok());
  CHECK(r.diagnostics.empty());
  CHECK(assembler::check_semantics(*r.program).empty());
}

TEST_CASE("diagnostics render as JSON lines and human text") {
  auto r = asm_text("main:\n  frob\n");
  const std::string js = to_jsonl(r.diagnostics);
  CHECK(js.find("\"code\":\"unknown-mnemonic\"") != std::string::npos);
  CHECK(js.back() == '\n');
  CHECK(to_human(r.diagnostics[0], "x.s").rfind("x.s:2:3: error[unknown-mnemonic]", 0) == 0);
}

TEST_CASE("listing shows addresses, words and symbols") {
  auto r = build_text("main: li $t0, 4\n break\n");
  REQUIRE(r.ok());
  const std::string l = assembler::listing(*r.program);
  CHECK(l.find("00000000  3c010000  lui $at, 0") != std::string::npos);
  CHECK(l.find("00000008  0000000d  break") != std::string::npos);
  CHECK(l.find("main") != std::string::npos);
}

TEST_CASE("disassembly names text symbols") {
  auto r = build_text("main: nop\nloop: j loop\n");
  REQUIRE(r.ok());
  CHECK(assembler::disassemble(r.program->word_at(4), 4, r.program->symbols) == "j loop");
}
