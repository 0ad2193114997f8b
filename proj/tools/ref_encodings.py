#!/usr/bin/env python3
"""Regenerate tests/fixtures/reference_encodings.txt with clang's MIPS assembler.

Every line of the fixture is `<hex word> <instruction>`. The instructions form
one program: label L0 sits at address 0 and L1 right after the last line.
"""
import os
import random
import struct
import subprocess
import sys
import tempfile

REGS = ["$zero", "$at", "$v0", "$v1", "$a0", "$a1", "$a2", "$a3",
        "$t0", "$t1", "$t2", "$t3", "$t4", "$t5", "$t6", "$t7",
        "$s0", "$s1", "$s2", "$s3", "$s4", "$s5", "$s6", "$s7",
        "$t8", "$t9", "$k0", "$k1", "$gp", "$sp", "$fp", "$ra"]

R3 = ["add", "addu", "sub", "subu", "and", "or", "xor", "nor", "slt", "sltu", "mul"]
SHIFT = ["sll", "srl", "sra"]
SHIFTV = ["sllv", "srlv"]
ARITH = ["addi", "addiu", "slti", "sltiu"]
LOGIC = ["andi", "ori", "xori"]
MEM = ["lw", "lb", "lbu", "sw", "sb"]


def lines(rng, per_op):
    r = lambda: rng.choice(REGS)
    out = []
    for _ in range(per_op):
        for m in R3:
            out.append(f"{m} {r()}, {r()}, {r()}")
        for m in SHIFT:
            out.append(f"{m} {r()}, {r()}, {rng.randint(0, 31)}")
        for m in SHIFTV:
            out.append(f"{m} {r()}, {r()}, {r()}")
        for m in ARITH:
            out.append(f"{m} {r()}, {r()}, {rng.randint(-32768, 32767)}")
        for m in LOGIC:
            out.append(f"{m} {r()}, {r()}, {rng.randint(0, 65535)}")
        out.append(f"lui {r()}, {rng.randint(0, 65535)}")
        for m in MEM:
            off = rng.randint(-32768, 32767)
            if m in ("lw", "sw"):
                off &= ~3
            out.append(f"{m} {r()}, {off}({r()})")
        out.append(f"jr {r()}")
        out.append(f"jalr {r()}, {r()}")
        out.append(f"beq {r()}, {r()}, {rng.choice(['L0', 'L1'])}")
        out.append(f"bne {r()}, {r()}, {rng.choice(['L0', 'L1'])}")
        out.append(f"j {rng.choice(['L0', 'L1'])}")
        out.append(f"jal {rng.choice(['L0', 'L1'])}")
    out.append("break")
    # Boundary values.
    out += ["addi $t0, $t1, -32768", "addi $t0, $t1, 32767", "ori $t0, $t1, 65535",
            "sll $zero, $zero, 0", "sra $ra, $ra, 31", "lw $t0, -32768($sp)",
            "sb $t9, 32767($zero)"]
    return out


def text_section(obj):
    data = open(obj, "rb").read()
    shoff, = struct.unpack(">I", data[32:36])
    shentsize, shnum, shstrndx = struct.unpack(">HHH", data[46:52])
    sections = []
    for i in range(shnum):
        name, _, _, _, off, size = struct.unpack(">IIIIII", data[shoff + i * shentsize: shoff + i * shentsize + 24])
        sections.append((name, off, size))
    strtab = sections[shstrndx]
    for name, off, size in sections:
        start = strtab[1] + name
        if data[start:data.index(b"\0", start)] == b".text":
            return data[off:off + size]
    raise SystemExit("no .text section")


def main():
    root = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
    out_path = os.path.join(root, "tests", "fixtures", "reference_encodings.txt")
    body = lines(random.Random(20240611), 12)
    with tempfile.TemporaryDirectory() as tmp:
        src = os.path.join(tmp, "ref.s")
        obj = os.path.join(tmp, "ref.o")
        with open(src, "w") as f:
            f.write(".set noreorder\n.set noat\nL0:\n" + "\n".join(body) + "\nL1:\n")
        subprocess.run(["clang", "--target=mips-linux-gnu", "-c", src, "-fintegrated-as", "-fno-pic", "-mno-abicalls", "-o", obj], check=True)
        text = text_section(obj)
    if len(text) != 4 * len(body):
        sys.exit(f"expected {len(body)} words, got {len(text) // 4}")
    with open(out_path, "w") as f:
        for i, line in enumerate(body):
            f.write(f"0x{struct.unpack('>I', text[4 * i:4 * i + 4])[0]:08x} {line}\n")
    print(f"wrote {len(body)} encodings to {out_path}")


if __name__ == "__main__":
    main()
