"""Instruction set shared by the pure and compiled evaluators.

A program is an (n, 5) int64 array; each row is (op, a, b, c, d).
Registers hold unsigned values below 2**62, pre-masked to their
declared width. Field `d` carries the result width in bits where an
op masks. Programs must write every non-input register before reading
it; evaluators do not zero registers between runs.

Row layout by op:

  CONST  a=dst  b=imm                      regs[a] = b (imm pre-masked)
  MOV    a=dst  b=src                      regs[a] = regs[b]
  ADD    a=dst  b=lhs  c=rhs  d=width      wrapping add, masked
  SUB    a=dst  b=lhs  c=rhs  d=width      wrapping sub, masked
  MUL    a=dst  b=lhs  c=rhs  d=width      wrapping mul, masked
  DIV    a=dst  b=lhs  c=rhs               unsigned; x/0 = 0
  MOD    a=dst  b=lhs  c=rhs               unsigned; x%0 = 0
  LTU LEU EQ NE GTU GEU                    a=dst b=lhs c=rhs, result 0/1
  NOT    a=dst  b=src                      logical negation of 0/1
  BAND   a=dst  b=lhs  c=rhs               logical and of 0/1
  BOR    a=dst  b=lhs  c=rhs               logical or of 0/1
  ITE    a=dst  b=cond c=then d=else       regs[a] = c-val if cond else d-val
  JMP    a=target
  JZ     a=target b=cond                   jump when regs[b] == 0
  JNZ    a=target b=cond                   jump when regs[b] != 0
  SELN   a=dst  b=key  c=base  d=len       regs[a] = regs[c + regs[b]]; key
                                           out of range traps
  STON   a=src  b=key  c=base  d=len       regs[c + regs[b]] = regs[a]
  CAST   a=dst  b=src  d=width             re-mask to a narrower width
  REVERT                                   stop with outcome 1
  TRAP                                     stop with outcome 3
  HALT                                     stop with outcome 0
  ADDC SUBC MULC                           checked: revert on overflow
  DIVC   a=dst  b=lhs  c=rhs               checked: revert on rhs == 0
  MODC   a=dst  b=lhs  c=rhs               checked: revert on rhs == 0

Run outcomes: 0 normal, 1 reverted, 2 fuel exhausted, 3 trap.
"""

CONST = 0
MOV = 1
ADD = 2
SUB = 3
MUL = 4
DIV = 5
MOD = 6
LTU = 7
LEU = 8
EQ = 9
NE = 10
GTU = 11
GEU = 12
NOT = 13
BAND = 14
BOR = 15
ITE = 16
JMP = 17
JZ = 18
JNZ = 19
SELN = 20
STON = 21
CAST = 22
REVERT = 23
TRAP = 24
HALT = 25
ADDC = 26
SUBC = 27
MULC = 28
DIVC = 29
MODC = 30

OP_NAMES = {
    CONST: "CONST", MOV: "MOV", ADD: "ADD", SUB: "SUB", MUL: "MUL",
    DIV: "DIV", MOD: "MOD", LTU: "LTU", LEU: "LEU", EQ: "EQ", NE: "NE",
    GTU: "GTU", GEU: "GEU", NOT: "NOT", BAND: "BAND", BOR: "BOR",
    ITE: "ITE", JMP: "JMP", JZ: "JZ", JNZ: "JNZ", SELN: "SELN",
    STON: "STON", CAST: "CAST", REVERT: "REVERT", TRAP: "TRAP",
    HALT: "HALT", ADDC: "ADDC", SUBC: "SUBC", MULC: "MULC",
    DIVC: "DIVC", MODC: "MODC",
}

OUTCOME_NORMAL = 0
OUTCOME_REVERT = 1
OUTCOME_FUEL = 2
OUTCOME_TRAP = 3

MAX_WIDTH = 62  # register values stay positive in an int64

# enumeration kernels track at most this many variables
MAX_SCAN_VARS = 64


def disassemble(code) -> str:
    lines = []
    for i, row in enumerate(code):
        op, a, b, c, d = (int(x) for x in row)
        lines.append(f"{i:4}  {OP_NAMES.get(op, f'?{op}'):7} "
                     f"a={a} b={b} c={c} d={d}")
    return "\n".join(lines)
