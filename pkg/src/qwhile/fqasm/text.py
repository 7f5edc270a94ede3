"""Stable `.fqasm` text form: one command per line, `//` comments.

Canonical output renders library gates in listing style (`hGate(q1,0);`)
and fuses measure-and-store into `MOV(r1,{M}(q1));`. On input the parser
additionally accepts the spelled-out forms `APPLY H q1 0` and the
unfused pair `r1 := {M}(q1);` / `MOV(r2,r1);`.

A header section declares registers, gates and measurements so a file
round-trips to a structurally identical program:

    QREG q1 1;
    CREG r1;
    GATE G [[0.0, 1.0], [1.0, 0.0]];
    MEASURE M computational;
"""
from __future__ import annotations

import numpy as np

from ..errors import FqasmSyntaxError
from ..lang.parser import BUILTIN_MEASUREMENTS, Token, tokenize
from ..lang.syntax import GateDecl, MeasDecl, format_matrix
from .ir import (
    Apply,
    Cmp,
    FqasmProgram,
    InitQ,
    Instruction,
    Je,
    Jmp,
    Label,
    MeasMov,
    Mov,
    check_wellformed,
)

# Listing-style names for library gates (input accepts either spelling).
GATE_TEXT_NAMES = {
    "H": "hGate", "X": "xGate", "Z": "zGate", "I": "iGate",
    "T": "tGate", "S": "sGate", "CNOT": "cnotGate",
}
_TEXT_TO_GATE = {v: k for k, v in GATE_TEXT_NAMES.items()}


def _gate_text(name: str) -> str:
    return GATE_TEXT_NAMES.get(name, name)


def serialize(prog: FqasmProgram) -> str:
    check_wellformed(prog)
    lines: list[str] = []
    for name, width in prog.qregs:
        lines.append(f"QREG {name} {width};")
    for name in prog.cregs:
        lines.append(f"CREG {name};")
    for g in prog.gates:
        lines.append(f"GATE {g.name} {format_matrix(g.matrix)};")
    for m in prog.measurements:
        if m.builtin:
            lines.append(f"MEASURE {m.name} {m.builtin};")
        else:
            ops = ", ".join(format_matrix(op) for op in m.operators)
            lines.append(f"MEASURE {m.name} {{{ops}}};")
    if lines:
        lines.append("")
    for ins in prog.instructions:
        if isinstance(ins, InitQ):
            lines.append(f"INIT({ins.qreg});")
        elif isinstance(ins, Apply):
            args = ",".join(ins.qregs)
            lines.append(f"{_gate_text(ins.gate)}({args},{ins.num});")
        elif isinstance(ins, MeasMov):
            args = ",".join(ins.qregs)
            lines.append(f"MOV({ins.creg},{{{ins.meas}}}({args}));")
        elif isinstance(ins, Mov):
            lines.append(f"MOV({ins.dst},{ins.src});")
        elif isinstance(ins, Cmp):
            lines.append(f"CMP({ins.creg},{ins.operand});")
        elif isinstance(ins, Jmp):
            lines.append(f"JMP {ins.label};")
        elif isinstance(ins, Je):
            lines.append(f"JE {ins.label};")
        elif isinstance(ins, Label):
            lines.append(f"{ins.name}:")
        else:
            raise FqasmSyntaxError(f"cannot serialize {type(ins).__name__}")
    return "\n".join(lines) + "\n"


class _FqasmParser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.qregs: list[tuple[str, int]] = []
        self.cregs: list[str] = []
        self.gates: list[GateDecl] = []
        self.measurements: list[MeasDecl] = []
        self.instructions: list[Instruction] = []

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.cur
        self.pos += 1
        return tok

    def fail(self, msg: str, tok: Token | None = None):
        tok = tok or self.cur
        raise FqasmSyntaxError(msg, tok.line, tok.col)

    def expect(self, kind: str) -> Token:
        if self.cur.kind != kind:
            self.fail(f"expected {kind!r}, found {self.cur.text or 'end of input'!r}")
        return self.advance()

    def expect_int(self) -> int:
        tok = self.expect("num")
        try:
            return int(tok.text)
        except ValueError:
            self.fail("expected an integer", tok)

    # matrix parsing reuses the .qw literal grammar via shared tokens
    def parse_matrix(self) -> np.ndarray:
        rows = []
        self.expect("[")
        while True:
            rows.append(self.parse_row())
            if self.cur.kind == ",":
                self.advance()
                continue
            break
        self.expect("]")
        if any(len(r) != len(rows[0]) for r in rows):
            self.fail("matrix rows have unequal lengths")
        return np.array(rows, dtype=complex)

    def parse_row(self) -> list[complex]:
        self.expect("[")
        entries = [self.parse_complex()]
        while self.cur.kind == ",":
            self.advance()
            entries.append(self.parse_complex())
        self.expect("]")
        return entries

    def _signed_part(self) -> complex:
        sign = 1.0
        while self.cur.kind in ("+", "-"):
            if self.advance().kind == "-":
                sign = -sign
        tok = self.expect("num")
        if tok.text.endswith("i"):
            return sign * complex(0.0, float(tok.text[:-1]))
        return complex(sign * float(tok.text))

    def parse_complex(self) -> complex:
        z = self._signed_part()
        if self.cur.kind in ("+", "-"):
            z += self._signed_part()
        return z

    def _name_list(self) -> tuple[str, ...]:
        names = [self.expect("name").text]
        while self.cur.kind == ",":
            self.advance()
            names.append(self.expect("name").text)
        return tuple(names)

    def parse(self) -> FqasmProgram:
        while self.cur.kind != "eof":
            self.parse_line()
        return FqasmProgram(
            instructions=tuple(self.instructions),
            qregs=tuple(self.qregs),
            cregs=tuple(self.cregs),
            gates=tuple(self.gates),
            measurements=tuple(self.measurements),
            basic_gates=tuple(GATE_TEXT_NAMES),
        )

    def parse_line(self) -> None:
        tok = self.cur
        if tok.kind != "name":
            self.fail(f"expected a command, found {tok.text!r}")
        word = tok.text

        if word in ("QREG", "CREG", "GATE", "MEASURE"):
            self.advance()
            self.parse_declaration(word)
            return

        # label line: NAME ':'
        if self.tokens[self.pos + 1].kind == ":":
            self.advance()
            self.advance()
            self.instructions.append(Label(word))
            return

        self.advance()
        if word == "INIT":
            self.expect("(")
            qreg = self.expect("name").text
            self.expect(")")
            self.instructions.append(InitQ(qreg))
        elif word == "JMP":
            self.instructions.append(Jmp(self.expect("name").text))
        elif word == "JE":
            self.instructions.append(Je(self.expect("name").text))
        elif word == "CMP":
            self.expect("(")
            creg = self.expect("name").text
            self.expect(",")
            if self.cur.kind == "num":
                operand: int | str = self.expect_int()
            else:
                operand = self.expect("name").text
            self.expect(")")
            self.instructions.append(Cmp(creg, operand))
        elif word == "MOV":
            self.expect("(")
            dst = self.expect("name").text
            self.expect(",")
            if self.cur.kind == "{":
                self.advance()
                meas = self.expect("name").text
                self.expect("}")
                self.expect("(")
                qregs = self._name_list()
                self.expect(")")
                self.expect(")")
                self.instructions.append(MeasMov(dst, meas, qregs))
            else:
                src = self.expect("name").text
                self.expect(")")
                self.instructions.append(Mov(dst, src))
        elif word == "APPLY":
            # spelled-out compatibility form: APPLY <gate> <q...> <num>
            gate = self.expect("name").text
            names = []
            while self.cur.kind == "name":
                names.append(self.advance().text)
            num = self.expect_int()
            self.instructions.append(Apply(_TEXT_TO_GATE.get(gate, gate), tuple(names), num))
        else:
            # unfused measure-assign: r := {M}(q...)
            if self.cur.kind == ":=":
                self.advance()
                self.expect("{")
                meas = self.expect("name").text
                self.expect("}")
                self.expect("(")
                qregs = self._name_list()
                self.expect(")")
                self.instructions.append(MeasMov(word, meas, qregs))
            else:
                # listing-style gate application: name(q...,num)
                self.expect("(")
                names = [self.expect("name").text]
                num = 0
                while self.cur.kind == ",":
                    self.advance()
                    if self.cur.kind == "num":
                        num = self.expect_int()
                        break
                    names.append(self.expect("name").text)
                self.expect(")")
                gate = _TEXT_TO_GATE.get(word, word)
                self.instructions.append(Apply(gate, tuple(names), num))
        self.expect(";")

    def parse_declaration(self, word: str) -> None:
        name = self.expect("name").text
        if word == "QREG":
            width = self.expect_int()
            self.qregs.append((name, width))
        elif word == "CREG":
            self.cregs.append(name)
        elif word == "GATE":
            self.gates.append(GateDecl(name, self.parse_matrix()))
        else:  # MEASURE
            if self.cur.kind == "name":
                builtin = self.advance().text
                if builtin not in BUILTIN_MEASUREMENTS:
                    self.fail(f"unknown built-in measurement {builtin!r}")
                self.measurements.append(MeasDecl(name, builtin=builtin))
            else:
                self.expect("{")
                ops = [self.parse_matrix()]
                while self.cur.kind == ",":
                    self.advance()
                    ops.append(self.parse_matrix())
                self.expect("}")
                self.measurements.append(MeasDecl(name, operators=tuple(ops)))
        self.expect(";")


def parse_fqasm(text: str) -> FqasmProgram:
    """Parse `.fqasm` text; serialize(parse_fqasm(t)) is a fixpoint."""
    from ..errors import ParseError
    try:
        tokens = tokenize(text)
    except ParseError as exc:  # re-brand lexer errors, keeping the position
        raise FqasmSyntaxError(exc.message, exc.line, exc.column) from exc
    prog = _FqasmParser(tokens).parse()
    check_wellformed(prog)
    return prog
