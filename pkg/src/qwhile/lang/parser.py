"""Lexer and recursive-descent parser for `.qw` source files.

Grammar (comments run `//` to end of line; statements end with `;`):

    program   := { decl } stmt_list
    decl      := NAME ':' 'qubit' [ '[' INT ']' ] ';'
               | 'gate' NAME '=' (NAME | matrix) ';'
               | 'measure' NAME '=' (NAME | '{' matrix {',' matrix} '}') ';'
    stmt_list := { stmt }
    stmt      := 'skip' ';'
               | NAME ':=' '|0>' ';'
               | NAME '[' NAME {',' NAME} ']' ';'
               | 'if' app '=' branch { '[]' branch } 'fi' ';'
               | 'while' app '=' '1' 'do' stmt_list 'od' ';'
    app       := NAME '[' NAME {',' NAME} ']'
    branch    := INT '->' stmt_list
    matrix    := '[' row {',' row} ']' ;  row := '[' cnum {',' cnum} ']'
    cnum      := complex literal, e.g. 1, -0.5, 2i, 0.5-0.5i, 1e-3+2i

Declared measurement names bound to `computational` adapt their outcome
count to the register width at each use site; `plusminus` is the fixed
2-dimensional |+>/|-> basis.

Name binding and dimension consistency are checked while parsing;
numeric well-formedness (unitarity, completeness) is the job of
`checker.validate_program`.
"""
from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from ..errors import DimensionError, ParseError, UndeclaredName
from ..core.gates import GateLibrary, STANDARD_LIBRARY
from ..core.linalg import check_dim
from .syntax import (
    Case,
    GateDecl,
    Init,
    MeasDecl,
    Seq,
    Skip,
    SourceProgram,
    Stmt,
    Unitary,
    While,
    seq_of,
)

BUILTIN_MEASUREMENTS = ("computational", "plusminus")

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>//[^\n]*)
  | (?P<ket0>\|0>)
  | (?P<num>(\d+\.\d*|\.\d+|\d+)([eE][+-]?\d+)?i?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>:=|->|\[\]|[{}\[\]():;,=+-])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class Token:
    kind: str       # 'num' | 'name' | 'ket0' | literal operator text | 'eof'
    text: str
    line: int
    col: int


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        lexeme = m.group()
        if kind not in ("ws", "comment"):
            k = lexeme if kind == "op" else kind
            tokens.append(Token(k, lexeme, line, col))
        newlines = lexeme.count("\n")
        if newlines:
            line += newlines
            col = len(lexeme) - lexeme.rfind("\n")
        else:
            col += len(lexeme)
        pos = m.end()
    tokens.append(Token("eof", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token], library: GateLibrary):
        self.tokens = tokens
        self.pos = 0
        self.library = library
        self.registers: list[tuple[str, int]] = []
        self.gates: list[GateDecl] = []
        self.measurements: list[MeasDecl] = []
        self.names: dict[str, str] = {}  # name -> 'register' | 'gate' | 'measure'

    # --- token plumbing ---

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        tok = self.cur
        self.pos += 1
        return tok

    def expect(self, kind: str, what: str | None = None) -> Token:
        if self.cur.kind != kind:
            want = what or f"{kind!r}"
            raise ParseError(f"expected {want}, found {self.cur.text or 'end of input'!r}",
                             self.cur.line, self.cur.col)
        return self.advance()

    def at_keyword(self, word: str) -> bool:
        return self.cur.kind == "name" and self.cur.text == word

    def eat_keyword(self, word: str) -> None:
        if not self.at_keyword(word):
            raise ParseError(f"expected {word!r}, found {self.cur.text or 'end of input'!r}",
                             self.cur.line, self.cur.col)
        self.advance()

    def error(self, msg: str, tok: Token | None = None) -> ParseError:
        tok = tok or self.cur
        return ParseError(msg, tok.line, tok.col)

    # --- declarations ---

    def parse_program(self) -> SourceProgram:
        while self._at_declaration():
            self.parse_decl()
        body = seq_of(self.parse_stmt_list())
        if self.cur.kind != "eof":
            raise self.error(f"unexpected {self.cur.text!r}")
        if not self.registers:
            raise self.error("program declares no quantum registers")
        return SourceProgram(
            registers=tuple(self.registers),
            gates=tuple(self.gates),
            measurements=tuple(self.measurements),
            body=body,
        )

    def _at_declaration(self) -> bool:
        if self.at_keyword("gate") or self.at_keyword("measure"):
            return True
        return (self.cur.kind == "name"
                and self.tokens[self.pos + 1].kind == ":")

    def _declare(self, tok: Token, kind: str) -> None:
        if tok.text in self.names:
            raise self.error(f"name {tok.text!r} already declared", tok)
        if tok.text in self.library:
            raise self.error(f"name {tok.text!r} shadows a built-in gate", tok)
        self.names[tok.text] = kind

    def parse_decl(self) -> None:
        if self.at_keyword("gate"):
            self.advance()
            name = self.expect("name", "gate name")
            self.expect("=")
            if self.cur.kind == "name":
                ref = self.advance()
                if ref.text not in self.library:
                    raise UndeclaredName(f"unknown library gate {ref.text!r}",
                                         ref.line, ref.col)
                decl = GateDecl(name.text, self.library[ref.text], library_ref=ref.text)
            else:
                decl = GateDecl(name.text, self.parse_matrix())
            self._declare(name, "gate")
            self.gates.append(decl)
        elif self.at_keyword("measure"):
            self.advance()
            name = self.expect("name", "measurement name")
            self.expect("=")
            if self.cur.kind == "name":
                ref = self.advance()
                if ref.text not in BUILTIN_MEASUREMENTS:
                    raise UndeclaredName(
                        f"unknown built-in measurement {ref.text!r} "
                        f"(expected one of {', '.join(BUILTIN_MEASUREMENTS)})",
                        ref.line, ref.col)
                decl = MeasDecl(name.text, builtin=ref.text)
            else:
                self.expect("{")
                ops = [self.parse_matrix()]
                while self.cur.kind == ",":
                    self.advance()
                    ops.append(self.parse_matrix())
                self.expect("}")
                d = ops[0].shape[0]
                for op in ops:
                    if op.shape != (d, d):
                        raise self.error("measurement operators must share one square dim")
                decl = MeasDecl(name.text, operators=tuple(ops))
            self._declare(name, "measure")
            self.measurements.append(decl)
        else:
            name = self.expect("name", "register name")
            self.expect(":")
            self.eat_keyword("qubit")
            width = 1
            if self.cur.kind == "[":
                self.advance()
                width_tok = self.expect("num", "register width")
                try:
                    width = int(width_tok.text)
                except ValueError:
                    raise self.error("register width must be an integer", width_tok)
                if width < 1:
                    raise self.error("register width must be >= 1", width_tok)
                self.expect("]")
            self._declare(name, "register")
            check_dim(1 << (sum(w for _, w in self.registers) + width))
            self.registers.append((name.text, width))
        self.expect(";")

    # --- matrices and numbers ---

    def parse_matrix(self) -> np.ndarray:
        tok = self.expect("[", "matrix")
        rows = [self.parse_row()]
        while self.cur.kind == ",":
            self.advance()
            rows.append(self.parse_row())
        self.expect("]")
        width = len(rows[0])
        if any(len(r) != width for r in rows):
            raise self.error("matrix rows have unequal lengths", tok)
        return np.array(rows, dtype=complex)

    def parse_row(self) -> list[complex]:
        self.expect("[", "matrix row")
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
        tok = self.expect("num", "number")
        if tok.text.endswith("i"):
            return sign * complex(0.0, float(tok.text[:-1]))
        return complex(sign * float(tok.text))

    def parse_complex(self) -> complex:
        z = self._signed_part()
        if self.cur.kind in ("+", "-"):
            z += self._signed_part()
        return z

    # --- statements ---

    def parse_stmt_list(self) -> list[Stmt]:
        stmts: list[Stmt] = []
        while True:
            if self.at_keyword("skip") or self.at_keyword("if") or self.at_keyword("while"):
                stmts.append(self.parse_stmt())
            elif self.cur.kind == "name" and self.tokens[self.pos + 1].kind in (":=", "["):
                stmts.append(self.parse_stmt())
            else:
                return stmts

    def _lookup(self, tok: Token, kind: str) -> str:
        declared = self.names.get(tok.text)
        if declared is None:
            if kind == "gate" and tok.text in self.library:
                return tok.text
            raise UndeclaredName(f"undeclared {kind} {tok.text!r}", tok.line, tok.col)
        if declared != kind:
            raise self.error(f"{tok.text!r} is a {declared}, expected a {kind}", tok)
        return tok.text

    def parse_reg_list(self) -> tuple[tuple[str, ...], int]:
        """Parse `[q1, q2]`; returns names and their total qubit width."""
        self.expect("[")
        regs = []
        seen = set()
        while True:
            tok = self.expect("name", "register name")
            self._lookup(tok, "register")
            if tok.text in seen:
                raise self.error(f"register {tok.text!r} listed twice", tok)
            seen.add(tok.text)
            regs.append(tok.text)
            if self.cur.kind != ",":
                break
            self.advance()
        self.expect("]")
        width = sum(w for name, w in self.registers if name in seen)
        return tuple(regs), width

    def _gate_dim(self, name: str) -> int:
        for g in self.gates:
            if g.name == name:
                return g.matrix.shape[0]
        return self.library[name].shape[0]

    def _meas_outcomes(self, name: str, dim: int, tok: Token) -> int:
        for m in self.measurements:
            if m.name == name:
                if m.fixed_dim is not None and m.fixed_dim != dim:
                    raise DimensionError(
                        f"measurement {name!r} has dim {m.fixed_dim}, "
                        f"applied to {dim}-dimensional register(s)",
                        tok.line, tok.col)
                return m.n_outcomes(dim)
        raise UndeclaredName(f"undeclared measurement {name!r}", tok.line, tok.col)

    def parse_stmt(self) -> Stmt:
        if self.at_keyword("skip"):
            self.advance()
            self.expect(";")
            return Skip()

        if self.at_keyword("if"):
            return self.parse_case()

        if self.at_keyword("while"):
            return self.parse_while()

        name = self.expect("name")
        if self.cur.kind == ":=":
            self._lookup(name, "register")
            self.advance()
            self.expect("ket0", "'|0>'")
            self.expect(";")
            return Init(name.text)

        # gate application: NAME [ regs ] ;
        self._lookup(name, "gate")
        regs, width = self.parse_reg_list()
        gate_dim = self._gate_dim(name.text)
        if gate_dim != (1 << width):
            raise DimensionError(
                f"gate {name.text!r} has dim {gate_dim}, applied to "
                f"{width} qubit(s) (dim {1 << width})", name.line, name.col)
        self.expect(";")
        return Unitary(name.text, regs)

    def parse_case(self) -> Stmt:
        self.eat_keyword("if")
        meas = self.expect("name", "measurement name")
        regs, width = self.parse_reg_list()
        n_outcomes = self._meas_outcomes(meas.text, 1 << width, meas)
        self.expect("=")
        branches: list[tuple[int, Stmt]] = []
        seen: set[int] = set()
        while True:
            outcome_tok = self.expect("num", "branch outcome")
            try:
                outcome = int(outcome_tok.text)
            except ValueError:
                raise self.error("branch outcome must be an integer", outcome_tok)
            if outcome in seen:
                raise self.error(f"duplicate branch outcome {outcome}", outcome_tok)
            if not 0 <= outcome < n_outcomes:
                raise DimensionError(
                    f"branch outcome {outcome} out of range for "
                    f"{n_outcomes}-outcome measurement {meas.text!r}",
                    outcome_tok.line, outcome_tok.col)
            seen.add(outcome)
            self.expect("->")
            branches.append((outcome, seq_of(self.parse_stmt_list())))
            if self.cur.kind == "[]":
                self.advance()
                continue
            break
        self.eat_keyword("fi")
        self.expect(";")
        return Case(meas.text, regs, tuple(branches))

    def parse_while(self) -> Stmt:
        self.eat_keyword("while")
        meas = self.expect("name", "measurement name")
        regs, width = self.parse_reg_list()
        n_outcomes = self._meas_outcomes(meas.text, 1 << width, meas)
        if n_outcomes != 2:
            raise DimensionError(
                f"while guard needs a yes-no measurement; {meas.text!r} has "
                f"{n_outcomes} outcomes", meas.line, meas.col)
        self.expect("=")
        guard = self.expect("num", "guard literal")
        if guard.text != "1":
            raise ParseError("while guard must compare to 1 (outcome 1 continues)",
                             guard.line, guard.col)
        self.eat_keyword("do")
        body = seq_of(self.parse_stmt_list())
        self.eat_keyword("od")
        self.expect(";")
        return While(meas.text, regs, body)


def parse(text: str, library: GateLibrary | None = None) -> SourceProgram:
    """Parse `.qw` source text into a SourceProgram.

    Raises ParseError/UndeclaredName/DimensionError with 1-based
    line/column positions.
    """
    tokens = tokenize(text)
    return _Parser(tokens, library or STANDARD_LIBRARY).parse_program()
