"""Parser, validator, and pretty-printer round trips."""
import numpy as np
import pytest
from hypothesis import given, strategies as st

from qwhile.errors import DimensionError, ParseError, UndeclaredName
from qwhile.lang import (
    Case, Init, Seq, Skip, SourceProgram, Unitary, While,
    parse, pretty_print, validate_program,
)
from qwhile.lang.syntax import GateDecl, MeasDecl, format_complex

from genprog import random_program

QLOOP_SRC = """
q : qubit;
e : qubit;
gate DILATE = [[1, 0, 0, 0],
               [0, 0.7071067811865476, 0.7071067811865476, 0],
               [0, -0.7071067811865476, 0.7071067811865476, 0],
               [0, 0, 0, 1]];
measure M = computational;
q := |0>;
e := |0>;
H[q];
DILATE[q, e];
while M[q] = 1 do
  H[q];
od;
"""


class TestParse:
    def test_single_init(self):
        p = parse("q : qubit; q := |0>;")
        assert p.body == Init("q")
        assert p.registers == (("q", 1),)

    def test_loop_program_shape(self):
        p = parse(QLOOP_SRC)
        loop = p.body.stmts[-1]
        assert loop == While("M", ("q",), Unitary("H", ("q",)))

    def test_three_outcome_guard_rejected(self):
        src = """q : qubit; e : qubit;
        measure M = { [[1,0],[0,0]], [[0,0],[0,0.7071067811865476]], [[0,0],[0,0.7071067811865476]] };
        while M[q] = 1 do skip; od;"""
        with pytest.raises(DimensionError):
            parse(src)

    def test_guard_zero_is_syntax_error(self):
        with pytest.raises(ParseError):
            parse("q : qubit; measure M = computational; while M[q] = 0 do skip; od;")

    def test_undeclared_names(self):
        with pytest.raises(UndeclaredName):
            parse("q : qubit; X[r];")
        with pytest.raises(UndeclaredName):
            parse("q : qubit; BADGATE[q];")
        with pytest.raises(UndeclaredName):
            parse("q : qubit; if M[q] = 0 -> skip; fi;")

    def test_error_location(self):
        with pytest.raises(ParseError) as err:
            parse("q : qubit;\nq := |0>;\nY[q];\n")
        assert err.value.line == 3
        assert err.value.column == 1

    def test_comments_ignored(self):
        p = parse("// header\nq : qubit; // reg\nskip; // done\n")
        assert p.body == Skip()

    def test_branch_outcome_range_checked(self):
        with pytest.raises(DimensionError):
            parse("q : qubit; measure M = computational; if M[q] = 2 -> skip; fi;")

    def test_missing_branches_allowed(self):
        p = parse("q : qubit; measure M = computational; if M[q] = 1 -> X[q]; fi;")
        assert p.body.branches == ((1, Unitary("X", ("q",))),)

    def test_multi_qubit_register(self):
        p = parse("qs : qubit[3]; qs := |0>;")
        assert p.registers == (("qs", 3),)
        assert p.n_qubits == 3

    def test_inline_measurement(self):
        p = parse("""q : qubit;
            measure MPM = { [[0.5, 0.5], [0.5, 0.5]], [[0.5, -0.5], [-0.5, 0.5]] };
            if MPM[q] = 0 -> skip; fi;""")
        decl = p.meas_decl("MPM")
        assert decl.n_outcomes(2) == 2
        assert validate_program(p).ok

    def test_complex_literals(self):
        p = parse("q : qubit; gate G = [[0, 1i], [-1i, 0]]; G[q];")
        np.testing.assert_allclose(p.gate_decl("G").matrix, [[0, 1j], [-1j, 0]])
        p = parse("q : qubit; gate G = [[0.6+0.8i, 0], [0, 0.6-0.8i]]; G[q];")
        np.testing.assert_allclose(p.gate_decl("G").matrix,
                                   [[0.6 + 0.8j, 0], [0, 0.6 - 0.8j]])


class TestValidate:
    def test_bb84_encode_ok(self):
        p = parse("""q : qubit; measure MPM = plusminus;
                     q := |0>; X[q]; H[q];
                     if MPM[q] = 0 -> skip; [] 1 -> skip; fi;""")
        assert validate_program(p).ok

    def test_wrong_arity(self):
        p = SourceProgram((("q", 1),), (), (MeasDecl("M", builtin="computational"),),
                          Unitary("CNOT", ("q",)))
        report = validate_program(p)
        assert not report.ok
        assert any(i.kind == "DimensionError" for i in report.issues)

    def test_nonunitary_gate(self):
        p = SourceProgram((("q", 1),), (GateDecl("G", np.array([[1, 0], [0, 2.0]])),),
                          (), Unitary("G", ("q",)))
        report = validate_program(p)
        assert any(i.kind == "NotUnitary" for i in report.issues)

    def test_incomplete_measurement(self):
        p = SourceProgram((("q", 1),), (),
                          (MeasDecl("M", operators=(np.diag([1.0, 0.0]),)),),
                          Case("M", ("q",), ((0, Skip()),)))
        report = validate_program(p)
        assert any(i.kind == "IncompleteMeasurement" for i in report.issues)

    def test_generated_programs_valid(self, rng):
        for _ in range(50):
            assert validate_program(random_program(rng)).ok


class TestPrettyPrint:
    def test_skip_sequence(self):
        p = parse("q : qubit; skip; skip;")
        assert "skip;\nskip;\n" in pretty_print(p)

    def test_case_shape(self):
        p = parse("q : qubit; measure M = computational; "
                  "if M[q] = 0 -> skip; [] 1 -> X[q]; fi;")
        text = pretty_print(p)
        assert "if M[q] = 0 ->" in text
        assert "[] 1 ->" in text
        assert text.rstrip().endswith("fi;")

    def test_fixpoint_on_sources(self):
        for src in (QLOOP_SRC, "q : qubit; skip;"):
            p = parse(src)
            text = pretty_print(p)
            assert parse(text) == p
            assert pretty_print(parse(text)) == text

    @given(st.integers(0, 2**32 - 1))
    def test_round_trip_generated(self, seed):
        p = random_program(np.random.default_rng(seed))
        assert parse(pretty_print(p)) == p

    def test_format_complex_round_trip(self):
        for z in (0.5, -0.25, 1j, -0.7071067811865476j, 0.6 + 0.8j, 1 - 2e-3j, 0.0):
            text = format_complex(complex(z))
            assert complex(text.replace("i", "j")) == complex(z)


class TestConstructCoverage:
    """Every language construct is expressible and parses."""

    def test_all_constructs(self):
        src = """
        a : qubit;
        b : qubit;
        measure M = computational;
        skip;
        a := |0>;
        H[a];
        CNOT[a, b];
        if M[a] = 0 -> skip; [] 1 -> X[a]; fi;
        while M[b] = 1 do X[b]; od;
        """
        p = parse(src)
        kinds = [type(s) for s in p.body.stmts]
        assert kinds == [Skip, Init, Unitary, Unitary, Case, While]
