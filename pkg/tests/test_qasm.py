import math
import random
import struct
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtranspile.errors import CircuitError, QasmError, UnknownGateError
from qtranspile.gates import Circuit, Gate, GateKind
from qtranspile.qasm import RegisterTable, emit_qasm, flatten_register, parse, parse_file, tokenize

from conftest import circuits, fixture_paths

K = GateKind
HEAD = 'OPENQASM 2.0;\ninclude "qelib1.inc";\n'


# -- tokenizer --------------------------------------------------------------

def test_tokenize_header():
    toks = tokenize("OPENQASM 2.0;")
    assert [(t.kind, t.text) for t in toks] == [("keyword", "OPENQASM"), ("number", "2.0"), ("symbol", ";")]


def test_tokenize_cx_statement():
    toks = tokenize("cx q[0],q[1];")
    assert [t.text for t in toks] == ["cx", "q", "[", "0", "]", ",", "q", "[", "1", "]", ";"]


def test_comments_are_stripped():
    assert [t.text for t in tokenize("// comment\nh q[0];")] == ["h", "q", "[", "0", "]", ";"]


def test_token_positions():
    toks = tokenize("h q[0];\n  cx q[0] ,q[1];")
    cx = toks[6]
    assert (cx.text, cx.line, cx.col) == ("cx", 2, 3)
    assert toks[-1].line == 2 and toks[-1].col == 16
    positions = [(t.line, t.col) for t in toks]
    assert positions == sorted(positions)
    assert all(t.text for t in toks)


def test_arrow_and_string_tokens():
    toks = tokenize('include "qelib1.inc"; measure q -> c;')
    assert ("string", "qelib1.inc") in [(t.kind, t.text) for t in toks]
    assert "->" in [t.text for t in toks]


@pytest.mark.parametrize("source, line, col", [("h q[0];\n  $", 2, 3), ("@", 1, 1), ("x;\n\n   #", 3, 4)])
def test_illegal_character_position(source, line, col):
    with pytest.raises(QasmError) as info:
        tokenize(source)
    assert (info.value.line, info.value.col) == (line, col)


# -- registers --------------------------------------------------------------

def _table():
    t = RegisterTable()
    t.add("a", 2)
    t.add("b", 2)
    return t


def test_flatten_register():
    t = _table()
    assert flatten_register(t, "b", 1) == 3
    assert flatten_register(t, "a", 0) == 0
    with pytest.raises(CircuitError, match="index out of range"):
        flatten_register(t, "b", 2)
    with pytest.raises(CircuitError, match="unknown register"):
        flatten_register(t, "z", 0)


@given(st.lists(st.integers(1, 6), min_size=1, max_size=6))
def test_flattening_is_a_bijection(widths):
    t = RegisterTable()
    for i, w in enumerate(widths):
        t.add(f"r{i}", w)
    flat = [flatten_register(t, f"r{i}", j) for i, w in enumerate(widths) for j in range(w)]
    assert sorted(flat) == list(range(sum(widths)))
    bases = [base for _, _, base in t.entries]
    assert bases == [sum(widths[:i]) for i in range(len(widths))]


def test_duplicate_register():
    t = _table()
    with pytest.raises(CircuitError):
        t.add("a", 1)


# -- parser -----------------------------------------------------------------

def test_parse_ghz():
    c = parse(HEAD + "qreg q[3];\nh q[0];\ncx q[0],q[1];\ncx q[1],q[2];\n")
    assert c.num_qubits == 3
    assert [g.kind for g in c.gates] == [K.H, K.CX, K.CX]


def test_expression_folding():
    c = parse(HEAD + "qreg q[1];\nu3(pi/2,0,pi) q[0];")
    assert c.gates == [Gate(K.U3, (0,), (math.pi / 2, 0.0, math.pi))]


@pytest.mark.parametrize(
    "expr, value",
    [
        ("-pi", -math.pi),
        ("2*pi/3", 2 * math.pi / 3),
        ("-(1+2)*3", -9.0),
        ("pi^2", math.pi ** 2),
        ("sin(pi/2)", 1.0),
        ("1e-3", 1e-3),
        ("cos(0) - -1", 2.0),
        ("sqrt(4)+ln(exp(1))", 3.0),
        ("-2^2", -4.0),
    ],
)
def test_angle_expressions(expr, value):
    c = parse(HEAD + f"qreg q[1];\nrz({expr}) q[0];")
    assert c.gates[0].params[0] == pytest.approx(value, abs=1e-12)


def test_adder_fixture():
    c = parse_file(fixture_paths()[0].parent / "adder_n4.qasm")
    ops = [g for g in c.gates if g.kind is not K.MEASURE]
    assert len(ops) == 23
    assert sum(len(g.qubits) == 2 for g in ops) == 10


def test_multiple_registers_flatten_in_order():
    c = parse(HEAD + "qreg a[2];\nqreg b[2];\nh b;\ncx a,b;")
    assert [g.qubits for g in c.gates] == [(2,), (3,), (0, 2), (1, 3)]


def test_register_measure_and_barrier():
    c = parse(HEAD + "qreg q[2];\ncreg c[2];\nbarrier q;\nmeasure q -> c;")
    assert c.gates[0] == Gate(K.BARRIER, (0, 1))
    assert c.measure_map == [(0, 0), (1, 1)]


def test_single_measure():
    c = parse(HEAD + "qreg q[2];\ncreg c[2];\nmeasure q[1] -> c[0];")
    assert c.measure_map == [(1, 0)]
    assert c.creg_size == 2


def test_user_gate_inlined_with_substitution():
    src = HEAD + "gate my(t) a,b { rz(t/2) a; cx a,b; }\nqreg q[2];\nmy(pi) q[1],q[0];"
    c = parse(src)
    assert c.gates == [Gate(K.RZ, (1,), (math.pi / 2,)), Gate(K.CX, (1, 0))]


def test_nested_user_gates_and_broadcast():
    src = HEAD + (
        "gate inner a { h a; }\n"
        "gate outer(x) a, b { inner a; crz(x) a, b; }\n"
        "qreg q[2];\nqreg r[2];\nouter(0.5) q, r;\n"
    )
    c = parse(src)
    assert [(g.kind, g.qubits) for g in c.gates] == [
        (K.H, (0,)), (K.CRZ, (0, 2)), (K.H, (1,)), (K.CRZ, (1, 3)),
    ]


def test_redefined_builtin_keeps_native_semantics():
    # files that paste qelib1.inc inline redeclare every standard gate
    src = HEAD + "gate h a { u2(0,pi) a; }\nopaque sx a;\nqreg q[1];\nh q[0];\nsx q[0];"
    assert parse(src).gates == [Gate(K.H, (0,)), Gate(K.SX, (0,))]


def test_include_optional():
    assert parse("OPENQASM 2.0;\nqreg q[1];\nx q[0];").gates == [Gate(K.X, (0,))]


@pytest.mark.parametrize(
    "body, match",
    [
        ("qreg q[2];\nreset q[0];", "unsupported construct"),
        ("qreg q[1];\ncreg c[1];\nif(c==1) x q[0];", "unsupported construct"),
        ("qreg q[1];\nfoo q[0];", "unknown gate"),
        ("qreg q[2];\ncx q[0];", "expects 2 qubit"),
        ("qreg q[1];\nrz(1,2) q[0];", "parameter"),
        ("qreg q[1];\nh q[0]", "end of input"),
        ("qreg q[1];\nh q[3];", "index out of range"),
        ("qreg q[2];\nqreg r[3];\ncx q, r;", "different widths"),
        ("qreg q[1];\nopaque foo a;\nfoo q[0];", "opaque"),
        ("qreg q[5];\nc4x q[0],q[1],q[2],q[3],q[4];", "c4x"),
        ("creg c[1];", "no qreg"),
        ("qreg q[1];\nrz(1/0) q[0];", "division by zero"),
        ("qreg q[1];\nrz(sqrt(-1)) q[0];", "bad angle"),
        ("qreg q[1];\ngate g(t) a { rz(ln(t)) a; }\ng(0) q[0];", "domain"),
    ],
)
def test_parse_errors(body, match):
    with pytest.raises((QasmError, UnknownGateError), match=match):
        parse(HEAD + body)


def test_missing_header():
    with pytest.raises(QasmError, match="OPENQASM"):
        parse("qreg q[1];")


def test_syntax_error_position():
    with pytest.raises(QasmError) as info:
        parse(HEAD + "qreg q[2];\ncx q[0] q[1];")
    assert info.value.line == 4 and info.value.col == 9


def test_parse_is_deterministic():
    src = (fixture_paths()[0].parent / "qft_n6.qasm").read_text()
    assert parse(src) == parse(src)


# -- writer -----------------------------------------------------------------

def test_emit_measure_syntax():
    c = Circuit(1, [Gate(K.X, (0,)), Gate(K.MEASURE, (0,), clbit=0)], creg_size=1)
    text = emit_qasm(c)
    assert "measure q[0] -> c[0];" in text
    assert "creg c[1];" in text


def test_emit_requires_declared_native_gates():
    c = Circuit(2, [Gate(K.ZZ, (0, 1), (0.3,))])
    with pytest.raises(CircuitError, match="not expressible"):
        emit_qasm(c, basis_header=[])
    assert "opaque zz(theta) a,b;" in emit_qasm(c, basis_header=["zz"])


def test_emit_rejects_non_finite():
    with pytest.raises(CircuitError):
        emit_qasm(Circuit(1, [Gate(K.RZ, (0,), (math.inf,))]))


def test_angles_round_trip_bit_exact():
    rng = random.Random(11)
    values = [rng.uniform(-10, 10) * 10 ** rng.randint(-12, 3) for _ in range(1000)]
    values[0] = math.pi
    c = Circuit(1, [Gate(K.RZ, (0,), (v,)) for v in values])
    back = parse(emit_qasm(c))
    pack = lambda v: struct.pack("<d", v)
    assert [pack(g.params[0]) for g in back.gates] == [pack(v) for v in values]


@pytest.mark.parametrize("path", fixture_paths(), ids=lambda p: p.stem)
def test_fixture_round_trip(path):
    c = parse_file(path)
    again = parse(emit_qasm(c))
    assert again.gates == c.gates
    assert again.num_qubits == c.num_qubits


@given(circuits(max_qubits=6, max_gates=40, measure=True))
@settings(max_examples=150, deadline=None)
def test_round_trip_property(c):
    back = parse(emit_qasm(c))
    assert back.gates == c.gates
    assert back.num_qubits == c.num_qubits
    assert back.creg_size == c.creg_size


def _synthetic(n_gates: int) -> str:
    rng = random.Random(3)
    lines = [HEAD, "qreg q[16];\n"]
    for _ in range(n_gates):
        r = rng.random()
        a, b = rng.sample(range(16), 2)
        if r < 0.4:
            lines.append(f"cx q[{a}],q[{b}];\n")
        elif r < 0.7:
            lines.append(f"rz({rng.uniform(-3, 3)!r}) q[{a}];\n")
        else:
            lines.append(f"u3(pi/2,0,pi) q[{a}];\n")
    return "".join(lines)


def _best_time(src: str, repeats: int = 3) -> float:
    best = math.inf
    for _ in range(repeats):
        t0 = time.perf_counter()
        parse(src)
        best = min(best, time.perf_counter() - t0)
    return best


@pytest.mark.slow
def test_parse_time_is_linear():
    small, large = _synthetic(100_000), _synthetic(200_000)
    _best_time(small, 1)
    ratio = _best_time(large) / _best_time(small)
    assert ratio <= 2.2, ratio
