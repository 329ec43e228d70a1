from __future__ import annotations

import math
from pathlib import Path

import pytest
from hypothesis import strategies as st

from qtranspile.gates import Circuit, Gate, GateKind

K = GateKind
FIXTURES = Path(__file__).parent / "fixtures"
BACKENDS = ("ibmq", "rigetti", "ionq", "quantinuum")

ONE_Q = (K.U3, K.U2, K.U1, K.ID, K.X, K.Y, K.Z, K.H, K.S, K.SDG, K.T, K.TDG, K.RX, K.RY, K.RZ, K.SX, K.SXDG)
TWO_Q = (K.CX, K.CZ, K.CY, K.SWAP, K.CH, K.CRX, K.CRY, K.CRZ, K.CU1, K.CU3, K.RXX, K.RZZ)
THREE_Q = (K.CCX, K.CSWAP, K.RCCX)

angles = st.floats(min_value=-2 * math.pi, max_value=2 * math.pi, allow_nan=False)


@st.composite
def gates_on(draw, n: int, kinds=ONE_Q + TWO_Q):
    usable = [k for k in kinds if k.num_qubits <= n]
    kind = draw(st.sampled_from(usable))
    qubits = draw(st.permutations(range(n)))[: kind.num_qubits]
    params = tuple(draw(angles) for _ in range(kind.num_params))
    return Gate(kind, tuple(qubits), params)


@st.composite
def circuits(draw, min_qubits: int = 1, max_qubits: int = 5, max_gates: int = 30,
             kinds=ONE_Q + TWO_Q, measure: bool = False):
    n = draw(st.integers(min_qubits, max_qubits))
    gates = draw(st.lists(gates_on(n, kinds), max_size=max_gates))
    creg = 0
    if measure and draw(st.booleans()):
        creg = n
        gates += [Gate(K.MEASURE, (q,), clbit=q) for q in range(n)]
    return Circuit(n, gates, creg)


_SELF_INVERSE = {K.ID, K.X, K.Y, K.Z, K.H, K.CX, K.CZ, K.CY, K.SWAP, K.CH, K.CCX, K.CSWAP}
_PAIRS = {K.S: K.SDG, K.SDG: K.S, K.T: K.TDG, K.TDG: K.T, K.SX: K.SXDG, K.SXDG: K.SX}
_NEGATE = {K.U1, K.RX, K.RY, K.RZ, K.CRX, K.CRY, K.CRZ, K.CU1, K.RXX, K.RZZ, K.GZ, K.ZZ}


def inverse_gate(g: Gate) -> Gate:
    """The adjoint of ``g`` written as a single gate."""
    k, p = g.kind, g.params
    if k in _SELF_INVERSE:
        return g
    if k in _PAIRS:
        return Gate(_PAIRS[k], g.qubits)
    if k in _NEGATE:
        return Gate(k, g.qubits, (-p[0],))
    if k is K.U3 or k is K.CU3:
        return Gate(k, g.qubits, (-p[0], -p[2], -p[1]))
    if k is K.U2:
        return Gate(K.U3, g.qubits, (-math.pi / 2, -p[1], -p[0]))
    raise ValueError(f"no adjoint for {k}")


def inverse_circuit(c: Circuit) -> Circuit:
    return Circuit(c.num_qubits, [inverse_gate(g) for g in reversed(c.gates)])


def fixture_paths() -> list[Path]:
    return sorted(FIXTURES.glob("*.qasm"))


@pytest.fixture(scope="session")
def fixtures_dir() -> Path:
    return FIXTURES
