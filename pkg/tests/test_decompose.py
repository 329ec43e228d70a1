import math
import zlib

import numpy as np
import pytest
from hypothesis import given, settings

from qtranspile.decompose import (
    BASIS,
    CX_RULES,
    DIRECT_RULES,
    Backend,
    backend_for_basis,
    decompose_3q,
    decompose_to_basis,
    fold_1q_runs,
    normalize_angle,
    rule_for,
    u3_angles,
)
from qtranspile.errors import DecompositionError, UnknownGateError
from qtranspile.gates import Circuit, Gate, GateKind, gate_unitary, u3_matrix
from qtranspile.oracle import circuit_unitary, equivalent_up_to_phase_and_perm

from conftest import BACKENDS, ONE_Q, THREE_Q, TWO_Q, circuits

K = GateKind
PI = math.pi
NATIVE = (K.SX, K.SXDG, K.GPI, K.GPI2, K.GZ, K.MS, K.ZZ)
LOWERABLE = [k for k in ONE_Q + TWO_Q + NATIVE]


def single(kind, params=()):
    return Circuit(kind.num_qubits, [Gate(kind, tuple(range(kind.num_qubits)), tuple(params))])


def test_h_on_ibmq():
    out = decompose_to_basis(single(K.H), "ibmq")
    assert [(g.kind, g.params) for g in out.gates] == [(K.RZ, (PI / 2,)), (K.SX, ()), (K.RZ, (PI / 2,))]
    assert equivalent_up_to_phase_and_perm(circuit_unitary(out), gate_unitary(Gate(K.H, (0,))), tol=1e-12)


def test_cx_on_rigetti():
    out = decompose_to_basis(single(K.CX), "rigetti")
    assert {g.kind for g in out.gates} <= {K.RX, K.RZ, K.CZ}
    assert sum(g.kind is K.CZ for g in out.gates) == 1
    assert equivalent_up_to_phase_and_perm(circuit_unitary(out), gate_unitary(Gate(K.CX, (0, 1))), tol=1e-9)


def test_cx_fixed_point_on_ibmq():
    c = single(K.CX)
    assert decompose_to_basis(c, "ibmq").gates == c.gates


def test_unknown_backend():
    with pytest.raises(DecompositionError, match="unknown backend"):
        decompose_to_basis(single(K.H), "dwave")


def test_3q_input_rejected_by_basis_pass():
    with pytest.raises(DecompositionError, match="expand"):
        decompose_to_basis(single(K.CCX), "ibmq")


# -- 3-qubit expansion --------------------------------------------------------

def test_ccx_is_six_cx_and_nine_single():
    out = decompose_3q(single(K.CCX))
    assert len(out.gates) == 15
    assert sum(g.kind is K.CX for g in out.gates) == 6
    assert sum(len(g.qubits) == 1 for g in out.gates) == 9


def test_circuit_without_3q_is_unchanged():
    c = Circuit(2, [Gate(K.H, (0,)), Gate(K.CX, (0, 1))])
    assert decompose_3q(c).gates == c.gates


def test_cswap_is_fredkin():
    out = decompose_3q(single(K.CSWAP))
    fredkin = np.eye(8)[[0, 1, 2, 3, 4, 6, 5, 7]]
    u = circuit_unitary(out)
    assert equivalent_up_to_phase_and_perm(u, fredkin.astype(complex), tol=1e-9)
    assert np.allclose(u, fredkin, atol=1e-9)


def test_c4x_unsupported():
    with pytest.raises(UnknownGateError, match="c4x"):
        decompose_3q(single(K.C4X))


@pytest.mark.parametrize("kind", THREE_Q + (K.RC3X, K.C3X, K.C3SQRTX), ids=lambda k: k.value)
def test_3q_expansion_is_exact(kind):
    c = single(kind)
    out = decompose_3q(c)
    assert max(len(g.qubits) for g in out.gates) <= 2
    assert equivalent_up_to_phase_and_perm(circuit_unitary(out), circuit_unitary(c), tol=1e-9)


@given(circuits(min_qubits=3, max_qubits=5, max_gates=20, kinds=ONE_Q + TWO_Q + THREE_Q, measure=True))
@settings(max_examples=60, deadline=None)
def test_no_wide_gates_after_expansion(c):
    out = decompose_3q(c)
    assert all(len(g.qubits) <= 2 for g in out.gates if g.kind is not K.BARRIER)
    assert out.measure_map == c.measure_map


# -- basis lowering -----------------------------------------------------------

@pytest.mark.parametrize("backend", BACKENDS)
@pytest.mark.parametrize("kind", LOWERABLE, ids=lambda k: k.value)
def test_lowering_preserves_unitary(kind, backend):
    rng = np.random.default_rng(zlib.crc32(f"{kind.value}/{backend}".encode()))
    basis = BASIS[Backend(backend)]
    draws = 200 if kind.num_params else 1
    edge_angles = [0.0, PI / 2, -PI / 2, PI, -PI, 2 * PI, 1e-13]
    for i in range(draws):
        if i < len(edge_angles) and kind.num_params:
            p = tuple(edge_angles[(i + j) % len(edge_angles)] for j in range(kind.num_params))
        else:
            p = tuple(rng.uniform(-2 * PI, 2 * PI, kind.num_params))
        c = single(kind, p)
        out = decompose_to_basis(c, backend)
        assert all(g.kind in basis for g in out.gates), out.gates
        assert equivalent_up_to_phase_and_perm(circuit_unitary(out), circuit_unitary(c), tol=1e-9), p


@pytest.mark.parametrize("backend", BACKENDS)
def test_rule_tables_are_exact(backend):
    b = Backend(backend)
    rules = [CX_RULES[b]] + [r for (k, bb), r in DIRECT_RULES.items() if bb is b]
    for rule in rules:
        assert rule.target_basis is b
        kind = rule.source
        for p in (0.3, -1.1, PI):
            g = Gate(kind, (0, 1), (p,) * kind.num_params)
            parts = rule.apply(g)
            assert all(len(h.qubits) <= 2 for h in parts)
            assert equivalent_up_to_phase_and_perm(
                circuit_unitary(parts, 2), gate_unitary(g), tol=1e-9
            )


def test_rule_for_native_is_none():
    assert rule_for(K.CX, Backend.IBMQ) is None
    assert rule_for(K.MS, Backend.IONQ) is None
    assert rule_for(K.CZ, Backend.RIGETTI) is None


def test_rule_applied_to_wrong_kind():
    with pytest.raises(DecompositionError):
        CX_RULES[Backend.RIGETTI].apply(Gate(K.CZ, (0, 1)))


def test_gpi2_identity():
    # GPI2(phi) = RZ(-phi) RX(pi/2) RZ(phi) up to phase (operator order)
    for phi in np.linspace(-PI, PI, 13):
        rz = lambda a: gate_unitary(Gate(K.RZ, (0,), (a,)))
        rx = gate_unitary(Gate(K.RX, (0,), (PI / 2,)))
        expected = rz(phi) @ rx @ rz(-phi)
        assert equivalent_up_to_phase_and_perm(gate_unitary(Gate(K.GPI2, (0,), (phi,))), expected, tol=1e-12)


@pytest.mark.parametrize("kind", ONE_Q + (K.SX, K.SXDG, K.GPI, K.GPI2, K.GZ), ids=lambda k: k.value)
def test_u3_angles(kind):
    rng = np.random.default_rng(3)
    for _ in range(50):
        g = Gate(kind, (0,), tuple(rng.uniform(-7, 7, kind.num_params)))
        t, f, l = u3_angles(g)
        assert 0 <= t <= PI
        assert equivalent_up_to_phase_and_perm(u3_matrix(t, f, l), gate_unitary(g), tol=1e-9)


@given(circuits(max_qubits=4, max_gates=25))
@settings(max_examples=80, deadline=None)
def test_lowering_is_idempotent(c):
    for backend in BACKENDS:
        once = decompose_to_basis(c, backend)
        assert decompose_to_basis(once, backend).gates == once.gates


def test_directives_pass_through():
    c = Circuit(2, [Gate(K.BARRIER, (0, 1)), Gate(K.MEASURE, (1,), clbit=0)], creg_size=1)
    for b in BACKENDS:
        assert decompose_to_basis(c, b).gates == c.gates


@pytest.mark.parametrize(
    "a, expected",
    [(0.0, 0.0), (PI, PI), (-PI, PI), (3 * PI, PI), (2 * PI, 0.0), (-PI / 2, -PI / 2), (7.0, 7.0 - 2 * PI)],
)
def test_normalize_angle(a, expected):
    assert normalize_angle(a) == pytest.approx(expected, abs=1e-12)
    assert -PI < normalize_angle(a) <= PI


@pytest.mark.parametrize(
    "names, backend",
    [
        (["id", "rz", "sx", "x", "cx"], Backend.IBMQ),
        (["rx", "rz", "cz"], Backend.RIGETTI),
        (["gpi", "gpi2", "gz", "ms"], Backend.IONQ),
        (["rx", "rz", "zz"], Backend.QUANTINUUM),
        (["rz", "sx", "cx"], Backend.IBMQ),
    ],
)
def test_backend_for_basis(names, backend):
    assert backend_for_basis(names) is backend


def test_backend_for_unknown_basis():
    with pytest.raises(DecompositionError):
        backend_for_basis(["u3", "cx"])


# -- folding ------------------------------------------------------------------

def test_fold_adds_angles():
    c = Circuit(1, [Gate(K.RZ, (0,), (PI / 4,)), Gate(K.RZ, (0,), (PI / 4,))])
    assert fold_1q_runs(c).gates == [Gate(K.RZ, (0,), (PI / 2,))]


def test_fold_stops_at_interleaved_gate():
    c = Circuit(1, [Gate(K.RZ, (0,), (0.3,)), Gate(K.X, (0,)), Gate(K.RZ, (0,), (0.4,))])
    assert fold_1q_runs(c).gates == c.gates


def test_fold_drops_zero():
    assert fold_1q_runs(Circuit(1, [Gate(K.RZ, (0,), (0.0,))])).gates == []


def test_fold_cancelling_pair_reopens_run():
    c = Circuit(1, [Gate(K.RX, (0,), (0.5,)), Gate(K.RZ, (0,), (0.2,)), Gate(K.RZ, (0,), (-0.2,)), Gate(K.RX, (0,), (0.25,))])
    assert fold_1q_runs(c).gates == [Gate(K.RX, (0,), (0.5,)), Gate(K.RX, (0,), (0.25,))]


def test_fold_two_qubit_rotations_need_same_operands():
    c = Circuit(3, [Gate(K.ZZ, (0, 1), (0.2,)), Gate(K.ZZ, (0, 1), (0.3,)), Gate(K.ZZ, (1, 2), (0.1,))])
    out = fold_1q_runs(c).gates
    assert out[0].params[0] == pytest.approx(0.5)
    assert len(out) == 2


@given(circuits(max_qubits=4, max_gates=30))
@settings(max_examples=100, deadline=None)
def test_fold_is_sound(c):
    for backend in ("ibmq", "quantinuum"):
        lowered = decompose_to_basis(c, backend)
        folded = fold_1q_runs(lowered)
        assert len(folded.gates) <= len(lowered.gates)
        assert equivalent_up_to_phase_and_perm(circuit_unitary(folded), circuit_unitary(c), tol=1e-8)
