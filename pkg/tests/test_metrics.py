import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qtranspile.gates import Circuit, Gate, GateKind
from qtranspile.generators import ghz, random_circuit
from qtranspile.metrics import asap_levels, compute_metrics, depth
from qtranspile.oracle import relabel
from qtranspile.qasm import parse_file

from conftest import FIXTURES, circuits

K = GateKind


def ghz3():
    return Circuit(3, [Gate(K.H, (0,)), Gate(K.CX, (0, 1)), Gate(K.CX, (1, 2))])


def brute_force_depth(c: Circuit) -> int:
    """Each gate sits one step after the latest earlier gate sharing a qubit.

    Barriers and measurements take no step but still pass ordering through.
    """
    g = len(c.gates)
    if not g:
        return 0
    inc = np.zeros((g, max(c.num_qubits, 1)), dtype=bool)
    for i, gate in enumerate(c.gates):
        inc[i, list(gate.qubits)] = True
    weight = np.array([0 if x.kind.is_directive else 1 for x in c.gates])
    level = np.zeros(g, dtype=np.int64)
    for i in range(g):
        earlier = (inc[:i] & inc[i]).any(axis=1)
        level[i] = weight[i] + (level[:i][earlier].max() if earlier.any() else 0)
    return int(level.max())


def test_ghz_depth():
    assert depth(ghz3()) == 3


def test_ghz_metrics():
    m = compute_metrics(ghz3())
    assert m.gate_density == pytest.approx(1 / 3)
    assert m.two_qubit_gates == 2
    assert m.retention_lifespan == 2
    # participation counts [1, 2, 1]
    assert m.entanglement_variance == pytest.approx(2 / 9)
    assert m.measurement_density == 0.0


def test_measurements_take_no_step():
    c = ghz(3, measure=True)
    m = compute_metrics(c)
    assert m.depth == 3
    assert m.gate_count == 3
    assert m.measurement_density == pytest.approx(3 / 6)


def test_barrier_synchronizes_without_a_step():
    c = Circuit(2, [Gate(K.H, (0,)), Gate(K.H, (0,)), Gate(K.BARRIER, (0, 1)), Gate(K.X, (1,))])
    assert asap_levels(c) == [1, 2, 0, 3]
    assert depth(c) == 3


def test_parallel_gates_share_a_step():
    c = Circuit(4, [Gate(K.CX, (0, 1)), Gate(K.CX, (2, 3)), Gate(K.H, (0,))])
    assert asap_levels(c) == [1, 1, 2]


def test_empty_circuit():
    m = compute_metrics(Circuit(3))
    assert (m.depth, m.gate_density, m.retention_lifespan, m.entanglement_variance) == (0, 0.0, 0, 0.0)
    assert compute_metrics(Circuit(0)).gate_count == 0


def test_adder_input_depth():
    c = parse_file(FIXTURES / "adder_n4.qasm")
    assert depth(c) == 11


def test_to_dict_is_json_ready():
    d = compute_metrics(ghz3()).to_dict()
    assert set(d) >= {"depth", "gate_density", "retention_lifespan", "measurement_density", "entanglement_variance"}
    assert all(isinstance(v, (int, float)) for v in d.values())


@pytest.mark.parametrize("seed", range(20))
def test_depth_matches_brute_force(seed):
    c = random_circuit(1 + seed % 12, 250 * (seed + 1), seed=seed, three_qubit=True, measure=seed % 3 == 0)
    if seed % 4 == 1:
        gates = list(c.gates)
        gates.insert(len(gates) // 2, Gate(K.BARRIER, tuple(range(c.num_qubits))))
        c = Circuit(c.num_qubits, gates, c.creg_size)
    assert depth(c) == brute_force_depth(c)


@given(circuits(max_qubits=6, max_gates=40, measure=True))
@settings(max_examples=150, deadline=None)
def test_metric_invariants(c):
    m = compute_metrics(c)
    per_qubit = [0] * c.num_qubits
    for g in c.gates:
        if not g.kind.is_directive:
            for q in g.qubits:
                per_qubit[q] += 1
    assert m.depth >= max(per_qubit, default=0)
    assert 0.0 <= m.gate_density <= 1.0
    assert m.entanglement_variance >= 0.0
    assert 0 <= m.retention_lifespan <= m.depth
    assert 0.0 <= m.measurement_density <= 1.0
    assert m.depth == brute_force_depth(c)


@given(circuits(min_qubits=3, max_qubits=3, max_gates=20), circuits(min_qubits=3, max_qubits=3, max_gates=20))
@settings(max_examples=100, deadline=None)
def test_depth_of_concatenation(a, b):
    joined = Circuit(3, a.gates + b.gates)
    assert depth(joined) <= depth(a) + depth(b)


@pytest.mark.parametrize("n", [1, 2, 5])
def test_serial_concatenation_adds(n):
    a = Circuit(n, [Gate(K.BARRIER, tuple(range(n))), *(Gate(K.H, (q,)) for q in range(n))])
    b = Circuit(n, [Gate(K.BARRIER, tuple(range(n))), Gate(K.X, (0,))])
    # a full-width barrier makes the two halves strictly serial
    assert depth(Circuit(n, a.gates + b.gates)) == depth(a) + depth(b)


@given(circuits(max_qubits=6, max_gates=30), st.randoms(use_true_random=False))
@settings(max_examples=100, deadline=None)
def test_metrics_invariant_under_relabeling(c, rnd):
    perm = list(range(c.num_qubits))
    rnd.shuffle(perm)
    a, b = compute_metrics(c), compute_metrics(relabel(c, perm, c.num_qubits))
    assert a.depth == b.depth and a.gate_count == b.gate_count
    assert a.retention_lifespan == b.retention_lifespan
    assert math.isclose(a.entanglement_variance, b.entanglement_variance, abs_tol=1e-12)
