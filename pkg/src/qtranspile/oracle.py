"""Dense unitary simulator used to check pass correctness on small circuits.

Qubit 0 is the most significant bit of the full-register index. A qubit
permutation ``perm`` moves the state of qubit ``i`` onto qubit ``perm[i]``.
"""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import CircuitError
from .gates import Circuit, Gate, GateKind, gate_unitary

MAX_QUBITS = 12


def strip_measures(c: Circuit) -> Circuit:
    return Circuit(c.num_qubits, [g for g in c.gates if not g.kind.is_directive], 0)


def _apply_1q(u: np.ndarray, gate: np.ndarray, q: int) -> np.ndarray:
    t = u.reshape(1 << q, 2, -1)
    if gate[0, 1] == 0 and gate[1, 0] == 0:
        t[:, 0] *= gate[0, 0]
        t[:, 1] *= gate[1, 1]
        return u
    return np.matmul(gate, t).reshape(u.shape)


def _apply_2q(u: np.ndarray, gate: np.ndarray, a: int, b: int) -> np.ndarray:
    g = gate.reshape(2, 2, 2, 2)
    if a > b:
        a, b = b, a
        g = g.transpose(1, 0, 3, 2)
    # axes: qubits before a, a, between, b, everything after b and the columns
    t = u.reshape(1 << a, 2, 1 << (b - a - 1), 2, -1)
    if not np.any(gate - np.diag(np.diag(gate))):
        for i in range(2):
            for j in range(2):
                t[:, i, :, j] *= g[i, j, i, j]
        return u
    out = np.zeros_like(t)
    for (i, j, k, l), c in np.ndenumerate(g):
        if c != 0:
            out[:, i, :, j] += c * t[:, k, :, l]
    return out.reshape(u.shape)


def _apply(u: np.ndarray, gate: np.ndarray, qubits: Sequence[int], n: int) -> np.ndarray:
    """Left-multiply ``u`` by ``gate`` on ``qubits``; may update ``u`` in place."""
    k = len(qubits)
    if k == 1:
        return _apply_1q(u, gate, qubits[0])
    if k == 2:
        return _apply_2q(u, gate, qubits[0], qubits[1])
    t = u.reshape((2,) * n + (-1,))
    g = gate.reshape((2,) * (2 * k))
    t = np.tensordot(g, t, axes=(list(range(k, 2 * k)), list(qubits)))
    t = np.moveaxis(t, list(range(k)), list(qubits))
    return t.reshape(1 << n, -1)


def circuit_unitary(c: Circuit | Sequence[Gate], num_qubits: int | None = None) -> np.ndarray:
    """Ordered product of the circuit's gate unitaries (measure-free input)."""
    if isinstance(c, Circuit):
        n, gates = c.num_qubits, c.gates
    else:
        n, gates = num_qubits, c
    if n > MAX_QUBITS:
        raise CircuitError(f"oracle is limited to {MAX_QUBITS} qubits, got {n}")
    u = np.eye(1 << n, dtype=complex)
    for g in gates:
        if g.kind is GateKind.BARRIER:
            continue
        if g.kind is GateKind.MEASURE:
            raise CircuitError("strip measurements before computing a unitary")
        u = _apply(u, gate_unitary(g), g.qubits, n)
    return u


def permutation_matrix(perm: Sequence[int]) -> np.ndarray:
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise ValueError(f"not a permutation: {list(perm)}")
    dim = 1 << n
    idx = np.arange(dim)
    target = np.zeros(dim, dtype=np.int64)
    for i, p in enumerate(perm):
        bit = (idx >> (n - 1 - i)) & 1
        target |= bit << (n - 1 - p)
    m = np.zeros((dim, dim), dtype=complex)
    m[target, idx] = 1
    return m


def equivalent_up_to_phase_and_perm(
    u1: np.ndarray,
    u2: np.ndarray,
    perm: Sequence[int] | None = None,
    tol: float = 1e-6,
    *,
    final_perm: Sequence[int] | None = None,
) -> bool:
    """True iff u1 = e^{ia} Pf P u2 P^T elementwise within ``tol``.

    ``perm`` relabels the qubits of ``u2`` (conjugation); ``final_perm`` is a
    one-sided output permutation such as the final layout of a routed circuit.
    """
    if u1.shape != u2.shape:
        return False
    target = u2
    if perm is not None:
        p = permutation_matrix(perm)
        target = p @ target @ p.T
    if final_perm is not None:
        target = permutation_matrix(final_perm) @ target
    flat = np.argmax(np.abs(target))
    ref = target.flat[flat]
    if abs(ref) < tol:
        return bool(np.allclose(u1, target, atol=tol, rtol=0))
    phase = u1.flat[flat] / ref
    if abs(abs(phase) - 1) > tol:
        return False
    return bool(np.allclose(u1, phase * target, atol=tol, rtol=0))


def relabel(c: Circuit, mapping: Sequence[int], num_qubits: int) -> Circuit:
    return Circuit(num_qubits, [g.on(*(mapping[q] for q in g.qubits)) for g in c.gates], c.creg_size)


def routed_equivalent(
    original: Circuit,
    routed: Circuit,
    initial: Sequence[int],
    final: Sequence[int],
    tol: float = 1e-6,
) -> bool:
    """Check a routed circuit against its logical input.

    ``initial``/``final`` are logical-to-physical layouts (indexed by logical
    qubit, covering at least the input's qubits). Only physical qubits that
    are touched, or host a logical qubit, are simulated.
    """
    n = original.num_qubits
    orig = strip_measures(original)
    out = strip_measures(routed)
    active = set(initial[:n]) | set(final[:n])
    for g in out.gates:
        active.update(g.qubits)
    if len(active) > MAX_QUBITS:
        raise CircuitError(f"{len(active)} active qubits exceed the oracle limit")
    # a physical qubit outside the touched set keeps its occupant
    p2l_init = {p: l for l, p in enumerate(initial)}
    p2l_final = {p: l for l, p in enumerate(final)}
    for p in active:
        if p not in p2l_init:
            p2l_init[p] = ("anc", p)
        if p not in p2l_final:
            p2l_final[p] = ("anc", p)
    if {p2l_init[p] for p in active} != {p2l_final[p] for p in active}:
        return False
    order = sorted(active)
    local = {p: i for i, p in enumerate(order)}
    m = len(order)
    v = circuit_unitary(relabel(out, [local.get(q, -1) for q in range(max(order) + 1)], m))
    placed = [local[initial[q]] for q in range(n)]
    u = circuit_unitary(relabel(orig, placed, m))
    init_slot = {p2l_init[p]: local[p] for p in order}
    final_slot = {p2l_final[p]: local[p] for p in order}
    rel = [0] * m
    for who, j in init_slot.items():
        rel[j] = final_slot[who]
    return equivalent_up_to_phase_and_perm(v, u, tol=tol, final_perm=rel)
