"""Benchmark circuit generators (QASMBench-style families)."""

from __future__ import annotations

import math
import random

from .gates import Circuit, Gate, GateKind

K = GateKind


def _measure_all(gates: list[Gate], n: int) -> None:
    gates.extend(Gate(K.MEASURE, (q,), clbit=q) for q in range(n))


def ghz(n: int, measure: bool = True) -> Circuit:
    gates = [Gate(K.H, (0,))]
    gates += [Gate(K.CX, (i, i + 1)) for i in range(n - 1)]
    if measure:
        _measure_all(gates, n)
    return Circuit(n, gates, n if measure else 0)


def bernstein_vazirani(secret: str, measure: bool = True) -> Circuit:
    """BV over ``len(secret)`` data qubits plus one ancilla (the last qubit)."""
    n = len(secret) + 1
    anc = n - 1
    gates = [Gate(K.X, (anc,))]
    gates += [Gate(K.H, (q,)) for q in range(n)]
    gates += [Gate(K.CX, (q, anc)) for q, bit in enumerate(secret) if bit == "1"]
    gates += [Gate(K.H, (q,)) for q in range(n - 1)]
    if measure:
        gates += [Gate(K.MEASURE, (q,), clbit=q) for q in range(n - 1)]
    return Circuit(n, gates, n - 1 if measure else 0)


def _cphase(theta: float, a: int, b: int) -> list[Gate]:
    return [
        Gate(K.U1, (a,), (theta / 2,)),
        Gate(K.CX, (a, b)),
        Gate(K.U1, (b,), (-theta / 2,)),
        Gate(K.CX, (a, b)),
        Gate(K.U1, (b,), (theta / 2,)),
    ]


def qft(n: int, measure: bool = False, expand_cphase: bool = True) -> Circuit:
    """Textbook QFT without the final qubit reversal.

    With ``expand_cphase`` each controlled phase is written as
    u1/cx/u1/cx/u1, giving n(n-1) CX gates.
    """
    gates: list[Gate] = []
    for j in range(n):
        gates.append(Gate(K.H, (j,)))
        for k in range(j + 1, n):
            theta = math.ldexp(math.pi, j - k)
            if expand_cphase:
                gates += _cphase(theta, k, j)
            else:
                gates.append(Gate(K.CU1, (k, j), (theta,)))
    if measure:
        _measure_all(gates, n)
    return Circuit(n, gates, n if measure else 0)


def ising(n: int, steps: int = 1, j: float = 0.7, h: float = 0.3, measure: bool = False) -> Circuit:
    """Trotterized transverse-field Ising chain.

    Each step applies exp(-i J ZZ) to even then odd neighbour pairs (as
    cx/rz/cx) and an RX field layer.
    """
    gates = [Gate(K.H, (q,)) for q in range(n)]
    for _ in range(steps):
        for start in (0, 1):
            for a in range(start, n - 1, 2):
                gates += [
                    Gate(K.CX, (a, a + 1)),
                    Gate(K.RZ, (a + 1,), (2 * j,)),
                    Gate(K.CX, (a, a + 1)),
                ]
        gates += [Gate(K.RX, (q,), (2 * h,)) for q in range(n)]
    if measure:
        _measure_all(gates, n)
    return Circuit(n, gates, n if measure else 0)


def qaoa(n: int, edges: list[tuple[int, int]] | None = None, p: int = 1,
         gamma: float = 0.4, beta: float = 0.9, measure: bool = True) -> Circuit:
    """MaxCut QAOA; defaults to a ring graph."""
    if edges is None:
        edges = [(i, (i + 1) % n) for i in range(n)] if n > 2 else [(0, 1)]
    gates = [Gate(K.H, (q,)) for q in range(n)]
    for _ in range(p):
        for a, b in edges:
            gates += [Gate(K.CX, (a, b)), Gate(K.RZ, (b,), (2 * gamma,)), Gate(K.CX, (a, b))]
        gates += [Gate(K.RX, (q,), (2 * beta,)) for q in range(n)]
    if measure:
        _measure_all(gates, n)
    return Circuit(n, gates, n if measure else 0)


_RANDOM_1Q = (K.H, K.X, K.S, K.T, K.SDG, K.RX, K.RY, K.RZ, K.U3)
_RANDOM_2Q = (K.CX, K.CZ, K.SWAP, K.CRZ, K.CU1, K.RZZ)


def random_circuit(
    n: int,
    num_gates: int,
    seed: int = 0,
    two_qubit_fraction: float = 0.4,
    three_qubit: bool = False,
    measure: bool = False,
) -> Circuit:
    """Uniformly random gate sequence; deterministic for a given seed."""
    rng = random.Random(seed)
    gates: list[Gate] = []
    for _ in range(num_gates):
        r = rng.random()
        if three_qubit and n >= 3 and r < 0.05:
            gates.append(Gate(K.CCX, tuple(rng.sample(range(n), 3))))
        elif n >= 2 and r < two_qubit_fraction:
            kind = rng.choice(_RANDOM_2Q)
            params = tuple(rng.uniform(-math.pi, math.pi) for _ in range(kind.num_params))
            gates.append(Gate(kind, tuple(rng.sample(range(n), 2)), params))
        else:
            kind = rng.choice(_RANDOM_1Q)
            params = tuple(rng.uniform(-math.pi, math.pi) for _ in range(kind.num_params))
            gates.append(Gate(kind, (rng.randrange(n),), params))
    if measure:
        _measure_all(gates, n)
    return Circuit(n, gates, n if measure else 0)
