"""Circuit statistics: depth, gate density, retention, measurement and entanglement."""

from __future__ import annotations

from dataclasses import asdict, dataclass

from .gates import Circuit, GateKind

K = GateKind


@dataclass(frozen=True)
class CircuitMetrics:
    num_qubits: int
    gate_count: int
    two_qubit_gates: int
    depth: int
    gate_density: float
    retention_lifespan: int
    measurement_density: float
    entanglement_variance: float

    def to_dict(self) -> dict:
        return asdict(self)


def asap_levels(c: Circuit) -> list[int]:
    """Time step of every gate under as-soon-as-possible scheduling.

    Each operation takes one step. Barriers align their qubits without taking
    a step and measurements take none either; both get level 0 in the result.
    """
    ready = [0] * c.num_qubits
    levels = []
    for g in c.gates:
        qs = g.qubits
        if g.kind is K.MEASURE:
            levels.append(0)
            continue
        t = max(ready[q] for q in qs)
        if g.kind is K.BARRIER:
            for q in qs:
                ready[q] = t
            levels.append(0)
            continue
        t += 1
        for q in qs:
            ready[q] = t
        levels.append(t)
    return levels


def depth(c: Circuit) -> int:
    return max(asap_levels(c), default=0)


def compute_metrics(c: Circuit) -> CircuitMetrics:
    n = c.num_qubits
    levels = asap_levels(c)
    first = [0] * n
    last = [0] * n
    two_q = [0] * n
    ops = measures = pairs = 0
    for g, t in zip(c.gates, levels):
        if g.kind is K.MEASURE:
            measures += 1
            continue
        if g.kind is K.BARRIER:
            continue
        ops += 1
        for q in g.qubits:
            if not first[q]:
                first[q] = t
            last[q] = t
        if len(g.qubits) == 2:
            pairs += 1
            for q in g.qubits:
                two_q[q] += 1
    d = max(levels, default=0)
    mean = sum(two_q) / n if n else 0.0
    variance = sum((x - mean) ** 2 for x in two_q) / n if n else 0.0
    total = ops + measures
    return CircuitMetrics(
        num_qubits=n,
        gate_count=ops,
        two_qubit_gates=pairs,
        depth=d,
        gate_density=ops / (d * n) if d and n else 0.0,
        retention_lifespan=max((l - f + 1 for f, l in zip(first, last) if f), default=0),
        measurement_density=measures / total if total else 0.0,
        entanglement_variance=variance,
    )
