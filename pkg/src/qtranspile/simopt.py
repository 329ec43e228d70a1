"""Simulation-oriented passes: region-limited routing and qubit prioritization."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .device import DeviceModel
from .errors import CircuitError
from .gates import Circuit, GateKind
from .pipeline import TranspileResult, transpile
from .routing import RouterConfig

K = GateKind


@dataclass(frozen=True)
class QubitPriority:
    """Qubit indices, highest priority first.

    A partial order is completed with the missing indices in ascending order
    at the lowest priorities.
    """

    order: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "order", tuple(int(q) for q in self.order))
        if any(q < 0 for q in self.order):
            raise CircuitError(f"negative qubit in priority {list(self.order)}")
        if len(set(self.order)) != len(self.order):
            raise CircuitError(f"duplicate qubit in priority {list(self.order)}")

    @classmethod
    def parse(cls, text: str) -> QubitPriority:
        """From a comma list such as ``"2,0,1"``."""
        try:
            return cls(tuple(int(x) for x in text.split(",") if x.strip()))
        except ValueError:
            raise CircuitError(f"invalid qubit priority list {text!r}") from None

    def complete(self, num_qubits: int) -> list[int]:
        if any(q >= num_qubits for q in self.order):
            raise CircuitError(
                f"priority {list(self.order)} names a qubit outside 0..{num_qubits - 1}"
            )
        listed = set(self.order)
        return list(self.order) + [q for q in range(num_qubits) if q not in listed]


def gate_counts(c: Circuit) -> list[int]:
    """Gates touching each qubit; measurements and barriers are not counted."""
    counts = [0] * c.num_qubits
    for g in c.gates:
        if g.kind.is_directive:
            continue
        for q in g.qubits:
            counts[q] += 1
    return counts


def priority_permutation(c: Circuit, prio: QubitPriority) -> list[int]:
    """``perm[q]`` is the new index of qubit ``q``.

    The busiest qubit takes the highest-priority slot, the next busiest the
    next slot and so on; equal counts keep ascending index order.
    """
    slots = prio.complete(c.num_qubits)
    counts = gate_counts(c)
    busiest = sorted(range(c.num_qubits), key=lambda q: (-counts[q], q))
    perm = [0] * c.num_qubits
    for q, slot in zip(busiest, slots):
        perm[q] = slot
    return perm


def relabel_qubits(c: Circuit, perm: Sequence[int]) -> Circuit:
    return c.copy_with([g.on(*(perm[q] for q in g.qubits)) for g in c.gates])


def prioritize_qubits(c: Circuit, prio: QubitPriority) -> Circuit:
    """Re-index qubits so the busiest ones land on the high-priority indices."""
    return relabel_qubits(c, priority_permutation(c, prio))


def constrained_transpile(
    c: Circuit,
    d: DeviceModel,
    cfg: RouterConfig | None = None,
    backend: str | None = None,
) -> TranspileResult:
    """Transpile on a connected region of ``c.num_qubits`` device qubits.

    Output indices are region-local; ``result.physical_ids`` maps them back
    to device qubits.
    """
    if c.num_qubits > d.num_qubits:
        raise CircuitError(f"{c.num_qubits}-qubit circuit does not fit {d.num_qubits}-qubit device")
    return transpile(c, d, backend, cfg, constrained=True)
