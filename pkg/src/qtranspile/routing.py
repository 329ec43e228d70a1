"""Sabre-style qubit mapping and SWAP insertion.

The search itself runs in a compiled kernel (see ``_sabre_kernel``); this
module prepares flat arrays, replays the kernel's decisions into a physical
circuit and exposes the scoring and pruning rules as plain functions.
"""

from __future__ import annotations

import os
import weakref
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from . import _sabre_kernel as kernel
from .dag import CircuitDag, build_dag, dependencies
from .device import CouplingGraph
from .errors import RoutingError
from .gates import Circuit, Gate, GateKind

K = GateKind
SEED_ENV = "QTRANSPILE_SEED"


@dataclass
class Mapping:
    """Logical-to-physical layout with its inverse, over every graph vertex.

    Logical ids at or above the circuit's qubit count are idle placeholders.
    """

    l2p: list[int]
    p2l: list[int] = field(default_factory=list)

    def __post_init__(self) -> None:
        if not self.p2l:
            if sorted(self.l2p) != list(range(len(self.l2p))):
                raise RoutingError(f"mapping is not a bijection: {self.l2p}")
            self.p2l = [0] * len(self.l2p)
            for l, p in enumerate(self.l2p):
                self.p2l[p] = l
        self.check()

    @classmethod
    def identity(cls, size: int) -> Mapping:
        return cls(list(range(size)), list(range(size)))

    def __len__(self) -> int:
        return len(self.l2p)

    def check(self) -> None:
        n = len(self.l2p)
        if len(self.p2l) != n or sorted(self.l2p) != list(range(n)):
            raise RoutingError(f"mapping is not a bijection: {self.l2p}")
        if any(self.p2l[p] != l for l, p in enumerate(self.l2p)):
            raise RoutingError("l2p and p2l are not inverse")

    def swap_physical(self, p: int, q: int) -> None:
        a, b = self.p2l[p], self.p2l[q]
        self.p2l[p], self.p2l[q] = b, a
        self.l2p[a], self.l2p[b] = q, p

    def copy(self) -> Mapping:
        return Mapping(list(self.l2p), list(self.p2l))


@dataclass(frozen=True)
class RouterConfig:
    extended_set_size: int = 20
    extended_weight: float = 0.5
    decay_increment: float = 0.001
    decay_reset_interval: int = 5
    seed: int = 0
    # None searches every coupling edge
    prune_radius: int | None = 2
    # write inserted SWAPs as three CX; otherwise leave them for basis lowering
    expand_swaps: bool = True

    def __post_init__(self) -> None:
        if not 0.0 <= self.extended_weight <= 1.0:
            raise ValueError("extended_weight must lie in [0, 1]")
        if self.prune_radius is not None and self.prune_radius < 1:
            raise ValueError("prune_radius must be at least 1")
        if self.extended_set_size < 0 or self.decay_reset_interval < 1:
            raise ValueError("extended_set_size >= 0 and decay_reset_interval >= 1 required")

    @classmethod
    def from_env(cls, **overrides) -> RouterConfig:
        """Defaults, with the seed taken from ``QTRANSPILE_SEED`` if set."""
        raw = os.environ.get(SEED_ENV)
        if raw is not None and "seed" not in overrides:
            try:
                overrides["seed"] = int(raw)
            except ValueError:
                raise ValueError(f"{SEED_ENV} must be an integer, got {raw!r}") from None
        return cls(**overrides)


@dataclass(frozen=True)
class RouteResult:
    circuit: Circuit
    initial: Mapping
    final: Mapping
    swaps: tuple[tuple[int, int], ...] = ()

    def __iter__(self) -> Iterator:
        return iter((self.circuit, self.initial, self.final))


# ---------------------------------------------------------------------------
# Scoring rules
# ---------------------------------------------------------------------------

def _pair_sum(gates: Sequence[Gate], dist: np.ndarray, place) -> int:
    return sum(int(dist[place(g.qubits[0]), place(g.qubits[1])]) for g in gates)


def score_swap(
    front: Sequence[Gate],
    extended: Sequence[Gate],
    dist: np.ndarray,
    mapping: Mapping,
    swap: tuple[int, int],
    decay: Sequence[float],
    extended_weight: float = 0.5,
) -> float:
    """Heuristic cost of the layout after swapping physical qubits ``swap``.

    Mean front distance plus ``extended_weight`` times mean lookahead
    distance, scaled by the larger decay of the two qubits. Lower is better.
    """
    p, q = swap
    a, b = mapping.p2l[p], mapping.p2l[q]
    l2p = mapping.l2p

    def place(l: int) -> int:
        return q if l == a else p if l == b else l2p[l]

    front_term = _pair_sum(front, dist, place) / len(front) if front else 0.0
    ext_term = (
        extended_weight * (_pair_sum(extended, dist, place) / len(extended))
        if extended
        else 0.0
    )
    d = decay[p] if decay[p] > decay[q] else decay[q]
    return d * (front_term + ext_term)


def prune_candidates(
    front: Sequence[Gate],
    mapping: Mapping,
    g: CouplingGraph,
    radius: int | None,
) -> list[tuple[int, int]]:
    """Coupling edges worth trying as the next swap.

    An edge is kept when one endpoint lies fewer than ``radius`` hops from a
    physical qubit holding a front-gate operand, so radius 1 keeps exactly the
    edges incident to operands. ``None`` keeps every edge.
    """
    if radius is None:
        return list(g.edges)
    if radius < 1:
        raise ValueError("radius must be at least 1")
    region = {mapping.l2p[l] for gate in front for l in gate.qubits}
    layer = set(region)
    for _ in range(radius - 1):
        layer = {w for v in layer for w in g.adjacency[v]} - region
        region |= layer
    return [e for e in g.edges if e[0] in region or e[1] in region]


def extended_set(dag: CircuitDag, blocked: Sequence[int], size: int) -> list[int]:
    """Up to ``size`` 2q nodes reachable once the ``blocked`` nodes execute.

    Breadth-first from the blocked nodes in ascending id order; a node is
    reached when all of its unexecuted predecessors have been reached.
    """
    gates = dag.gates
    visit = sorted(blocked)
    seen: dict[int, int] = {}
    found: list[int] = []
    i = 0
    while i < len(visit) and len(found) < size:
        v = visit[i]
        i += 1
        for s in dag.succ[v]:
            seen[s] = seen.get(s, 0) + 1
            if seen[s] == dag.indeg[s]:
                visit.append(s)
                g = gates[s]
                if len(g.qubits) == 2 and not g.kind.is_directive:
                    found.append(s)
                    if len(found) == size:
                        break
    return found


# ---------------------------------------------------------------------------
# Kernel plumbing
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class _GraphArrays:
    dist: np.ndarray
    adj_ptr: np.ndarray
    adj_idx: np.ndarray
    inc_ptr: np.ndarray
    inc_edge: np.ndarray
    edge_a: np.ndarray
    edge_b: np.ndarray
    edge_of: np.ndarray


_GRAPH_CACHE: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def _csr(rows: Sequence[Sequence[int]]) -> tuple[np.ndarray, np.ndarray]:
    ptr = np.zeros(len(rows) + 1, dtype=np.int64)
    np.cumsum([len(r) for r in rows], out=ptr[1:])
    idx = np.fromiter((x for r in rows for x in r), dtype=np.int64, count=int(ptr[-1]))
    return ptr, idx


def _graph_arrays(g: CouplingGraph) -> _GraphArrays:
    cached = _GRAPH_CACHE.get(g)
    if cached is not None:
        return cached
    m = g.size
    incident: list[list[int]] = [[] for _ in range(m)]
    edge_of = np.full((m, m), -1, dtype=np.int64)
    for i, (a, b) in enumerate(g.edges):
        incident[a].append(i)
        incident[b].append(i)
        edge_of[a, b] = edge_of[b, a] = i
    adj_ptr, adj_idx = _csr(g.adjacency)
    inc_ptr, inc_edge = _csr(incident)
    arrays = _GraphArrays(
        dist=np.ascontiguousarray(g.dist, dtype=np.int64),
        adj_ptr=adj_ptr,
        adj_idx=adj_idx,
        inc_ptr=inc_ptr,
        inc_edge=inc_edge,
        edge_a=np.array([e[0] for e in g.edges], dtype=np.int64),
        edge_b=np.array([e[1] for e in g.edges], dtype=np.int64),
        edge_of=edge_of,
    )
    _GRAPH_CACHE[g] = arrays
    return arrays


def _node_arrays(gates: Sequence[Gate]) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    n = len(gates)
    q0 = np.full(n, -1, dtype=np.int64)
    q1 = np.full(n, -1, dtype=np.int64)
    is2q = np.zeros(n, dtype=np.bool_)
    for i, gate in enumerate(gates):
        qs = gate.qubits
        q0[i] = qs[0]
        if gate.kind.is_directive:
            continue
        if len(qs) > 2:
            raise RoutingError(f"{gate.kind} acts on {len(qs)} qubits; expand 3-qubit gates first")
        if len(qs) == 2:
            q1[i] = qs[1]
            is2q[i] = True
    return q0, q1, is2q


def _run_pass(
    gates: Sequence[Gate],
    num_qubits: int,
    g: CouplingGraph,
    l2p: Sequence[int],
    cfg: RouterConfig,
    record: bool,
    succ: list[list[int]] | None = None,
    indeg: list[int] | None = None,
) -> tuple[np.ndarray, np.ndarray, int]:
    if succ is None:
        succ, indeg = dependencies(gates, num_qubits)
    q0, q1, is2q = _node_arrays(gates)
    succ_ptr, succ_idx = _csr(succ)
    ga = _graph_arrays(g)
    status, events, n_events, l2p_out, n_swaps = kernel.sabre_pass(
        q0, q1, is2q,
        succ_ptr, succ_idx, np.asarray(indeg, dtype=np.int64),
        ga.dist, ga.adj_ptr, ga.adj_idx, ga.inc_ptr, ga.inc_edge,
        ga.edge_a, ga.edge_b, ga.edge_of,
        np.asarray(l2p, dtype=np.int64),
        int(cfg.extended_set_size), float(cfg.extended_weight),
        float(cfg.decay_increment), int(cfg.decay_reset_interval),
        -1 if cfg.prune_radius is None else int(cfg.prune_radius),
        int(g.diameter), bool(record),
    )
    if status == kernel.UNREACHABLE:
        raise RoutingError("a 2-qubit gate spans disconnected parts of the coupling graph")
    return events[:n_events], l2p_out, int(n_swaps)


def _check_size(num_qubits: int, g: CouplingGraph) -> None:
    if num_qubits > g.size:
        raise RoutingError(
            f"circuit needs {num_qubits} qubits but the coupling graph has {g.size}"
        )


def initial_mapping(
    dag: CircuitDag | Circuit, g: CouplingGraph, cfg: RouterConfig | None = None
) -> Mapping:
    """Layout from one forward and one backward routing pass.

    Starts from the identity layout, routes the circuit forward, routes the
    reversed circuit from the resulting layout and returns that pass's final
    layout.
    """
    cfg = cfg or RouterConfig()
    if isinstance(dag, Circuit):
        dag = build_dag(dag)
    _check_size(dag.num_qubits, g)
    gates = dag.gates
    ident = list(range(g.size))
    if not any(len(x.qubits) == 2 and not x.kind.is_directive for x in gates):
        return Mapping.identity(g.size)
    _, after_forward, _ = _run_pass(gates, dag.num_qubits, g, ident, cfg, record=False)
    _, after_backward, _ = _run_pass(
        gates[::-1], dag.num_qubits, g, after_forward, cfg, record=False
    )
    return Mapping([int(p) for p in after_backward])


def route(
    c: Circuit,
    g: CouplingGraph,
    cfg: RouterConfig | None = None,
    *,
    initial: Mapping | Sequence[int] | None = None,
) -> RouteResult:
    """Route ``c`` onto ``g``; the output circuit uses the graph's vertex ids.

    Iterating the result yields ``(circuit, initial, final)``.
    """
    cfg = cfg or RouterConfig()
    _check_size(c.num_qubits, g)
    if initial is None:
        start = initial_mapping(c, g, cfg)
    elif isinstance(initial, Mapping):
        start = initial.copy()
    else:
        start = _complete(list(initial), g.size)
    if len(start) != g.size:
        raise RoutingError(f"initial mapping covers {len(start)} of {g.size} vertices")

    events, _, _ = _run_pass(c.gates, c.num_qubits, g, start.l2p, cfg, record=True)

    live = start.copy()
    l2p = live.l2p
    gates = c.gates
    edges = g.edges
    out: list[Gate] = []
    swaps: list[tuple[int, int]] = []
    for ev in events.tolist():
        if ev >= 0:
            gate = gates[ev]
            out.append(gate.on(*[l2p[q] for q in gate.qubits]))
            continue
        p, q = edges[-ev - 1]
        live.swap_physical(p, q)
        swaps.append((p, q))
        if cfg.expand_swaps:
            out.append(Gate(K.CX, (p, q)))
            out.append(Gate(K.CX, (q, p)))
            out.append(Gate(K.CX, (p, q)))
        else:
            out.append(Gate(K.SWAP, (p, q)))
    routed = Circuit(g.size, out, c.creg_size)
    return RouteResult(routed, start, live, tuple(swaps))


def _complete(l2p: list[int], size: int) -> Mapping:
    """Extend a partial layout with the unused vertices in ascending order."""
    if len(set(l2p)) != len(l2p) or any(not 0 <= p < size for p in l2p):
        raise RoutingError(f"invalid initial layout {l2p}")
    used = set(l2p)
    l2p = l2p + [p for p in range(size) if p not in used]
    return Mapping(l2p)
