"""Target hardware: basis gates, coupling graph, hop-distance matrix.

Device JSON schema::

    {"name": str, "num_qubits": int, "basis_gates": [str, ...],
     "coupling_map": [[int, int], ...]}

``coupling_map`` may be omitted for all-to-all devices.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .errors import DeviceError, UnknownGateError
from .gates import GateKind, kind_from_name

K = GateKind


@dataclass(frozen=True)
class DeviceModel:
    name: str
    num_qubits: int
    basis_1q: tuple[GateKind, ...]
    basis_2q: tuple[GateKind, ...]
    edges: tuple[tuple[int, int], ...]
    basis_names: tuple[str, ...] = ()

    @property
    def basis(self) -> frozenset[GateKind]:
        return frozenset(self.basis_1q + self.basis_2q)


def _normalize_edges(pairs, n: int) -> tuple[tuple[int, int], ...]:
    seen = set()
    for pair in pairs:
        if len(pair) != 2:
            raise DeviceError(f"coupling entry {pair!r} is not a pair")
        a, b = int(pair[0]), int(pair[1])
        if not (0 <= a < n and 0 <= b < n):
            raise DeviceError(f"edge {[a, b]} out of range for {n} qubits")
        if a == b:
            raise DeviceError(f"self-loop on qubit {a}")
        seen.add((min(a, b), max(a, b)))
    return tuple(sorted(seen))


def device_from_dict(data: dict) -> DeviceModel:
    for key in ("num_qubits", "basis_gates"):
        if key not in data:
            raise DeviceError(f"device description is missing '{key}'")
    n = data["num_qubits"]
    if not isinstance(n, int) or n <= 0:
        raise DeviceError(f"num_qubits must be a positive integer, got {n!r}")
    b1, b2 = [], []
    for name in data["basis_gates"]:
        try:
            kind = kind_from_name(name)
        except UnknownGateError:
            raise DeviceError(f"unknown basis gate '{name}'") from None
        if kind.is_directive:
            continue
        (b1 if kind.num_qubits == 1 else b2).append(kind)
    if "coupling_map" in data and data["coupling_map"] is not None:
        edges = _normalize_edges(data["coupling_map"], n)
    else:
        edges = tuple((a, b) for a in range(n) for b in range(a + 1, n))
    return DeviceModel(
        name=data.get("name", "device"),
        num_qubits=n,
        basis_1q=tuple(b1),
        basis_2q=tuple(b2),
        edges=edges,
        basis_names=tuple(data["basis_gates"]),
    )


def load_device(json_text: str) -> DeviceModel:
    try:
        data = json.loads(json_text)
    except json.JSONDecodeError as e:
        raise DeviceError(f"malformed device json: {e}") from None
    if not isinstance(data, dict):
        raise DeviceError("device json must be an object")
    return device_from_dict(data)


def device_to_dict(d: DeviceModel) -> dict:
    return {
        "name": d.name,
        "num_qubits": d.num_qubits,
        "basis_gates": list(d.basis_names) or [k.value for k in d.basis_1q + d.basis_2q],
        "coupling_map": [list(e) for e in d.edges],
    }


# ---------------------------------------------------------------------------
# Coupling graph
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class CouplingGraph:
    """Undirected coupling graph over local vertex ids ``0..size-1``.

    ``physical_ids[v]`` is the device qubit behind local vertex ``v``.
    ``dist`` holds BFS hop counts, with ``size + 1`` for unreachable pairs.
    """

    adjacency: tuple[tuple[int, ...], ...]
    dist: np.ndarray
    physical_ids: tuple[int, ...]
    edges: tuple[tuple[int, int], ...] = field(repr=False)

    @property
    def size(self) -> int:
        return len(self.adjacency)

    @property
    def unreachable(self) -> int:
        return self.size + 1

    @cached_property
    def diameter(self) -> int:
        d = self.dist[self.dist < self.unreachable]
        return int(d.max()) if d.size else 0

    def is_connected(self) -> bool:
        return bool((self.dist < self.unreachable).all())

    def has_edge(self, a: int, b: int) -> bool:
        return self.dist[a, b] == 1


def bfs_distances(adjacency, source: int, fill: int) -> list[int]:
    dist = [fill] * len(adjacency)
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        dv = dist[v] + 1
        for w in adjacency[v]:
            if dist[w] == fill:
                dist[w] = dv
                queue.append(w)
    return dist


def _graph(n: int, edges, physical_ids) -> CouplingGraph:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    adjacency = tuple(tuple(sorted(x)) for x in adj)
    fill = n + 1
    dist = np.array([bfs_distances(adjacency, s, fill) for s in range(n)], dtype=np.int32)
    dist.setflags(write=False)
    return CouplingGraph(adjacency, dist, tuple(physical_ids), tuple(sorted(edges)))


def build_full_graph(d: DeviceModel) -> CouplingGraph:
    return _graph(d.num_qubits, d.edges, range(d.num_qubits))


def graph_from_edges(n: int, edges) -> CouplingGraph:
    """Coupling graph straight from an edge list (mostly for tests)."""
    return _graph(n, _normalize_edges(edges, n), range(n))


def select_limited_region(d: DeviceModel, k: int) -> CouplingGraph:
    """Grow a connected k-vertex region and return its induced subgraph.

    Seeds at the highest-degree qubit of a large-enough component, then adds
    the frontier qubit with the most neighbours already inside; ties go to the
    smallest physical index.
    """
    n = d.num_qubits
    if not 1 <= k <= n:
        raise DeviceError(f"region size {k} outside 1..{n}")
    adj: list[set[int]] = [set() for _ in range(n)]
    for a, b in d.edges:
        adj[a].add(b)
        adj[b].add(a)

    comp = [-1] * n
    comp_size: list[int] = []
    for s in range(n):
        if comp[s] != -1:
            continue
        cid = len(comp_size)
        comp[s] = cid
        stack, count = [s], 0
        while stack:
            v = stack.pop()
            count += 1
            for w in adj[v]:
                if comp[w] == -1:
                    comp[w] = cid
                    stack.append(w)
        comp_size.append(count)

    eligible = [v for v in range(n) if comp_size[comp[v]] >= k]
    if not eligible:
        raise DeviceError(
            f"device too fragmented: no connected component with {k} qubits"
        )
    seed = min(eligible, key=lambda v: (-len(adj[v]), v))

    region = {seed}
    links = {}  # frontier vertex -> neighbours inside the region
    for w in adj[seed]:
        links[w] = 1
    while len(region) < k:
        best = min(links, key=lambda v: (-links[v], v))
        del links[best]
        region.add(best)
        for w in adj[best]:
            if w not in region:
                links[w] = links.get(w, 0) + 1

    ids = sorted(region)
    local = {p: i for i, p in enumerate(ids)}
    sub_edges = [(local[a], local[b]) for a, b in d.edges if a in local and b in local]
    return _graph(k, sub_edges, ids)


# ---------------------------------------------------------------------------
# Built-in devices
# ---------------------------------------------------------------------------

BACKEND_BASIS = {
    "ibmq": ["id", "rz", "sx", "x", "cx"],
    "rigetti": ["rx", "rz", "cz"],
    "ionq": ["gpi", "gpi2", "gz", "ms"],
    "quantinuum": ["rx", "rz", "zz"],
}

# IBM Falcon r4 (27 qubits, e.g. Toronto)
FALCON_27_EDGES = [
    (0, 1), (1, 2), (1, 4), (2, 3), (3, 5), (4, 7), (5, 8), (6, 7), (7, 10),
    (8, 9), (8, 11), (10, 12), (11, 14), (12, 13), (12, 15), (13, 14),
    (14, 16), (15, 18), (16, 19), (17, 18), (18, 21), (19, 20), (19, 22),
    (21, 23), (22, 25), (23, 24), (24, 25), (25, 26),
]


def heavy_hex_edges(rows: int, width: int) -> tuple[int, list[tuple[int, int]]]:
    """Heavy-hex lattice in IBM's Eagle/Osprey numbering.

    ``rows`` horizontal chains of ``width`` qubits (the first chain lacks its
    last column, the final chain its first) joined by bridge qubits every
    fourth column, alternating offsets 0 and 2. rows=7, width=15 gives the
    127-qubit Eagle layout; rows=13, width=27 gives 433 qubits.
    """
    edges: list[tuple[int, int]] = []
    next_id = 0
    row_ids: list[dict[int, int]] = []
    for r in range(rows):
        if r == 0:
            cols = range(0, width - 1)
        elif r == rows - 1:
            cols = range(1, width)
        else:
            cols = range(width)
        ids = {}
        for c in cols:
            ids[c] = next_id
            next_id += 1
        for c in cols:
            if c + 1 in ids:
                edges.append((ids[c], ids[c + 1]))
        if row_ids:
            prev = row_ids[-1]
            for c, b in pending:
                edges.append((prev[c], b))
                edges.append((b, ids[c]))
        row_ids.append(ids)
        if r < rows - 1:
            offset = 0 if r % 2 == 0 else 2
            pending = []
            for c in range(offset, width, 4):
                pending.append((c, next_id))
                next_id += 1
    return next_id, edges


def octagonal_edges(rows: int, cols: int) -> tuple[int, list[tuple[int, int]]]:
    """Rigetti Aspen-style lattice of 8-qubit rings.

    Ring positions 0..7 run clockwise starting at the top-left; horizontally
    neighbouring rings couple (2->7, 3->6), vertically neighbouring rings
    couple (4->1, 5->0).
    """
    def q(r, c, i):
        return (r * cols + c) * 8 + i

    edges = []
    for r in range(rows):
        for c in range(cols):
            for i in range(8):
                edges.append((q(r, c, i), q(r, c, (i + 1) % 8)))
            if c + 1 < cols:
                edges.append((q(r, c, 2), q(r, c + 1, 7)))
                edges.append((q(r, c, 3), q(r, c + 1, 6)))
            if r + 1 < rows:
                edges.append((q(r, c, 5), q(r + 1, c, 0)))
                edges.append((q(r, c, 4), q(r + 1, c, 1)))
    return rows * cols * 8, edges


def _builtin(name: str) -> dict | None:
    if name in ("ibmq_toronto", "falcon27"):
        return {"name": name, "num_qubits": 27, "basis_gates": BACKEND_BASIS["ibmq"],
                "coupling_map": FALCON_27_EDGES}
    if name in ("ibm_seattle", "osprey433"):
        n, edges = heavy_hex_edges(13, 27)
        return {"name": name, "num_qubits": n, "basis_gates": BACKEND_BASIS["ibmq"],
                "coupling_map": edges}
    if name in ("ibm_eagle", "eagle127"):
        n, edges = heavy_hex_edges(7, 15)
        return {"name": name, "num_qubits": n, "basis_gates": BACKEND_BASIS["ibmq"],
                "coupling_map": edges}
    if name in ("rigetti_aspen", "aspen80"):
        n, edges = octagonal_edges(2, 5)
        return {"name": name, "num_qubits": n, "basis_gates": BACKEND_BASIS["rigetti"],
                "coupling_map": edges}
    if name == "ionq_aria":
        return {"name": name, "num_qubits": 25, "basis_gates": BACKEND_BASIS["ionq"]}
    if name == "quantinuum_h1":
        return {"name": name, "num_qubits": 20, "basis_gates": BACKEND_BASIS["quantinuum"]}
    head, _, tail = name.rpartition("-")
    if tail.isdigit() and int(tail) > 0:
        n = int(tail)
        if head == "line":
            return {"name": name, "num_qubits": n, "basis_gates": BACKEND_BASIS["ibmq"],
                    "coupling_map": [(i, i + 1) for i in range(n - 1)]}
        if head == "full":
            return {"name": name, "num_qubits": n, "basis_gates": BACKEND_BASIS["ibmq"]}
        if head == "ring":
            return {"name": name, "num_qubits": n, "basis_gates": BACKEND_BASIS["ibmq"],
                    "coupling_map": [(i, (i + 1) % n) for i in range(n)] if n > 2 else
                    [(0, 1)] if n == 2 else []}
    return None


BUILTIN_DEVICES = (
    "ibmq_toronto", "ibm_eagle", "ibm_seattle", "rigetti_aspen", "ionq_aria",
    "quantinuum_h1", "line-N", "ring-N", "full-N",
)


def builtin_device(name: str) -> DeviceModel:
    data = _builtin(name)
    if data is None:
        raise DeviceError(
            f"unknown device '{name}' (built-ins: {', '.join(BUILTIN_DEVICES)})"
        )
    return device_from_dict(data)


def resolve_device(source: str) -> DeviceModel:
    """A device from a JSON file path or a built-in name."""
    if source.endswith(".json"):
        try:
            with open(source, encoding="utf-8") as f:
                return load_device(f.read())
        except OSError as e:
            raise DeviceError(f"cannot read device file {source}: {e.strerror}") from None
    return builtin_device(source)
