"""Gate dependency DAG with an incrementally maintained front layer.

Edges link each gate to the next gate on each of its qubits, so the graph is
built in one pass with a per-qubit last-writer table. Executing a front node
only touches that node's out-edges; the front is never rebuilt by rescanning.
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .errors import CircuitError
from .gates import Circuit, Gate


class CircuitDag:
    def __init__(self, gates: list[Gate], num_qubits: int, succ: list[list[int]], indeg: list[int]):
        self.gates = gates
        self.num_qubits = num_qubits
        self.succ = succ
        self.indeg = list(indeg)
        self.num_edges = sum(len(s) for s in succ)
        # insertion-ordered set of node ids whose predecessors have all executed
        self.front: dict[int, None] = dict.fromkeys(i for i, d in enumerate(indeg) if d == 0)
        self.executed = 0
        self.edge_visits = 0

    def __len__(self) -> int:
        return len(self.gates)

    @property
    def future(self) -> int:
        """Number of nodes not yet executed and not in the front."""
        return len(self.gates) - self.executed - len(self.front)

    def done(self) -> bool:
        return self.executed == len(self.gates)

    def pop_and_advance(self, node: int) -> list[int]:
        """Execute a front node; return the successors it freed (now in front)."""
        try:
            del self.front[node]
        except KeyError:
            raise CircuitError(f"node {node} is not in the front layer") from None
        self.executed += 1
        freed = []
        indeg = self.indeg
        for s in self.succ[node]:
            self.edge_visits += 1
            indeg[s] -= 1
            if indeg[s] == 0:
                freed.append(s)
                self.front[s] = None
        return freed

    def predecessors(self) -> list[list[int]]:
        preds: list[list[int]] = [[] for _ in self.gates]
        for v, ss in enumerate(self.succ):
            for s in ss:
                preds[s].append(v)
        return preds

    def csr(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(succ_ptr, succ_idx, indeg) arrays describing the unexecuted DAG."""
        ptr = np.zeros(len(self.succ) + 1, dtype=np.int64)
        np.cumsum([len(s) for s in self.succ], out=ptr[1:])
        idx = np.fromiter((x for s in self.succ for x in s), dtype=np.int64, count=int(ptr[-1]))
        return ptr, idx, np.asarray(self.indeg, dtype=np.int64)


def dependencies(gates: Iterable[Gate], num_qubits: int) -> tuple[list[list[int]], list[int]]:
    last = [-1] * num_qubits
    succ: list[list[int]] = []
    indeg: list[int] = []
    for i, g in enumerate(gates):
        succ.append([])
        qs = g.qubits
        if len(qs) == 1:
            p = last[qs[0]]
            if p >= 0:
                succ[p].append(i)
                indeg.append(1)
            else:
                indeg.append(0)
            last[qs[0]] = i
            continue
        preds = {last[q] for q in qs}
        preds.discard(-1)
        for p in sorted(preds):
            succ[p].append(i)
        indeg.append(len(preds))
        for q in qs:
            last[q] = i
    return succ, indeg


def build_dag(c: Circuit) -> CircuitDag:
    succ, indeg = dependencies(c.gates, c.num_qubits)
    return CircuitDag(c.gates, c.num_qubits, succ, indeg)


def pop_and_advance(dag: CircuitDag, node: int) -> list[int]:
    return dag.pop_and_advance(node)
