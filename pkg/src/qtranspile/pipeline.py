"""End-to-end transpilation: 3q expansion, layout and routing, basis lowering."""

from __future__ import annotations

import dataclasses
import time
from dataclasses import dataclass, field
from functools import lru_cache

from ._util import gc_paused
from .dag import build_dag
from .decompose import Backend, backend_for_basis, decompose_3q, decompose_to_basis, fold_1q_runs
from .device import CouplingGraph, DeviceModel, build_full_graph, select_limited_region
from .gates import Circuit
from .routing import Mapping, RouterConfig, initial_mapping, route

STAGES = ("parse", "configure", "route", "decompose", "emit")


@dataclass
class TranspileResult:
    """A transpiled circuit over ``graph``'s vertex ids.

    ``graph.physical_ids`` maps those ids to device qubits; it is the identity
    unless routing ran on a limited region.
    """

    circuit: Circuit
    initial: Mapping
    final: Mapping
    graph: CouplingGraph
    backend: Backend
    swaps: int
    timings: dict[str, float] = field(default_factory=dict)

    @property
    def physical_ids(self) -> tuple[int, ...]:
        return self.graph.physical_ids


@lru_cache(maxsize=16)
def device_graph(d: DeviceModel) -> CouplingGraph:
    return build_full_graph(d)


def transpile(
    c: Circuit,
    device: DeviceModel,
    backend: Backend | str | None = None,
    cfg: RouterConfig | None = None,
    *,
    constrained: bool = False,
    fold: bool = True,
) -> TranspileResult:
    """Expand 3q gates, route onto the device, then lower to the basis.

    With ``constrained`` the router only sees a connected region of
    ``c.num_qubits`` device qubits.
    """
    with gc_paused():
        return _transpile(c, device, backend, cfg, constrained, fold)


def _transpile(c, device, backend, cfg, constrained, fold) -> TranspileResult:
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    b = Backend.parse(backend) if backend is not None else backend_for_basis(device.basis_names)
    cfg = dataclasses.replace(cfg or RouterConfig(), expand_swaps=b is Backend.IBMQ)
    if constrained:
        graph = select_limited_region(device, max(c.num_qubits, 1))
    else:
        graph = device_graph(device)
    timings["configure"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    flat = decompose_3q(c)
    t_3q = time.perf_counter() - t0

    t0 = time.perf_counter()
    layout = initial_mapping(build_dag(flat), graph, cfg)
    routed = route(flat, graph, cfg, initial=layout)
    timings["route"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    out = decompose_to_basis(routed.circuit, b)
    if fold:
        out = fold_1q_runs(out)
    timings["decompose"] = t_3q + time.perf_counter() - t0

    return TranspileResult(
        circuit=out,
        initial=routed.initial,
        final=routed.final,
        graph=graph,
        backend=b,
        swaps=len(routed.swaps),
        timings=timings,
    )
