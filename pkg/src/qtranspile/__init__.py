"""qtranspile: a fast OpenQASM 2.0 transpiler for NISQ devices."""

from .dag import CircuitDag, build_dag, pop_and_advance
from .decompose import Backend, DecompositionRule, decompose_3q, decompose_to_basis, fold_1q_runs
from .device import CouplingGraph, DeviceModel, build_full_graph, load_device, resolve_device, select_limited_region
from .errors import (
    CircuitError,
    DecompositionError,
    DeviceError,
    QasmError,
    RoutingError,
    TranspileError,
    UnknownGateError,
)
from .gates import Circuit, Gate, GateKind, gate_unitary
from .metrics import CircuitMetrics, compute_metrics
from .oracle import circuit_unitary, equivalent_up_to_phase_and_perm
from .pipeline import TranspileResult, transpile
from .qasm import emit_qasm, parse, parse_file, tokenize
from .routing import Mapping, RouterConfig, initial_mapping, prune_candidates, route, score_swap
from .simopt import QubitPriority, constrained_transpile, prioritize_qubits

__all__ = [
    "Backend", "Circuit", "CircuitDag", "CircuitError", "CircuitMetrics", "CouplingGraph",
    "DecompositionError", "DecompositionRule", "DeviceError", "DeviceModel", "Gate", "GateKind",
    "Mapping", "QasmError", "QubitPriority", "RouterConfig", "RoutingError", "TranspileError",
    "TranspileResult", "UnknownGateError", "build_dag", "build_full_graph", "circuit_unitary",
    "compute_metrics", "constrained_transpile", "decompose_3q", "decompose_to_basis",
    "emit_qasm", "equivalent_up_to_phase_and_perm", "fold_1q_runs", "gate_unitary",
    "initial_mapping", "load_device", "parse", "parse_file", "pop_and_advance",
    "prioritize_qubits", "prune_candidates", "resolve_device", "route", "score_swap",
    "select_limited_region", "tokenize", "transpile",
]
