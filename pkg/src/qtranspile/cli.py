"""Command line driver: ``qtranspile run | bench | verify``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .decompose import Backend
from .device import resolve_device
from .errors import CircuitError, TranspileError
from .gates import Circuit, gate_count, two_qubit_gate_count
from .metrics import compute_metrics, depth
from .oracle import MAX_QUBITS, circuit_unitary, equivalent_up_to_phase_and_perm, routed_equivalent, strip_measures
from .pipeline import STAGES, transpile
from .qasm import emit_qasm, parse_file
from .routing import RouterConfig
from .simopt import QubitPriority, priority_permutation, relabel_qubits

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_CODES = {"parse": 3, "gate": 3, "circuit": 3, "device": 4, "routing": 5, "decompose": 6, "io": 7}

#: bench report columns, in order
BENCH_COLUMNS = (
    "file", "qubits", "in_2q", "in_total", "in_depth",
    "out_2q", "out_total", "out_depth", "swaps", "time_s", "status",
)


class IOFailure(TranspileError):
    kind = "io"


@dataclass(frozen=True)
class JobConfig:
    input: Path
    device: str
    backend: str
    output: Path | None = None
    constrained: bool = False
    prune_radius: int | None = 2
    qubit_priority: QubitPriority | None = None
    stats: bool = False
    verify: bool = False
    timing: bool = False

    def __post_init__(self) -> None:
        Backend.parse(self.backend)


def _read_circuit(path: Path) -> Circuit:
    try:
        return parse_file(path)
    except FileNotFoundError:
        raise IOFailure(f"input file not found: {path}") from None
    except OSError as e:
        raise IOFailure(f"cannot read {path}: {e.strerror}") from None


def _write(path: Path, text: str) -> None:
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise IOFailure(f"cannot write {path}: {e.strerror}") from None


def _radius(text: str) -> int | None:
    if text.lower() in ("none", "all", "off"):
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("prune radius must be at least 1")
    return value


def transpile_job(cfg: JobConfig, out=None) -> int:
    """Run one job; returns the exit status (errors propagate as exceptions)."""
    out = out or sys.stdout
    timings: dict[str, float] = {}
    t0 = time.perf_counter()
    circuit = _read_circuit(cfg.input)
    timings["parse"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    device = resolve_device(cfg.device)
    router = RouterConfig.from_env(prune_radius=cfg.prune_radius)
    t_device = time.perf_counter() - t0

    result = transpile(circuit, device, cfg.backend, router, constrained=cfg.constrained)
    timings.update(result.timings)
    timings["configure"] += t_device

    final_circuit = result.circuit
    initial, final = list(result.initial.l2p), list(result.final.l2p)
    if cfg.qubit_priority is not None:
        perm = priority_permutation(final_circuit, cfg.qubit_priority)
        final_circuit = relabel_qubits(final_circuit, perm)
        initial = [perm[p] for p in initial]
        final = [perm[p] for p in final]

    t0 = time.perf_counter()
    text = emit_qasm(final_circuit)
    if cfg.output is not None:
        _write(cfg.output, text)
        if cfg.constrained:
            sidecar = {
                "region_to_physical": list(result.physical_ids),
                "initial_layout": initial[: circuit.num_qubits],
                "final_layout": final[: circuit.num_qubits],
            }
            _write(cfg.output.with_suffix(cfg.output.suffix + ".map.json"), json.dumps(sidecar) + "\n")
    else:
        out.write(text)
    timings["emit"] = time.perf_counter() - t0

    status = EXIT_OK
    if cfg.verify:
        ok = routed_equivalent(circuit, final_circuit, initial, final)
        print(f"verify: {'equivalent' if ok else 'NOT equivalent'}", file=out)
        status = EXIT_OK if ok else EXIT_MISMATCH
    if cfg.stats:
        print(json.dumps(compute_metrics(final_circuit).to_dict(), sort_keys=True), file=out)
    if cfg.timing:
        total = sum(timings.values()) or 1.0
        for stage in STAGES:
            t = timings.get(stage, 0.0)
            print(f"{stage:<10} {t:10.4f} s {100 * t / total:6.1f}%", file=out)
    return status


def bench_rows(corpus: Path, device: str, backend: str) -> list[dict]:
    """One report row per ``.qasm`` file in ``corpus`` (sorted by name)."""
    files = sorted(corpus.glob("*.qasm"))
    dev = resolve_device(device)
    router = RouterConfig.from_env()
    rows = []
    for path in files:
        row = {k: "" for k in BENCH_COLUMNS}
        row["file"] = path.name
        try:
            c = parse_file(path)
            row.update(
                qubits=c.num_qubits, in_2q=two_qubit_gate_count(c),
                in_total=gate_count(c), in_depth=depth(c),
            )
            t0 = time.perf_counter()
            res = transpile(c, dev, backend, router)
            elapsed = time.perf_counter() - t0
            out = res.circuit
            row.update(
                out_2q=two_qubit_gate_count(out), out_total=gate_count(out),
                out_depth=depth(out), swaps=res.swaps, time_s=f"{elapsed:.4f}", status="ok",
            )
        except (TranspileError, OSError) as e:
            row["status"] = f"error: {getattr(e, 'kind', 'io')}: {e}"
        rows.append(row)
    return rows


def format_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=BENCH_COLUMNS, lineterminator="\n")
    w.writeheader()
    w.writerows(rows)
    return buf.getvalue()


def format_table(rows: Sequence[dict]) -> str:
    cells = [list(BENCH_COLUMNS)] + [[str(r[k]) for k in BENCH_COLUMNS] for r in rows]
    widths = [max(len(row[i]) for row in cells) for i in range(len(BENCH_COLUMNS))]
    return "\n".join(
        "  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip() for row in cells
    ) + "\n"


def verify_files(a: Path, b: Path, perm: list[int] | None) -> bool:
    ca, cb = strip_measures(_read_circuit(a)), strip_measures(_read_circuit(b))
    if ca.num_qubits != cb.num_qubits:
        return False
    if ca.num_qubits > MAX_QUBITS:
        raise CircuitError(f"verify supports at most {MAX_QUBITS} qubits")
    return equivalent_up_to_phase_and_perm(circuit_unitary(ca), circuit_unitary(cb), perm)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qtranspile", description="Fast OpenQASM 2.0 transpiler")
    sub = p.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="transpile one circuit")
    run.add_argument("-i", "--input", required=True, type=Path)
    run.add_argument("-d", "--device", required=True, help="device JSON path or built-in name")
    run.add_argument("-b", "--backend", required=True, choices=[b.value for b in Backend])
    run.add_argument("-o", "--output", type=Path, help="output file (default: stdout)")
    run.add_argument("--constrained", action="store_true", help="route on a minimal region")
    run.add_argument("--prune-radius", type=_radius, default=2, metavar="N")
    run.add_argument("--qubit-priority", type=QubitPriority.parse, metavar="a,b,c",
                     help="qubit indices, highest priority first")
    run.add_argument("--stats", action="store_true", help="print circuit metrics as JSON")
    run.add_argument("--verify", action="store_true", help="check the result with the unitary oracle")
    run.add_argument("--time", dest="timing", action="store_true", help="print per-stage timings")

    bench = sub.add_parser("bench", help="transpile every .qasm file in a directory")
    bench.add_argument("corpus", type=Path)
    bench.add_argument("-d", "--device", required=True)
    bench.add_argument("-b", "--backend", required=True, choices=[b.value for b in Backend])
    bench.add_argument("-o", "--output", type=Path, help="CSV report path")

    ver = sub.add_parser("verify", help="compare two circuits up to phase and permutation")
    ver.add_argument("a", type=Path)
    ver.add_argument("b", type=Path)
    ver.add_argument("--perm", type=lambda s: [int(x) for x in s.split(",")], metavar="p0,p1,...")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            job = JobConfig(
                input=args.input, device=args.device, backend=args.backend, output=args.output,
                constrained=args.constrained, prune_radius=args.prune_radius,
                qubit_priority=args.qubit_priority, stats=args.stats, verify=args.verify,
                timing=args.timing,
            )
            return transpile_job(job)
        if args.command == "bench":
            if not args.corpus.is_dir():
                raise IOFailure(f"corpus directory not found: {args.corpus}")
            rows = bench_rows(args.corpus, args.device, args.backend)
            if args.output is not None:
                _write(args.output, format_csv(rows))
            sys.stdout.write(format_table(rows))
            return EXIT_OK
        ok = verify_files(args.a, args.b, args.perm)
        print("equivalent" if ok else "not equivalent")
        return EXIT_OK if ok else EXIT_MISMATCH
    except TranspileError as e:
        print(f"qtranspile: {e.kind} error: {e}", file=sys.stderr)
        return EXIT_CODES.get(e.kind, EXIT_USAGE)
    except ValueError as e:
        print(f"qtranspile: error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
