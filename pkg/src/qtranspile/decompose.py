"""Gate decomposition: 3-qubit expansion before routing, basis lowering after.

One-qubit gates are first written as U3(theta, phi, lam) and then lowered per
backend. Two-qubit gates reach CX through their standard expansions and CX is
lowered to the backend's entangler by a fixed template.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Sequence

from .errors import DecompositionError, UnknownGateError
from .gates import EXPANSIONS, Circuit, Gate, GateKind, Step, expand, trusted_gate

K = GateKind
PI = math.pi
HALF_PI = PI / 2
ANGLE_EPS = 1e-12


class Backend(str, Enum):
    IBMQ = "ibmq"
    RIGETTI = "rigetti"
    IONQ = "ionq"
    QUANTINUUM = "quantinuum"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def parse(cls, value: str | Backend) -> Backend:
        try:
            return cls(value)
        except ValueError:
            names = ", ".join(b.value for b in cls)
            raise DecompositionError(f"unknown backend '{value}' (expected one of {names})") from None


BASIS: dict[Backend, frozenset[GateKind]] = {
    Backend.IBMQ: frozenset({K.ID, K.RZ, K.SX, K.X, K.CX}),
    Backend.RIGETTI: frozenset({K.RX, K.RZ, K.CZ}),
    Backend.IONQ: frozenset({K.GPI, K.GPI2, K.GZ, K.MS}),
    Backend.QUANTINUUM: frozenset({K.RX, K.RZ, K.ZZ}),
}


def backend_for_basis(names: Sequence[str]) -> Backend:
    """Backend whose basis matches a device's basis-gate list."""
    kinds = {n.lower() for n in names}
    for b, basis in BASIS.items():
        if kinds == {k.value for k in basis}:
            return b
    for b, basis in BASIS.items():
        if kinds <= {k.value for k in basis}:
            return b
    raise DecompositionError(f"no backend provides basis {sorted(kinds)}")


def normalize_angle(a: float) -> float:
    """Map an angle into (-pi, pi]."""
    r = math.remainder(a, 2 * PI)
    return PI if r <= -PI else r


def _near(a: float, b: float, eps: float = 1e-12) -> bool:
    return abs(normalize_angle(a - b)) <= eps


# ---------------------------------------------------------------------------
# Rule tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DecompositionRule:
    """Rewrite of ``source`` as a gate template for ``target_basis``.

    Qubit roles index the source gate's operands; parameter functions map the
    source parameters to each template gate's parameters.
    """

    source: GateKind
    target_basis: Backend
    template: tuple[Step, ...]

    def apply(self, g: Gate) -> list[Gate]:
        if g.kind is not self.source:
            raise DecompositionError(f"rule for {self.source} applied to {g.kind}")
        return expand(g, self.template)


def _s(kind: GateKind, roles: tuple[int, ...], params: Callable = lambda p: ()) -> Step:
    return (kind, roles, params)


def _c(*vals: float) -> Callable:
    return lambda p: vals


#: CX lowered to each backend's entangler (control is role 0)
CX_RULES: dict[Backend, DecompositionRule] = {
    Backend.IBMQ: DecompositionRule(K.CX, Backend.IBMQ, (_s(K.CX, (0, 1)),)),
    Backend.RIGETTI: DecompositionRule(
        K.CX, Backend.RIGETTI, (_s(K.H, (1,)), _s(K.CZ, (0, 1)), _s(K.H, (1,)))
    ),
    Backend.QUANTINUUM: DecompositionRule(
        K.CX,
        Backend.QUANTINUUM,
        (
            _s(K.H, (1,)),
            _s(K.ZZ, (0, 1), _c(-HALF_PI)),
            _s(K.RZ, (0,), _c(HALF_PI)),
            _s(K.RZ, (1,), _c(HALF_PI)),
            _s(K.H, (1,)),
        ),
    ),
    Backend.IONQ: DecompositionRule(
        K.CX,
        Backend.IONQ,
        (
            _s(K.RY, (0,), _c(HALF_PI)),
            _s(K.MS, (0, 1), _c(0.0, 0.0)),
            _s(K.RX, (0,), _c(-HALF_PI)),
            _s(K.RX, (1,), _c(-HALF_PI)),
            _s(K.RY, (0,), _c(-HALF_PI)),
        ),
    ),
}

#: Shortcuts that avoid a detour through CX
DIRECT_RULES: dict[tuple[GateKind, Backend], DecompositionRule] = {
    (K.CZ, Backend.QUANTINUUM): DecompositionRule(
        K.CZ,
        Backend.QUANTINUUM,
        (
            _s(K.ZZ, (0, 1), _c(-HALF_PI)),
            _s(K.RZ, (0,), _c(HALF_PI)),
            _s(K.RZ, (1,), _c(HALF_PI)),
        ),
    ),
    (K.RZZ, Backend.QUANTINUUM): DecompositionRule(
        K.RZZ, Backend.QUANTINUUM, (_s(K.ZZ, (0, 1), lambda p: (p[0],)),)
    ),
    (K.ZZ, Backend.IBMQ): DecompositionRule(
        K.ZZ, Backend.IBMQ, (_s(K.RZZ, (0, 1), lambda p: (p[0],)),)
    ),
}


def rule_for(kind: GateKind, backend: Backend) -> DecompositionRule | None:
    """The two-qubit rule used for ``kind`` on ``backend`` (None for native gates)."""
    if kind in BASIS[backend]:
        return None
    if kind is K.CX:
        return CX_RULES[backend]
    direct = DIRECT_RULES.get((kind, backend))
    if direct is not None:
        return direct
    if kind in (K.ZZ, K.MS):
        return DecompositionRule(kind, backend, _NATIVE_TO_CX[kind])
    if kind in EXPANSIONS:
        return DecompositionRule(kind, backend, EXPANSIONS[kind])
    return None


# other backends' entanglers written in qelib1 gates
_NATIVE_TO_CX: dict[GateKind, tuple[Step, ...]] = {
    K.ZZ: (_s(K.RZZ, (0, 1), lambda p: (p[0],)),),
    # MS(a, b) is RXX(pi/2) conjugated by Z rotations of a and b
    K.MS: (
        _s(K.RZ, (0,), lambda p: (-p[0],)),
        _s(K.RZ, (1,), lambda p: (-p[1],)),
        _s(K.RXX, (0, 1), _c(HALF_PI)),
        _s(K.RZ, (0,), lambda p: (p[0],)),
        _s(K.RZ, (1,), lambda p: (p[1],)),
    ),
}


# ---------------------------------------------------------------------------
# One-qubit lowering
# ---------------------------------------------------------------------------

_FIXED_U3: dict[GateKind, tuple[float, float, float]] = {
    K.ID: (0.0, 0.0, 0.0),
    K.X: (PI, 0.0, PI),
    K.Y: (PI, HALF_PI, HALF_PI),
    K.Z: (0.0, 0.0, PI),
    K.H: (HALF_PI, 0.0, PI),
    K.S: (0.0, 0.0, HALF_PI),
    K.SDG: (0.0, 0.0, -HALF_PI),
    K.T: (0.0, 0.0, PI / 4),
    K.TDG: (0.0, 0.0, -PI / 4),
    K.SX: (HALF_PI, -HALF_PI, HALF_PI),
    K.SXDG: (-HALF_PI, -HALF_PI, HALF_PI),
}


def u3_angles(g: Gate) -> tuple[float, float, float]:
    """U3 angles equal to ``g`` up to global phase, with theta in [0, pi]."""
    k, p = g.kind, g.params
    if k in _FIXED_U3:
        t, f, l = _FIXED_U3[k]
    elif k is K.U3:
        t, f, l = p
    elif k is K.U2:
        t, f, l = HALF_PI, p[0], p[1]
    elif k in (K.U1, K.RZ, K.GZ):
        t, f, l = 0.0, 0.0, p[0]
    elif k is K.RX:
        t, f, l = p[0], -HALF_PI, HALF_PI
    elif k is K.RY:
        t, f, l = p[0], 0.0, 0.0
    elif k is K.GPI:
        t, f, l = PI, p[0], PI - p[0]
    elif k is K.GPI2:
        t, f, l = HALF_PI, p[0] - HALF_PI, HALF_PI - p[0]
    else:
        raise UnknownGateError(k.value, "not a one-qubit unitary")
    t = normalize_angle(t)
    if t < 0:
        t, f, l = -t, f + PI, l - PI
    return t, normalize_angle(f), normalize_angle(l)


def _rot(kind: GateKind, q: int, angle: float, out: list[Gate]) -> None:
    a = normalize_angle(angle)
    if abs(a) > ANGLE_EPS:
        out.append(trusted_gate(kind, (q,), (a,)))


def _native(g: Gate) -> Gate:
    """``g`` with its angles normalized; reuses ``g`` when nothing changes."""
    if not g.params:
        return g
    params = tuple(normalize_angle(x) for x in g.params)
    return g if params == g.params else trusted_gate(g.kind, g.qubits, params)


def lower_1q(g: Gate, backend: Backend, out: list[Gate]) -> None:
    """Append the backend-basis form of a one-qubit gate to ``out``."""
    q = g.qubits[0]
    if g.kind in BASIS[backend]:
        out.append(_native(g))
        return
    if g.kind is K.ID:
        return
    t, f, l = u3_angles(g)
    zero, half, full = t <= ANGLE_EPS, _near(t, HALF_PI), _near(t, PI)

    if backend is Backend.IBMQ:
        if zero:
            _rot(K.RZ, q, f + l, out)
        elif half:
            _rot(K.RZ, q, l - HALF_PI, out)
            out.append(trusted_gate(K.SX, (q,)))
            _rot(K.RZ, q, f + HALF_PI, out)
        elif full:
            _rot(K.RZ, q, l - f + PI, out)
            out.append(trusted_gate(K.X, (q,)))
        else:
            _rot(K.RZ, q, l, out)
            out.append(trusted_gate(K.SX, (q,)))
            _rot(K.RZ, q, t + PI, out)
            out.append(trusted_gate(K.SX, (q,)))
            _rot(K.RZ, q, f + PI, out)
    elif backend in (Backend.RIGETTI, Backend.QUANTINUUM):
        if zero:
            _rot(K.RZ, q, f + l, out)
        elif full:
            _rot(K.RZ, q, l - f + PI, out)
            out.append(trusted_gate(K.RX, (q,), (PI,)))
        else:
            _rot(K.RZ, q, l - HALF_PI, out)
            out.append(trusted_gate(K.RX, (q,), (normalize_angle(t),)))
            _rot(K.RZ, q, f + HALF_PI, out)
    else:
        if zero:
            _rot(K.GZ, q, f + l, out)
        elif half:
            out.append(trusted_gate(K.GPI2, (q,), (normalize_angle(HALF_PI - l),)))
            _rot(K.GZ, q, f + l, out)
        elif full:
            out.append(trusted_gate(K.GPI, (q,), (normalize_angle((f - l - PI) / 2),)))
        else:
            sx = trusted_gate(K.GPI2, (q,), (0.0,))
            _rot(K.GZ, q, l, out)
            out.append(sx)
            _rot(K.GZ, q, t + PI, out)
            out.append(sx)
            _rot(K.GZ, q, f + PI, out)


# ---------------------------------------------------------------------------
# Passes
# ---------------------------------------------------------------------------

def _expand_3q(g: Gate, out: list[Gate]) -> None:
    if g.kind is K.C4X:
        raise UnknownGateError("c4x", "4-controlled X is not supported")
    if g.kind.is_directive or g.kind.num_qubits <= 2:
        out.append(g)
        return
    for h in expand(g):
        _expand_3q(h, out)


_WIDE = frozenset(k for k in GateKind if k.num_qubits > 2)
_DIRECTIVES = frozenset(k for k in GateKind if k.is_directive)


def decompose_3q(c: Circuit) -> Circuit:
    """Expand every gate on three or more qubits into 1q and 2q gates."""
    if not any(g.kind in _WIDE for g in c.gates):
        return c
    out: list[Gate] = []
    for g in c.gates:
        _expand_3q(g, out)
    return c.copy_with(out, trusted=True)


_Memo = dict[tuple[GateKind, tuple[float, ...]], tuple[tuple[GateKind, tuple[float, ...]], ...]]


def _lower(g: Gate, backend: Backend, out: list[Gate], memo: _Memo, depth: int = 0) -> None:
    kind = g.kind
    if kind in _DIRECTIVES:
        out.append(g)
        return
    n = len(g.qubits)
    if n == 1:
        key = (kind, g.params)
        steps = memo.get(key)
        if steps is None:
            tmp: list[Gate] = []
            lower_1q(g, backend, tmp)
            steps = memo[key] = tuple((h.kind, h.params) for h in tmp)
        q = g.qubits
        out.extend(trusted_gate(k, q, p) for k, p in steps)
        return
    if n > 2:
        raise DecompositionError(f"{kind} acts on {n} qubits; expand 3-qubit gates first")
    if kind in BASIS[backend]:
        out.append(_native(g))
        return
    rule = rule_for(kind, backend)
    if rule is None or depth > 8:
        raise DecompositionError(f"no rule lowers {kind} to {backend}")
    for h in rule.apply(g):
        _lower(h, backend, out, memo, depth + 1)


def decompose_to_basis(c: Circuit, backend: Backend | str) -> Circuit:
    """Rewrite every gate into ``backend``'s basis (measure/barrier pass through)."""
    b = Backend.parse(backend)
    out: list[Gate] = []
    memo: _Memo = {}
    for g in c.gates:
        _lower(g, b, out, memo)
    return c.copy_with(out, trusted=True)


_FOLDABLE = frozenset({K.RZ, K.RX, K.GZ, K.U1, K.ZZ, K.RZZ, K.RXX})


def fold_1q_runs(c: Circuit) -> Circuit:
    """Merge adjacent same-axis rotations on a qubit and drop zero rotations.

    Two rotations are adjacent when no other gate touches their qubits in
    between. Only rotations whose angles simply add are merged.
    """
    out: list[Gate | None] = []
    last: dict[int, int] = {}  # qubit -> index in ``out`` of its latest gate
    for g in c.gates:
        if g.kind in _FOLDABLE:
            prev_idx = last.get(g.qubits[0])
            if (
                prev_idx is not None
                and all(last.get(q) == prev_idx for q in g.qubits)
                and out[prev_idx] is not None
            ):
                prev = out[prev_idx]
                if prev.kind is g.kind and prev.qubits == g.qubits:
                    angle = normalize_angle(prev.params[0] + g.params[0])
                    out[prev_idx] = None if abs(angle) <= ANGLE_EPS else trusted_gate(g.kind, g.qubits, (angle,))
                    if out[prev_idx] is None:
                        for q in g.qubits:
                            last.pop(q, None)
                    continue
            if abs(normalize_angle(g.params[0])) <= ANGLE_EPS:
                continue
        out.append(g)
        for q in g.qubits:
            last[q] = len(out) - 1
    return c.copy_with([g for g in out if g is not None], trusted=True)
