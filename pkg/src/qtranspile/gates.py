"""Gate and circuit intermediate representation.

Every pass consumes and produces :class:`Circuit`. Qubit indices are flat
0-based integers; angles are radians. Gate matrices are never stored, they
are computed on demand by :func:`gate_unitary` (and cached per kind/params).

Local matrix convention: the first listed qubit of a gate is the most
significant bit of the matrix index, so for ``cx a,b`` the control ``a``
selects the lower-right block.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np

from .errors import CircuitError, UnknownGateError


class GateKind(str, Enum):
    # basic
    U3 = "u3"
    U2 = "u2"
    U1 = "u1"
    CX = "cx"
    ID = "id"
    # standard
    X = "x"
    Y = "y"
    Z = "z"
    H = "h"
    S = "s"
    SDG = "sdg"
    T = "t"
    TDG = "tdg"
    RX = "rx"
    RY = "ry"
    RZ = "rz"
    # composition
    CZ = "cz"
    CY = "cy"
    SWAP = "swap"
    CH = "ch"
    CCX = "ccx"
    CSWAP = "cswap"
    CRX = "crx"
    CRY = "cry"
    CRZ = "crz"
    CU1 = "cu1"
    CU3 = "cu3"
    RXX = "rxx"
    RZZ = "rzz"
    RCCX = "rccx"
    RC3X = "rc3x"
    C3X = "c3x"
    C3SQRTX = "c3sqrtx"
    C4X = "c4x"
    # device-native gates that appear in transpiled output
    SX = "sx"
    SXDG = "sxdg"
    GPI = "gpi"
    GPI2 = "gpi2"
    GZ = "gz"
    MS = "ms"
    ZZ = "zz"
    # pseudo-ops
    MEASURE = "measure"
    BARRIER = "barrier"

    def __str__(self) -> str:
        return self.value

    @property
    def num_qubits(self) -> int:
        """Qubit arity; 0 means variadic (barrier)."""
        return _ARITY[self][0]

    @property
    def num_params(self) -> int:
        return _ARITY[self][1]

    @property
    def is_directive(self) -> bool:
        return self is GateKind.MEASURE or self is GateKind.BARRIER


K = GateKind

_ARITY: dict[GateKind, tuple[int, int]] = {
    K.U3: (1, 3), K.U2: (1, 2), K.U1: (1, 1), K.CX: (2, 0), K.ID: (1, 0),
    K.X: (1, 0), K.Y: (1, 0), K.Z: (1, 0), K.H: (1, 0), K.S: (1, 0),
    K.SDG: (1, 0), K.T: (1, 0), K.TDG: (1, 0), K.RX: (1, 1), K.RY: (1, 1),
    K.RZ: (1, 1), K.CZ: (2, 0), K.CY: (2, 0), K.SWAP: (2, 0), K.CH: (2, 0),
    K.CCX: (3, 0), K.CSWAP: (3, 0), K.CRX: (2, 1), K.CRY: (2, 1),
    K.CRZ: (2, 1), K.CU1: (2, 1), K.CU3: (2, 3), K.RXX: (2, 1),
    K.RZZ: (2, 1), K.RCCX: (3, 0), K.RC3X: (4, 0), K.C3X: (4, 0),
    K.C3SQRTX: (4, 0), K.C4X: (5, 0),
    K.SX: (1, 0), K.SXDG: (1, 0), K.GPI: (1, 1), K.GPI2: (1, 1),
    K.GZ: (1, 1), K.MS: (2, 2), K.ZZ: (2, 1),
    K.MEASURE: (1, 0), K.BARRIER: (0, 0),
}

#: Names accepted by :func:`kind_from_name` besides the enum values.
ALIASES: dict[str, GateKind] = {
    "U": K.U3,
    "CX": K.CX,
    "u": K.U3,
    "p": K.U1,
    "cp": K.CU1,
    "c3xsqrtx": K.C3SQRTX,
}


def kind_from_name(name: str) -> GateKind:
    try:
        return GateKind(name)
    except ValueError:
        pass
    try:
        return ALIASES[name]
    except KeyError:
        raise UnknownGateError(name) from None


@dataclass(frozen=True, slots=True)
class Gate:
    """One quantum instruction.

    ``clbit`` is only meaningful for MEASURE and names the classical bit the
    result is written to.
    """

    kind: GateKind
    qubits: tuple[int, ...]
    params: tuple[float, ...] = ()
    clbit: int | None = None

    def __post_init__(self) -> None:
        if type(self.qubits) is not tuple:
            object.__setattr__(self, "qubits", tuple(self.qubits))
        if type(self.params) is not tuple:
            object.__setattr__(self, "params", tuple(self.params))
        nq, np_ = _ARITY[self.kind]
        qs = self.qubits
        if nq and len(qs) != nq:
            raise CircuitError(f"{self.kind} expects {nq} qubit(s), got {len(qs)}")
        if not qs:
            raise CircuitError(f"{self.kind} has no qubits")
        if len(qs) > 1 and len(set(qs)) != len(qs):
            raise CircuitError(f"{self.kind} has repeated qubits {qs}")
        if len(self.params) != np_:
            raise CircuitError(
                f"{self.kind} expects {np_} parameter(s), got {len(self.params)}"
            )
        if self.kind is K.MEASURE and self.clbit is None:
            raise CircuitError("measure requires a classical bit")

    @property
    def matrix(self) -> np.ndarray:
        return gate_unitary(self)

    def matrix_parts(self) -> tuple[np.ndarray, np.ndarray]:
        """The gate matrix as separate real and imaginary arrays."""
        m = gate_unitary(self)
        return m.real.copy(), m.imag.copy()

    def on(self, *qubits: int) -> Gate:
        """Same operation on different qubits."""
        return Gate(self.kind, qubits, self.params, self.clbit)

    def __repr__(self) -> str:
        args = f"({', '.join(f'{p:.6g}' for p in self.params)})" if self.params else ""
        extra = f" -> c[{self.clbit}]" if self.clbit is not None else ""
        return f"<{self.kind.value}{args} {list(self.qubits)}{extra}>"


_setattr = object.__setattr__


def trusted_gate(kind: GateKind, qubits: tuple[int, ...], params: tuple[float, ...] = ()) -> Gate:
    """Build a gate without validation, for passes whose operands are known good."""
    g = object.__new__(Gate)
    _setattr(g, "kind", kind)
    _setattr(g, "qubits", qubits)
    _setattr(g, "params", params)
    _setattr(g, "clbit", None)
    return g


@dataclass
class Circuit:
    num_qubits: int
    gates: list[Gate] = field(default_factory=list)
    creg_size: int = 0

    def __post_init__(self) -> None:
        n = self.num_qubits
        if n < 0:
            raise CircuitError("negative qubit count")
        for g in self.gates:
            if max(g.qubits) >= n or min(g.qubits) < 0:
                raise CircuitError(f"{g!r} out of range for {n} qubits")
        self._check_measures()

    def _check_measures(self) -> None:
        seen = set()
        for g in self.gates:
            if g.kind is K.MEASURE:
                if not 0 <= g.clbit < self.creg_size:
                    raise CircuitError(
                        f"classical bit {g.clbit} out of range for creg of {self.creg_size}"
                    )
                if g.clbit in seen:
                    raise CircuitError(f"classical bit {g.clbit} measured twice")
                seen.add(g.clbit)

    def __len__(self) -> int:
        return len(self.gates)

    def __iter__(self) -> Iterator[Gate]:
        return iter(self.gates)

    def append(self, gate: Gate) -> Circuit:
        return append(self, gate)

    @property
    def measure_map(self) -> list[tuple[int, int]]:
        """(qubit, classical bit) pairs in program order."""
        return [(g.qubits[0], g.clbit) for g in self.gates if g.kind is K.MEASURE]

    def copy_with(
        self, gates: list[Gate], num_qubits: int | None = None, *, trusted: bool = False
    ) -> Circuit:
        """Same registers, new gate list.

        ``trusted`` skips validation; passes that only rewrite gates in place
        on the same operands and classical bits use it.
        """
        n = self.num_qubits if num_qubits is None else num_qubits
        if not trusted:
            return Circuit(n, gates, self.creg_size)
        c = object.__new__(Circuit)
        c.num_qubits, c.gates, c.creg_size = n, gates, self.creg_size
        return c


def append(c: Circuit, g: Gate) -> Circuit:
    """Append ``g`` to ``c`` in place (returning ``c``) after a bounds check."""
    for q in g.qubits:
        if not 0 <= q < c.num_qubits:
            raise CircuitError(f"qubit {q} out of range for {c.num_qubits}-qubit circuit")
    if g.kind is K.MEASURE:
        if not 0 <= g.clbit < c.creg_size:
            raise CircuitError(f"classical bit {g.clbit} out of range")
        if any(m.clbit == g.clbit for m in c.gates if m.kind is K.MEASURE):
            raise CircuitError(f"classical bit {g.clbit} measured twice")
    c.gates.append(g)
    return c


def two_qubit_gate_count(c: Circuit | Iterable[Gate]) -> int:
    gates = c.gates if isinstance(c, Circuit) else c
    return sum(1 for g in gates if len(g.qubits) == 2 and g.kind is not K.BARRIER)


def gate_count(c: Circuit) -> int:
    """Number of operations, not counting measurements and barriers."""
    return sum(1 for g in c.gates if not g.kind.is_directive)


# ---------------------------------------------------------------------------
# Standard-gate expansions (qelib1.inc definitions)
# ---------------------------------------------------------------------------

#: One template step: (kind, qubit roles, params as a function of the source params)
Step = tuple[GateKind, tuple[int, ...], Callable[[Sequence[float]], tuple[float, ...]]]

PI = math.pi


def _none(p):
    return ()


def _c(*vals):
    return lambda p: vals


def _s(kind: GateKind, roles: tuple[int, ...], params=_none) -> Step:
    return (kind, roles, params)


def _gray_code_cx(phase: float, pre_post: GateKind | None) -> tuple[Step, ...]:
    """3-controlled phase ladder on the fourth qubit (Gray-code order)."""
    steps: list[Step] = []
    if pre_post:
        steps.append(_s(pre_post, (3,)))
    sign = 1
    seq = [
        (None, 0), ((0, 1), 1), ((0, 1), 1), ((1, 2), 2),
        ((0, 2), 2), ((1, 2), 2), ((0, 2), 2),
    ]
    for cx, ctrl in seq:
        if cx:
            steps.append(_s(K.CX, cx))
        steps.append(_s(K.CU1, (ctrl, 3), _c(sign * phase)))
        sign = -sign
    if pre_post:
        steps.append(_s(pre_post, (3,)))
    return tuple(steps)


EXPANSIONS: dict[GateKind, tuple[Step, ...]] = {
    K.CZ: (_s(K.H, (1,)), _s(K.CX, (0, 1)), _s(K.H, (1,))),
    K.CY: (_s(K.SDG, (1,)), _s(K.CX, (0, 1)), _s(K.S, (1,))),
    K.SWAP: (_s(K.CX, (0, 1)), _s(K.CX, (1, 0)), _s(K.CX, (0, 1))),
    K.CH: (
        _s(K.H, (1,)), _s(K.SDG, (1,)), _s(K.CX, (0, 1)), _s(K.H, (1,)),
        _s(K.T, (1,)), _s(K.CX, (0, 1)), _s(K.T, (1,)), _s(K.H, (1,)),
        _s(K.S, (1,)), _s(K.X, (1,)), _s(K.S, (0,)),
    ),
    K.CCX: (
        _s(K.H, (2,)), _s(K.CX, (1, 2)), _s(K.TDG, (2,)), _s(K.CX, (0, 2)),
        _s(K.T, (2,)), _s(K.CX, (1, 2)), _s(K.TDG, (2,)), _s(K.CX, (0, 2)),
        _s(K.T, (1,)), _s(K.T, (2,)), _s(K.H, (2,)), _s(K.CX, (0, 1)),
        _s(K.T, (0,)), _s(K.TDG, (1,)), _s(K.CX, (0, 1)),
    ),
    K.CSWAP: (_s(K.CX, (2, 1)), _s(K.CCX, (0, 1, 2)), _s(K.CX, (2, 1))),
    K.CRX: (
        _s(K.U1, (1,), _c(PI / 2)),
        _s(K.CX, (0, 1)),
        _s(K.U3, (1,), lambda p: (-p[0] / 2, 0.0, 0.0)),
        _s(K.CX, (0, 1)),
        _s(K.U3, (1,), lambda p: (p[0] / 2, -PI / 2, 0.0)),
    ),
    K.CRY: (
        _s(K.RY, (1,), lambda p: (p[0] / 2,)),
        _s(K.CX, (0, 1)),
        _s(K.RY, (1,), lambda p: (-p[0] / 2,)),
        _s(K.CX, (0, 1)),
    ),
    K.CRZ: (
        _s(K.RZ, (1,), lambda p: (p[0] / 2,)),
        _s(K.CX, (0, 1)),
        _s(K.RZ, (1,), lambda p: (-p[0] / 2,)),
        _s(K.CX, (0, 1)),
    ),
    K.CU1: (
        _s(K.U1, (0,), lambda p: (p[0] / 2,)),
        _s(K.CX, (0, 1)),
        _s(K.U1, (1,), lambda p: (-p[0] / 2,)),
        _s(K.CX, (0, 1)),
        _s(K.U1, (1,), lambda p: (p[0] / 2,)),
    ),
    K.CU3: (
        _s(K.U1, (0,), lambda p: ((p[2] + p[1]) / 2,)),
        _s(K.U1, (1,), lambda p: ((p[2] - p[1]) / 2,)),
        _s(K.CX, (0, 1)),
        _s(K.U3, (1,), lambda p: (-p[0] / 2, 0.0, -(p[1] + p[2]) / 2)),
        _s(K.CX, (0, 1)),
        _s(K.U3, (1,), lambda p: (p[0] / 2, p[1], 0.0)),
    ),
    K.RXX: (
        _s(K.U3, (0,), lambda p: (PI / 2, p[0], 0.0)),
        _s(K.H, (1,)),
        _s(K.CX, (0, 1)),
        _s(K.U1, (1,), lambda p: (-p[0],)),
        _s(K.CX, (0, 1)),
        _s(K.H, (1,)),
        _s(K.U2, (0,), lambda p: (-PI, PI - p[0])),
    ),
    K.RZZ: (
        _s(K.CX, (0, 1)),
        _s(K.U1, (1,), lambda p: (p[0],)),
        _s(K.CX, (0, 1)),
    ),
    K.RCCX: (
        _s(K.U2, (2,), _c(0.0, PI)), _s(K.U1, (2,), _c(PI / 4)),
        _s(K.CX, (1, 2)), _s(K.U1, (2,), _c(-PI / 4)),
        _s(K.CX, (0, 2)), _s(K.U1, (2,), _c(PI / 4)),
        _s(K.CX, (1, 2)), _s(K.U1, (2,), _c(-PI / 4)),
        _s(K.U2, (2,), _c(0.0, PI)),
    ),
    K.RC3X: (
        _s(K.U2, (3,), _c(0.0, PI)), _s(K.U1, (3,), _c(PI / 4)),
        _s(K.CX, (2, 3)), _s(K.U1, (3,), _c(-PI / 4)),
        _s(K.U2, (3,), _c(0.0, PI)), _s(K.CX, (0, 3)),
        _s(K.U1, (3,), _c(PI / 4)), _s(K.CX, (1, 3)),
        _s(K.U1, (3,), _c(-PI / 4)), _s(K.CX, (0, 3)),
        _s(K.U1, (3,), _c(PI / 4)), _s(K.CX, (1, 3)),
        _s(K.U1, (3,), _c(-PI / 4)), _s(K.U2, (3,), _c(0.0, PI)),
        _s(K.U1, (3,), _c(PI / 4)), _s(K.CX, (2, 3)),
        _s(K.U1, (3,), _c(-PI / 4)), _s(K.U2, (3,), _c(0.0, PI)),
    ),
    K.C3X: _gray_code_cx(PI / 4, K.H),
    K.C3SQRTX: _gray_code_cx(PI / 8, K.H),
}


def expand(g: Gate, template: Sequence[Step] | None = None) -> list[Gate]:
    """Instantiate ``template`` (default: the standard expansion) for ``g``."""
    if template is None:
        try:
            template = EXPANSIONS[g.kind]
        except KeyError:
            raise UnknownGateError(g.kind.value, "no standard expansion") from None
    qs, ps = g.qubits, g.params
    return [
        Gate(kind, tuple(qs[r] for r in roles), params(ps))
        for kind, roles, params in template
    ]


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_SX = np.array([[1 + 1j, 1 - 1j], [1 - 1j, 1 + 1j]], dtype=complex) / 2


def u3_matrix(theta: float, phi: float, lam: float) -> np.ndarray:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array(
        [
            [c, -cmath.exp(1j * lam) * s],
            [cmath.exp(1j * phi) * s, cmath.exp(1j * (phi + lam)) * c],
        ],
        dtype=complex,
    )


def _diag(*entries) -> np.ndarray:
    return np.diag(np.array(entries, dtype=complex))


def _controlled(u: np.ndarray, controls: int = 1) -> np.ndarray:
    d = u.shape[0]
    n = d << controls
    m = np.eye(n, dtype=complex)
    m[n - d:, n - d:] = u
    return m


def _pauli_rotation(p: np.ndarray, theta: float) -> np.ndarray:
    return math.cos(theta / 2) * np.eye(p.shape[0]) - 1j * math.sin(theta / 2) * p


def _one_qubit(kind: GateKind, p: Sequence[float]) -> np.ndarray:
    if kind is K.U3:
        return u3_matrix(*p)
    if kind is K.U2:
        return u3_matrix(math.pi / 2, p[0], p[1])
    if kind is K.U1:
        return _diag(1, cmath.exp(1j * p[0]))
    if kind is K.RX:
        return _pauli_rotation(_X, p[0])
    if kind is K.RY:
        return _pauli_rotation(_Y, p[0])
    if kind is K.RZ or kind is K.GZ:
        return _diag(cmath.exp(-0.5j * p[0]), cmath.exp(0.5j * p[0]))
    if kind is K.GPI:
        return np.array(
            [[0, cmath.exp(-1j * p[0])], [cmath.exp(1j * p[0]), 0]], dtype=complex
        )
    if kind is K.GPI2:
        return np.array(
            [[1, -1j * cmath.exp(-1j * p[0])], [-1j * cmath.exp(1j * p[0]), 1]],
            dtype=complex,
        ) / math.sqrt(2)
    fixed = {
        K.ID: _I2, K.X: _X, K.Y: _Y, K.Z: _Z, K.H: _H,
        K.S: _diag(1, 1j), K.SDG: _diag(1, -1j),
        K.T: _diag(1, cmath.exp(0.25j * math.pi)),
        K.TDG: _diag(1, cmath.exp(-0.25j * math.pi)),
        K.SX: _SX, K.SXDG: _SX.conj().T,
    }
    return fixed[kind].copy()


def _ms_matrix(phi0: float, phi1: float) -> np.ndarray:
    s = 1 / math.sqrt(2)
    e = cmath.exp
    return s * np.array(
        [
            [1, 0, 0, -1j * e(-1j * (phi0 + phi1))],
            [0, 1, -1j * e(-1j * (phi0 - phi1)), 0],
            [0, -1j * e(1j * (phi0 - phi1)), 1, 0],
            [-1j * e(1j * (phi0 + phi1)), 0, 0, 1],
        ],
        dtype=complex,
    )


def _multi_qubit(kind: GateKind, p: Sequence[float]) -> np.ndarray:
    if kind is K.CX:
        return _controlled(_X)
    if kind is K.CY:
        return _controlled(_Y)
    if kind is K.CZ:
        return _controlled(_Z)
    if kind is K.CH:
        return _controlled(_H)
    if kind is K.SWAP:
        return np.eye(4, dtype=complex)[[0, 2, 1, 3]]
    if kind is K.CCX:
        return _controlled(_X, 2)
    if kind is K.CSWAP:
        return np.eye(8, dtype=complex)[[0, 1, 2, 3, 4, 6, 5, 7]]
    if kind is K.C3X:
        return _controlled(_X, 3)
    if kind is K.C3SQRTX:
        return _controlled(_SX, 3)
    if kind is K.CRX:
        return _controlled(_one_qubit(K.RX, p))
    if kind is K.CRY:
        return _controlled(_one_qubit(K.RY, p))
    if kind is K.CRZ:
        return _controlled(_one_qubit(K.RZ, p))
    if kind is K.CU1:
        return _controlled(_one_qubit(K.U1, p))
    if kind is K.CU3:
        return _controlled(u3_matrix(*p))
    if kind is K.RXX:
        return _pauli_rotation(np.kron(_X, _X), p[0])
    if kind is K.RZZ or kind is K.ZZ:
        return _pauli_rotation(np.kron(_Z, _Z), p[0])
    if kind is K.MS:
        return _ms_matrix(*p)
    if kind in (K.RCCX, K.RC3X):
        return expansion_unitary(kind, p)
    raise UnknownGateError(kind.value, "no matrix available")


def apply_local(m: np.ndarray, u: np.ndarray, positions: Sequence[int], k: int) -> np.ndarray:
    """Left-multiply the k-qubit operator ``m`` by ``u`` acting on ``positions``."""
    t = len(positions)
    m = m.reshape((2,) * k + (m.shape[-1],))
    ut = u.reshape((2,) * (2 * t))
    m = np.tensordot(ut, m, axes=(list(range(t, 2 * t)), list(positions)))
    # tensordot puts the gate's output axes first; move them back into place
    m = np.moveaxis(m, list(range(t)), list(positions))
    return m.reshape(1 << k, -1)


def expansion_unitary(kind: GateKind, params: Sequence[float] = ()) -> np.ndarray:
    """Product of the gate unitaries of ``kind``'s standard expansion."""
    k = kind.num_qubits
    src = Gate(kind, tuple(range(k)), tuple(params))
    m = np.eye(1 << k, dtype=complex)
    for g in expand(src):
        m = apply_local(m, gate_unitary(g), g.qubits, k)
    return m


@lru_cache(maxsize=4096)
def _cached_unitary(kind: GateKind, params: tuple[float, ...]) -> np.ndarray:
    if kind.is_directive:
        raise CircuitError(f"{kind} has no unitary")
    if kind is K.C4X:
        raise UnknownGateError("c4x", "4-controlled X is not supported")
    m = _one_qubit(kind, params) if kind.num_qubits == 1 else _multi_qubit(kind, params)
    m.setflags(write=False)
    return m


def gate_unitary(g: Gate | GateKind, params: Sequence[float] = ()) -> np.ndarray:
    """The 2^k x 2^k unitary of a gate (read-only array)."""
    if isinstance(g, Gate):
        return _cached_unitary(g.kind, g.params)
    return _cached_unitary(g, tuple(params))
