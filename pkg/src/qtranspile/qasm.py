"""OpenQASM 2.0 lexer, parser and writer.

The qelib1.inc gate set is built in, so ``include "qelib1.inc";`` is accepted
and ignored. User ``gate`` blocks are inlined at their call sites and all
angle expressions are folded to floats at parse time.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

from .errors import CircuitError, QasmError, UnknownGateError
from ._util import gc_paused
from .gates import ALIASES, Circuit, Gate, GateKind, kind_from_name, trusted_gate

K = GateKind

KEYWORDS = frozenset(
    {"OPENQASM", "include", "qreg", "creg", "gate", "opaque", "measure",
     "barrier", "reset", "if"}
)

# Gates defined by the (original) qelib1.inc plus the U/CX builtins.
QELIB1 = frozenset(
    k for k in GateKind
    if k not in (K.SX, K.SXDG, K.GPI, K.GPI2, K.GZ, K.MS, K.ZZ, K.MEASURE, K.BARRIER)
)

_OPAQUE_DECL = {
    K.SX: "opaque sx a;",
    K.SXDG: "opaque sxdg a;",
    K.GPI: "opaque gpi(phi) a;",
    K.GPI2: "opaque gpi2(phi) a;",
    K.GZ: "opaque gz(theta) a;",
    K.MS: "opaque ms(phi0,phi1) a,b;",
    K.ZZ: "opaque zz(theta) a,b;",
}


class Token(NamedTuple):
    kind: str  # identifier | number | symbol | string | keyword
    text: str
    line: int
    col: int


class _Tok(NamedTuple):
    kind: str
    text: str
    start: int  # offset into the source


_SKIP_RE = re.compile(r"(?:[ \t\r\f\v\n]+|//[^\n]*)*")
_TOKEN_RE = re.compile(
    r"""
    (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<string>"[^"\n]*")
  | (?P<symbol>->|==|[;,(){}\[\]=*/+\-^])
    """,
    re.VERBOSE,
)

# Fast path for the overwhelmingly common statement shapes: a gate with
# literal parameters on one or two indexed qubits, and a single measurement.
_SIMPLE_RE = re.compile(
    r"""
    (?:\s|//[^\n]*)*
    ([A-Za-z_][A-Za-z0-9_]*)
    (?:[ \t]*\(([-+0-9.eE, \t]*)\))?
    [ \t]+([A-Za-z_][A-Za-z0-9_]*)[ \t]*\[[ \t]*(\d+)[ \t]*\]
    (?:[ \t]*,[ \t]*([A-Za-z_][A-Za-z0-9_]*)[ \t]*\[[ \t]*(\d+)[ \t]*\])?
    [ \t]*;
    """,
    re.VERBOSE,
)
_MEASURE_RE = re.compile(
    r"(?:\s|//[^\n]*)*measure[ \t]+([A-Za-z_][A-Za-z0-9_]*)[ \t]*\[[ \t]*(\d+)[ \t]*\]"
    r"[ \t]*->[ \t]*([A-Za-z_][A-Za-z0-9_]*)[ \t]*\[[ \t]*(\d+)[ \t]*\][ \t]*;"
)


def _position(source: str, offset: int) -> tuple[int, int]:
    line = source.count("\n", 0, offset) + 1
    return line, offset - (source.rfind("\n", 0, offset) + 1) + 1


def _scan(source: str, pos: int) -> tuple[_Tok, int] | None:
    """The token at or after ``pos`` (skipping blanks and comments) and its end."""
    p = _SKIP_RE.match(source, pos).end()
    if p >= len(source):
        return None
    m = _TOKEN_RE.match(source, p)
    if m is None:
        raise QasmError(f"illegal character {source[p]!r}", *_position(source, p))
    kind, text = m.lastgroup, m.group()
    if kind == "ident":
        kind = "keyword" if text in KEYWORDS else "identifier"
    elif kind == "string":
        text = text[1:-1]
    return _Tok(kind, text, p), m.end()


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start, counted = 0, 1, 0, 0
    while (hit := _scan(source, pos)) is not None:
        tok, pos = hit
        nl = source.count("\n", counted, tok.start)
        if nl:
            line += nl
            line_start = source.rfind("\n", counted, tok.start) + 1
        counted = tok.start
        tokens.append(Token(tok.kind, tok.text, line, tok.start - line_start + 1))
    return tokens


@dataclass
class RegisterTable:
    """Flattening table for one kind of register (quantum or classical)."""

    entries: list[tuple[str, int, int]] = field(default_factory=list)
    _index: dict[str, tuple[int, int]] = field(default_factory=dict, repr=False)

    @property
    def size(self) -> int:
        if not self.entries:
            return 0
        _, width, base = self.entries[-1]
        return base + width

    def add(self, name: str, width: int) -> None:
        if name in self._index:
            raise CircuitError(f"register '{name}' declared twice")
        if width <= 0:
            raise CircuitError(f"register '{name}' must have positive width")
        base = self.size
        self.entries.append((name, width, base))
        self._index[name] = (width, base)

    def __contains__(self, name: str) -> bool:
        return name in self._index

    def width(self, name: str) -> int:
        return self._lookup(name)[0]

    def flatten(self, name: str, index: int) -> int:
        width, base = self._lookup(name)
        if not 0 <= index < width:
            raise CircuitError(f"index out of range: {name}[{index}] (width {width})")
        return base + index

    def _lookup(self, name: str) -> tuple[int, int]:
        try:
            return self._index[name]
        except KeyError:
            raise CircuitError(f"unknown register '{name}'") from None


def flatten_register(table: RegisterTable, name: str, index: int) -> int:
    return table.flatten(name, index)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

Expr = Callable[[dict], float]

_FUNCS: dict[str, Callable[[float], float]] = {
    "sin": math.sin, "cos": math.cos, "tan": math.tan, "exp": math.exp,
    "ln": math.log, "sqrt": math.sqrt,
}


_BUILTIN: dict[str, GateKind] = {**{k.value: k for k in GateKind}, **ALIASES}
# gates the regex fast path may build directly: (kind, qubits, params)
_FAST_KINDS: dict[str, tuple[GateKind, int, int]] = {
    name: (k, k.num_qubits, k.num_params)
    for name, k in _BUILTIN.items()
    if 1 <= k.num_qubits <= 2 and not k.is_directive and name not in KEYWORDS
}


@dataclass
class _GateDef:
    params: list[str]
    args: list[str]
    # (name, param expressions, argument names)
    body: list[tuple[str, list[Expr], list[str]]]
    opaque: bool = False


class _Parser:
    def __init__(self, source: str):
        self.src = source
        self.pos = 0
        self._peeked: tuple[_Tok, int] | None = None
        self.qregs = RegisterTable()
        self.cregs = RegisterTable()
        self.gates: list[Gate] = []
        self.defs: dict[str, _GateDef] = {}

    # -- token helpers -----------------------------------------------------
    def _err(self, msg: str, tok: _Tok | None = None) -> QasmError:
        if tok is None:
            tok = self.peek()
        if tok is None:
            return QasmError(f"{msg} at end of input")
        return QasmError(msg, *_position(self.src, tok.start))

    def peek(self) -> _Tok | None:
        if self._peeked is None:
            self._peeked = _scan(self.src, self.pos)
        return self._peeked[0] if self._peeked is not None else None

    def next(self) -> _Tok:
        if self.peek() is None:
            raise self._err("unexpected end of input")
        tok, self.pos = self._peeked
        self._peeked = None
        return tok

    def expect(self, text: str) -> _Tok:
        tok = self.next()
        if tok.text != text or tok.kind == "string":
            raise self._err(f"expected '{text}', found '{tok.text}'", tok)
        return tok

    def accept(self, text: str) -> bool:
        tok = self.peek()
        if tok is not None and tok.text == text and tok.kind in ("symbol", "keyword"):
            self.next()
            return True
        return False

    def ident(self) -> _Tok:
        tok = self.next()
        if tok.kind != "identifier":
            raise self._err(f"expected identifier, found '{tok.text}'", tok)
        return tok

    def integer(self) -> int:
        tok = self.next()
        if tok.kind != "number" or not tok.text.isdigit():
            raise self._err(f"expected integer, found '{tok.text}'", tok)
        return int(tok.text)

    # -- program -----------------------------------------------------------
    def program(self) -> Circuit:
        tok = self.peek()
        if tok is None or tok.text != "OPENQASM":
            raise self._err("missing 'OPENQASM 2.0;' header")
        self.next()
        ver = self.next()
        if ver.kind != "number" or float(ver.text) != 2.0:
            raise self._err(f"unsupported OpenQASM version '{ver.text}'", ver)
        self.expect(";")
        while True:
            if self._fast_statement():
                continue
            if self.peek() is None:
                break
            self.statement()
        if not self.qregs.entries:
            raise QasmError("program declares no qreg")
        return Circuit(self.qregs.size, self.gates, self.cregs.size)

    def _fast_statement(self) -> bool:
        """Consume one simple statement by regex; False defers to the full parser."""
        if self._peeked is not None:
            return False
        src, pos = self.src, self.pos
        m = _SIMPLE_RE.match(src, pos)
        if m is not None:
            name, raw, r0, i0, r1, i1 = m.groups()
            fast = _FAST_KINDS.get(name)
            if fast is None or name in self.defs:
                return False
            kind, nq, np_ = fast
            regs = self.qregs._index
            a = regs.get(r0)
            if a is None or int(i0) >= a[0]:
                return False
            if r1 is None:
                qubits: tuple[int, ...] = (a[1] + int(i0),)
            else:
                b = regs.get(r1)
                if b is None or int(i1) >= b[0]:
                    return False
                qubits = (a[1] + int(i0), b[1] + int(i1))
                if qubits[0] == qubits[1]:
                    return False
            if len(qubits) != nq:
                return False
            try:
                values = tuple(map(float, raw.split(","))) if raw and not raw.isspace() else ()
            except ValueError:
                return False
            if len(values) != np_:
                return False
            self.gates.append(trusted_gate(kind, qubits, values))
        else:
            m = _MEASURE_RE.match(src, pos)
            if m is None:
                return False
            try:
                q = self.qregs.flatten(m.group(1), int(m.group(2)))
                c = self.cregs.flatten(m.group(3), int(m.group(4)))
            except CircuitError:
                return False
            self.gates.append(Gate(K.MEASURE, (q,), (), c))
        self.pos = m.end()
        return True

    def statement(self) -> None:
        tok = self.next()
        text = tok.text
        if tok.kind == "identifier":
            self.application(tok)
        elif text == "qreg" or text == "creg":
            name = self.ident().text
            self.expect("[")
            width = self.integer()
            self.expect("]")
            self.expect(";")
            try:
                (self.qregs if text == "qreg" else self.cregs).add(name, width)
            except CircuitError as e:
                raise self._err(str(e), tok) from None
        elif text == "include":
            path = self.next()
            if path.kind != "string":
                raise self._err("expected file name after include", path)
            if path.text != "qelib1.inc":
                raise self._err(f"unsupported construct: include \"{path.text}\"", path)
            self.expect(";")
        elif text == "gate" or text == "opaque":
            self.gate_decl(opaque=text == "opaque")
        elif text == "measure":
            self.measure(tok)
        elif text == "barrier":
            qubits = self.arg_list(self.qregs)
            self.expect(";")
            flat = sorted({q for arg in qubits for q in arg})
            self.gates.append(Gate(K.BARRIER, tuple(flat)))
        elif text in ("if", "reset"):
            raise self._err(f"unsupported construct: '{text}'", tok)
        else:
            raise self._err(f"unexpected '{text}'", tok)

    # -- declarations --------------------------------------------------------
    def gate_decl(self, opaque: bool) -> None:
        name = self.ident().text
        params: list[str] = []
        if self.accept("("):
            if not self.accept(")"):
                params.append(self.ident().text)
                while self.accept(","):
                    params.append(self.ident().text)
                self.expect(")")
        args = [self.ident().text]
        while self.accept(","):
            args.append(self.ident().text)
        body: list[tuple[str, list[Expr], list[str]]] = []
        if opaque:
            self.expect(";")
        else:
            self.expect("{")
            while not self.accept("}"):
                body.append(self.body_statement(params, args))
        if name in GateKind._value2member_map_ or name in ALIASES:
            # built-in semantics win over a (presumably identical) redefinition
            return
        self.defs[name] = _GateDef(params, args, body, opaque)

    def body_statement(self, params: list[str], args: list[str]):
        tok = self.next()
        if tok.text == "barrier":
            names = [self.ident().text]
            while self.accept(","):
                names.append(self.ident().text)
            self.expect(";")
            return ("barrier", [], names)
        if tok.kind != "identifier":
            raise self._err(f"unexpected '{tok.text}' in gate body", tok)
        exprs: list[Expr] = []
        if self.accept("("):
            if not self.accept(")"):
                exprs.append(self.expr(params))
                while self.accept(","):
                    exprs.append(self.expr(params))
                self.expect(")")
        names = [self.ident().text]
        while self.accept(","):
            names.append(self.ident().text)
        self.expect(";")
        for n in names:
            if n not in args:
                raise self._err(f"unknown gate argument '{n}'", tok)
        return (tok.text, exprs, names)

    # -- statements ----------------------------------------------------------
    def measure(self, tok: _Tok) -> None:
        src = self.arg(self.qregs)
        self.expect("->")
        dst = self.arg(self.cregs)
        self.expect(";")
        if len(src) != len(dst):
            raise self._err("measure register widths differ", tok)
        for q, c in zip(src, dst):
            self.gates.append(Gate(K.MEASURE, (q,), (), c))

    def application(self, tok: _Tok) -> None:
        values: list[float] = []
        if self.accept("("):
            if not self.accept(")"):
                values.append(self._constant(tok))
                while self.accept(","):
                    values.append(self._constant(tok))
                self.expect(")")
        args = self.arg_list(self.qregs)
        self.expect(";")
        widths = {len(a) for a in args if len(a) > 1}
        if len(widths) > 1:
            raise self._err("register arguments of different widths", tok)
        reps = widths.pop() if widths else 1
        try:
            for r in range(reps):
                qubits = [a[r] if len(a) > 1 else a[0] for a in args]
                self.call(tok.text, values, qubits, depth=0)
        except (CircuitError, UnknownGateError, ArithmeticError, ValueError) as e:
            raise self._err(str(e), tok) from None

    def _constant(self, tok: _Tok) -> float:
        e = self.expr(None)
        try:
            return float(e({}))
        except (CircuitError, ArithmeticError, ValueError, TypeError) as exc:
            raise self._err(f"bad angle expression: {exc}", tok) from None

    def call(self, name: str, values: list[float], qubits: list[int], depth: int) -> None:
        if depth > 64:
            raise CircuitError(f"gate '{name}' nests too deeply")
        d = self.defs.get(name)
        if d is None:
            kind = kind_from_name(name)
            if kind.is_directive:
                raise UnknownGateError(name)
            if kind is K.C4X:
                raise UnknownGateError(name, "4-controlled X is not supported")
            if kind.num_qubits != len(qubits):
                raise CircuitError(f"'{name}' expects {kind.num_qubits} qubit(s), got {len(qubits)}")
            if kind.num_params != len(values):
                raise CircuitError(f"'{name}' expects {kind.num_params} parameter(s), got {len(values)}")
            self.gates.append(Gate(kind, tuple(qubits), tuple(values)))
            return
        if d.opaque:
            raise UnknownGateError(name, "opaque gate has no definition")
        if len(d.args) != len(qubits) or len(d.params) != len(values):
            raise CircuitError(f"wrong arity in call to '{name}'")
        env = dict(zip(d.params, values))
        binding = dict(zip(d.args, qubits))
        for sub, exprs, names in d.body:
            qs = [binding[n] for n in names]
            if sub == "barrier":
                self.gates.append(Gate(K.BARRIER, tuple(sorted(set(qs)))))
            else:
                self.call(sub, [e(env) for e in exprs], qs, depth + 1)

    def arg_list(self, table: RegisterTable) -> list[list[int]]:
        args = [self.arg(table)]
        while self.accept(","):
            args.append(self.arg(table))
        return args

    def arg(self, table: RegisterTable) -> list[int]:
        tok = self.ident()
        try:
            if self.accept("["):
                idx = self.integer()
                self.expect("]")
                return [table.flatten(tok.text, idx)]
            base = table.flatten(tok.text, 0)
            return list(range(base, base + table.width(tok.text)))
        except CircuitError as e:
            raise self._err(str(e), tok) from None

    # -- expressions -------------------------------------------------------
    def expr(self, params: list[str] | None) -> Expr:
        left = self.term(params)
        while True:
            if self.accept("+"):
                a, b = left, self.term(params)
                left = lambda env, a=a, b=b: a(env) + b(env)
            elif self.accept("-"):
                a, b = left, self.term(params)
                left = lambda env, a=a, b=b: a(env) - b(env)
            else:
                return left

    def term(self, params) -> Expr:
        left = self.unary(params)
        while True:
            if self.accept("*"):
                a, b = left, self.unary(params)
                left = lambda env, a=a, b=b: a(env) * b(env)
            elif self.accept("/"):
                a, b = left, self.unary(params)
                left = lambda env, a=a, b=b: _divide(a(env), b(env))
            else:
                return left

    def unary(self, params) -> Expr:
        # binds looser than '^', so -2^2 is -(2^2)
        if self.accept("-"):
            inner = self.unary(params)
            return lambda env: -inner(env)
        if self.accept("+"):
            return self.unary(params)
        return self.power(params)

    def power(self, params) -> Expr:
        base = self.primary(params)
        if self.accept("^"):
            exp = self.unary(params)
            return lambda env: base(env) ** exp(env)
        return base

    def primary(self, params) -> Expr:
        tok = self.next()
        if tok.kind == "number":
            v = float(tok.text)
            return lambda env: v
        if tok.text == "(":
            e = self.expr(params)
            self.expect(")")
            return e
        if tok.kind == "identifier":
            name = tok.text
            if name == "pi":
                return lambda env: math.pi
            if name in _FUNCS and self.accept("("):
                fn, arg = _FUNCS[name], self.expr(params)
                self.expect(")")
                return lambda env: fn(arg(env))
            if params is not None and name in params:
                return lambda env: env[name]
            raise self._err(f"unknown identifier '{name}' in expression", tok)
        raise self._err(f"unexpected '{tok.text}' in expression", tok)


def _divide(a: float, b: float) -> float:
    if b == 0:
        raise CircuitError("division by zero in angle expression")
    return a / b


def parse(source: str) -> Circuit:
    """Parse OpenQASM 2.0 text into a flat :class:`Circuit`."""
    with gc_paused():
        return _Parser(source).program()


def parse_file(path) -> Circuit:
    with open(path, encoding="utf-8") as f:
        return parse(f.read())


# ---------------------------------------------------------------------------
# Writer
# ---------------------------------------------------------------------------


def _fmt(x: float) -> str:
    if not math.isfinite(x):
        raise CircuitError(f"cannot emit non-finite angle {x}")
    return repr(float(x))


def emit_qasm(c: Circuit, basis_header: Sequence[str] | None = None) -> str:
    """Serialize ``c`` as OpenQASM 2.0 with a single ``q`` and ``c`` register.

    Gates outside qelib1.inc must be named in ``basis_header``; they are
    declared ``opaque`` in the header. With ``basis_header=None`` every
    native gate present in the circuit is declared automatically.
    """
    used = {g.kind for g in c.gates}
    if basis_header is None:
        declared = {k for k in used if k in _OPAQUE_DECL}
    else:
        declared = {kind_from_name(n) for n in basis_header}
        for k in used:
            if k not in QELIB1 and not k.is_directive and k not in declared:
                raise CircuitError(f"gate '{k}' is not expressible: not in qelib1 or the basis header")
    if K.C4X in used:
        raise CircuitError("gate 'c4x' is not expressible")
    out = ["OPENQASM 2.0;", 'include "qelib1.inc";']
    out.extend(_OPAQUE_DECL[k] for k in sorted(declared, key=lambda k: k.value) if k in _OPAQUE_DECL)
    out.append(f"qreg q[{c.num_qubits}];")
    if c.creg_size:
        out.append(f"creg c[{c.creg_size}];")
    for g in c.gates:
        kind = g.kind
        if kind is K.MEASURE:
            out.append(f"measure q[{g.qubits[0]}] -> c[{g.clbit}];")
            continue
        qs = ",".join(f"q[{q}]" for q in g.qubits)
        if g.params:
            out.append(f"{kind.value}({','.join(_fmt(p) for p in g.params)}) {qs};")
        else:
            out.append(f"{kind.value} {qs};")
    out.append("")
    return "\n".join(out)
