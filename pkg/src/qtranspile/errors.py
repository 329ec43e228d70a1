"""Exception hierarchy. Each class maps to one CLI failure class."""


class TranspileError(Exception):
    """Base class for all errors raised by qtranspile."""

    kind = "error"


class CircuitError(TranspileError):
    """Structural problem with a gate or circuit (bad indices, arity...)."""

    kind = "circuit"


class UnknownGateError(TranspileError):
    kind = "gate"

    def __init__(self, name: str, detail: str = ""):
        self.name = name
        msg = f"unknown gate '{name}'"
        super().__init__(f"{msg}: {detail}" if detail else msg)


class QasmError(TranspileError):
    """Lexing or parsing failure. Carries the source position when known."""

    kind = "parse"

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.line = line
        self.col = col
        if line is not None:
            message = f"{message} (line {line}, col {col})"
        super().__init__(message)


class DeviceError(TranspileError):
    kind = "device"


class RoutingError(TranspileError):
    kind = "routing"


class DecompositionError(TranspileError):
    kind = "decompose"
