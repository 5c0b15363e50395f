"""Exception hierarchy shared across the package."""


class MeanSpinError(Exception):
    """Base class for all package errors."""


class ConfigError(MeanSpinError, ValueError):
    """Invalid user-supplied configuration (qubit counts, grids, config keys)."""


class StructuralError(MeanSpinError, ValueError):
    """Inputs whose shapes or indices do not fit together."""


class NumericalFailure(MeanSpinError, ArithmeticError):
    """An estimate left its admissible range beyond the statistical slack."""


class ProtocolDomainError(MeanSpinError, ValueError):
    """A state falls outside the subspace a protocol is valid on."""


class RoutingError(MeanSpinError, RuntimeError):
    """Two-qubit gate cannot be routed on the coupling graph."""


class CircuitParseError(MeanSpinError, ValueError):
    """Error in circuit text, located by 1-based line and column."""

    category = "parse"

    def __init__(self, message: str, line: int, column: int):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message} [{self.category}]")


class HeaderError(CircuitParseError):
    category = "header"


class UnknownGateError(CircuitParseError):
    category = "unknown-gate"


class ArityError(CircuitParseError):
    category = "arity"


class AngleLiteralError(CircuitParseError):
    category = "angle-literal"


class QubitRangeError(CircuitParseError):
    category = "qubit-range"
