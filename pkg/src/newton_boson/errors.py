"""Exception hierarchy shared across the package.

Every error carries a short stable ``code`` used by the CLI when emitting
machine-readable error objects.
"""


class NewtonBosonError(Exception):
    """Base class for all package errors."""

    code = "error"


class DomainError(NewtonBosonError):
    """A function was evaluated outside its domain of definition."""

    code = "domain"


class PoleError(NewtonBosonError):
    """Evaluation at a pole (negative-order factorial powers, gamma ratios)."""

    code = "pole"


class PrecisionError(NewtonBosonError):
    """Requested result cannot be delivered with enough reliable bits."""

    code = "precision"


class CutoffError(NewtonBosonError):
    """Requested order is incompatible with the Fock-space cutoff."""

    code = "cutoff"


class TailError(NewtonBosonError):
    """Truncation tail of a state exceeds the admissible deficit."""

    code = "tail"


class NonConvergenceError(NewtonBosonError):
    """A series evaluation shows no sign of convergence."""

    code = "nonconvergence"


class DivergenceError(NewtonBosonError):
    """An integrand grows too fast for the transform integral to exist."""

    code = "divergence"


class InternalConsistencyError(NewtonBosonError):
    """Two internal computation paths disagree; indicates a bug, not bad input."""

    code = "internal"


class ParseError(NewtonBosonError):
    """Expression text could not be parsed; carries offset and expectations."""

    code = "parse"

    def __init__(self, offset, message, expected=None):
        self.offset = offset
        self.expected = tuple(expected) if expected else ()
        super().__init__(f"syntax error at offset {offset}: {message}")


class UnboundIdentifierError(NewtonBosonError):
    """An identifier in an expression is neither ``x`` nor a bound parameter."""

    code = "unbound"

    def __init__(self, offset, name):
        self.offset = offset
        self.name = name
        super().__init__(f"unbound identifier '{name}' at offset {offset}")


class DivisionByZeroError(NewtonBosonError):
    """Division by zero during expression evaluation."""

    code = "division_by_zero"
