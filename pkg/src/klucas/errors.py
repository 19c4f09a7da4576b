"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: domain errors exit 2, precision or
condition failures exit 3, resource limits exit 4.
"""


class KlucasError(Exception):
    """Base class for all toolkit errors."""


class DomainError(KlucasError, ValueError):
    """Input outside an operation's documented domain."""


class PoleError(DomainError):
    """An interval denominator contains zero."""


class InsufficientExpansionError(DomainError):
    """A continued-fraction expansion is too short for the requested bound."""


class SingularBasisError(DomainError):
    """Lattice basis vectors are linearly dependent."""


class PrecisionError(KlucasError, ArithmeticError):
    """Working precision too low to certify the requested quantity."""


class FloorAmbiguityError(PrecisionError):
    """An interval straddles an integer, so its floor cannot be certified."""


class ConditionFailureError(PrecisionError):
    """A reduction's gate condition failed; retry with a larger scaling constant."""


class ResourceLimitError(KlucasError, RuntimeError):
    """A long-running computation hit its configured resource budget."""

    def __init__(self, message: str, journal_path: str | None = None):
        super().__init__(message)
        self.journal_path = journal_path
