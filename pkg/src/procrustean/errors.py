"""Exception hierarchy shared by all modules."""


class ProcrusteanError(Exception):
    """Base class for every error raised by this package."""


class DomainError(ProcrusteanError, ValueError):
    """A parameter lies outside the mathematical domain of an operation.

    ``value`` carries the offending quantity when one is meaningful, e.g. the
    effective squeezing ``lambda'`` that made a geometric series diverge.
    """

    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class TruncationError(ProcrusteanError):
    """The Fock cutoff needed for the requested accuracy exceeds the cap."""


class ContractError(ProcrusteanError, ValueError):
    """An input violates a precondition (e.g. an unnormalized state)."""


class DegenerateFitError(ProcrusteanError):
    """Too few usable amplitudes to fit an effective squeezing parameter."""


class ProjectionError(ProcrusteanError):
    """The measurement outcome has (numerically) zero probability density."""


class GridError(ProcrusteanError):
    """The sampling grid fails to capture the probability mass."""
