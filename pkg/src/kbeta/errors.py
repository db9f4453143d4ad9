"""Exception types shared across the package.

Everything raised on purpose derives from KBetaError so callers can catch
one base class at API boundaries (the CLI maps these onto exit codes).
"""


class KBetaError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(KBetaError):
    """Parameter or argument outside the supported domain."""


class PoleError(DomainError):
    """Evaluation requested at (or numerically indistinguishable from) a pole."""


class SeriesGuardError(DomainError):
    """Series evaluation refused: |argument| exceeds the configured guard."""


class ConvergenceError(KBetaError):
    """An iterative computation failed to reach its tolerance within budget."""


class NonIntegrableSingularityError(DomainError):
    """Endpoint exponent <= -1: the requested integral does not exist."""


class TailDivergenceError(KBetaError):
    """Fitted tail of a semi-infinite integrand does not decay fast enough."""


class LogOverflowError(KBetaError):
    """Result exceeds double range; carries the log of the value instead.

    Attributes:
        log_value: natural log of the (positive) result.
    """

    def __init__(self, message: str, log_value: float):
        super().__init__(message)
        self.log_value = log_value
