"""Exception hierarchy for switchgrade.

Everything the library raises on purpose derives from SwitchgradeError, so the
CLI can catch one thing, log an ✗ line and exit non-zero instead of spraying a
traceback over somebody's terminal.
"""


class SwitchgradeError(Exception):
    """Base class for every deliberate switchgrade failure."""


class InvalidInputError(SwitchgradeError, ValueError):
    """Non-finite entries, empty grids, non-square matrices and friends."""


class DimensionError(SwitchgradeError, ValueError):
    """Shapes that do not line up, or matrices bigger than we agreed to handle."""


class MatrixOverflowError(SwitchgradeError, ArithmeticError):
    """A matrix exponential (or a product of them) left double range."""


class AccuracyError(SwitchgradeError):
    """Quadrature refused to converge to the requested tolerance."""


class RangeError(SwitchgradeError, OverflowError):
    """An integer result would not fit in 64 bits."""


class InconclusiveError(SwitchgradeError):
    """A certificate search found evidence neither way."""


class MethodInapplicableError(SwitchgradeError):
    """The requested method's preconditions do not hold for this system."""


class LambdaInconsistencyError(SwitchgradeError):
    """The polar table failed to close, so the shift used to build it is off."""

    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ConfigurationError(SwitchgradeError):
    """A numeric setup (bracket, budget, grid) cannot produce an answer."""


class ScheduleParseError(SwitchgradeError, ValueError):
    """A schedule file could not be read; carries the offending line."""

    def __init__(self, message: str, line: int = 0, path: str = ''):
        location = f"{path}:{line}" if path else f"line {line}"
        super().__init__(f"{location}: {message}")
        self.line = line
        self.path = path
