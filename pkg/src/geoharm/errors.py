"""Exception types shared across the package."""


class GeoharmError(Exception):
    """Base class for all errors raised by geoharm."""


class DomainError(GeoharmError, ValueError):
    """A point or parameter lies outside the chart or the operation's domain."""


class ProfileSyntaxError(GeoharmError, ValueError):
    """A metric profile expression failed to parse.

    ``position`` is the character offset in the source text.
    """

    def __init__(self, position: int, message: str):
        self.position = position
        self.message = message
        super().__init__(f"syntax error at offset {position}: {message}")


class QuadratureError(GeoharmError, RuntimeError):
    """Adaptive quadrature did not reach its tolerance."""

    def __init__(self, message: str, estimate: float, error: float):
        self.estimate = estimate
        self.error = error
        super().__init__(f"{message} (estimate={estimate!r}, error={error!r})")


class StepSizeError(GeoharmError, RuntimeError):
    """The ODE step size underflowed, usually near a pole of the metric."""


class PreconditionError(GeoharmError, ValueError):
    """A named precondition of a bound check was violated."""

    def __init__(self, name: str, message: str):
        self.name = name
        super().__init__(f"{name}: {message}")
