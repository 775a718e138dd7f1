"""Exception types shared across the library."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class ConfigError(ValueError):
    """A scenario or experiment description is inconsistent or incomplete."""


class GeometryError(ValueError):
    """Node positions produce a degenerate geometry (e.g. zero link distance)."""


class DegenerateLosError(ValueError):
    """A phase design that needs LoS components was asked for with none present."""


class MatchingFailureError(ArithmeticError):
    """Gamma moment matching produced a non-positive variance proxy.

    Carries the offending inputs so the caller can log the scenario.
    """

    def __init__(self, message, inputs=None):
        super().__init__(message)
        self.inputs = dict(inputs or {})


class NonConvergenceError(ArithmeticError):
    """An iterative evaluation hit its iteration cap.

    ``partial`` holds the partial sum reached and ``bound`` the magnitude of
    the last term, so callers can decide whether the result is usable.
    """

    def __init__(self, message, partial=None, bound=None):
        super().__init__(message)
        self.partial = partial
        self.bound = bound
