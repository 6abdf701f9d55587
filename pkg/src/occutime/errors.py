"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument violates a documented domain restriction."""


class QuadratureError(RuntimeError):
    """A quadrature did not converge within its subdivision budget.

    Carries the achieved error estimate so callers can decide whether
    the partial result is still usable.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate
