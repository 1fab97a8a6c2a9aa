"""Exception types shared across the package."""


class DomainError(ValueError):
    """Arguments fall outside the region where a formula is defined."""


class CollisionError(DomainError):
    """The configuration is too close to one of the primaries."""


class ConvergenceError(RuntimeError):
    """An iterative solver or quadrature failed to reach its tolerance.

    ``estimate`` carries the last achieved error estimate when one exists.
    """

    def __init__(self, message, estimate=None):
        super().__init__(message)
        self.estimate = estimate


class AssumptionAError(DomainError):
    """The resonance function has extra zeros or a degenerate derivative."""
