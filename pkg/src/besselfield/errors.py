"""Exception types shared across the package."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class OrderingError(ValueError):
    """Path points or index pairs violate the required ordering relation."""


class RangeError(ValueError):
    """A requested value lies outside the representable or sampled range."""


class StarvationError(RuntimeError):
    """Rejection sampling exhausted its attempt budget.

    Carries the empirical acceptance rate observed before giving up.
    """

    def __init__(self, message: str, attempts: int, accepted: int = 0):
        super().__init__(message)
        self.attempts = attempts
        self.accepted = accepted
        self.acceptance_rate = accepted / attempts if attempts else 0.0


class SimulationError(RuntimeError):
    """A numerical routine inside the simulator failed to converge."""


class AccuracyWarning(UserWarning):
    """A quadrature truncation bound was violated; the value may be degraded."""

