"""Exception types shared across the package."""


class SouvlakiError(Exception):
    """Base class for package errors."""


class CoordinateError(SouvlakiError):
    """A vertex coordinate is outside its declared range."""


class BudgetExceededError(SouvlakiError):
    """A construction would exceed the configured memory budget.

    Carries the estimated vertex count so callers can report it.
    """

    def __init__(self, estimate, budget):
        self.estimate = estimate
        self.budget = budget
        super().__init__(
            f"estimated {estimate} vertices exceeds budget {budget}")


class SolverError(SouvlakiError):
    """An iterative solve failed to reach the requested residual."""

    def __init__(self, message, residual=None, iterations=None):
        self.residual = residual
        self.iterations = iterations
        super().__init__(message)
