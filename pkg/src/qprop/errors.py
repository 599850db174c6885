"""Exception types shared across the package."""


class AllZeroBids(ValueError):
    """Every bid is zero, so the allocation f(b_i)/sum_j f(b_j) is undefined."""


class DomainError(ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class ConvergenceFailure(RuntimeError):
    """An iterative solve missed its tolerance within the iteration budget.

    Carries the best iterate so callers can inspect or report it.
    """

    def __init__(self, message, best_bids=None, residual=None, iterations=None):
        super().__init__(message)
        self.best_bids = best_bids
        self.residual = residual
        self.iterations = iterations


class BracketFailure(RuntimeError):
    """The sign-change bracket for a root solve did not hold numerically."""
