"""Exception types shared across the solver stack."""


class CoopSenseError(Exception):
    """Base class for solver errors."""


class InfeasibleAllocationError(CoopSenseError):
    """The requested allocation cannot be served within the energy budget.

    Raised when the per-bit energy floor (power -> 0, time -> infinity)
    already exceeds the budget, so no transmission schedule exists.
    """


class ConvergenceError(CoopSenseError):
    """An iterative solver hit its iteration cap before reaching tolerance."""

    def __init__(self, message: str, best_gap: float | None = None):
        super().__init__(message)
        self.best_gap = best_gap


class BracketError(CoopSenseError):
    """A root bracket does not contain a sign change."""
