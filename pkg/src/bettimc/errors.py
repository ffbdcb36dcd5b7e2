"""Exception hierarchy. The CLI maps each family to its own exit code."""


class BettiError(Exception):
    """Base class for all package errors."""


class InputError(BettiError, ValueError):
    """Malformed or out-of-range input (bad simplex, bad file, bad parameters)."""


class ResourceError(BettiError, RuntimeError):
    """A size guard or sample budget was exceeded."""


class SampleBudgetExceeded(ResourceError):
    def __init__(self, requested: float, budget: int, what: str = "N_p"):
        self.requested = requested
        self.budget = budget
        self.what = what
        super().__init__(f"requested {what}={requested:.6g} exceeds sample budget {budget}")


class NumericError(BettiError, ArithmeticError):
    """An iterative numerical routine failed to converge."""
