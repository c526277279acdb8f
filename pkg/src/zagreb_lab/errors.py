"""Shared exception types."""


class ParameterError(ValueError):
    """A parameter is outside the domain an operation is defined on."""


class DegenerateDistributionError(ValueError):
    """A sampling distribution has no mass (e.g. all-zero weights)."""


class UndefinedSkewnessError(ValueError):
    """Skewness requested for a distribution with zero variance."""


class BudgetExceededError(RuntimeError):
    """Exhaustive enumeration would visit more histories than the budget allows."""

    def __init__(self, history_count: int, budget: int):
        self.history_count = history_count
        self.budget = budget
        super().__init__(
            f"enumeration would visit {history_count} histories, "
            f"exceeding the budget of {budget}"
        )
