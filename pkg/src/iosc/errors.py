"""Shared error types and the evaluation-point budget.

Every enumeration in the package is metered in evaluation points.  When a
request would exceed the budget the operation raises BudgetExceeded before
doing the work; there is never a silently truncated or approximate count.
"""

DEFAULT_BUDGET = 10 ** 8


class BudgetExceeded(RuntimeError):
    """An enumeration would exceed the allowed number of evaluation points."""

    def __init__(self, needed: int, budget: int, what: str = "enumeration"):
        super().__init__(
            f"{what} needs {needed} evaluation points, budget is {budget}"
        )
        self.needed = needed
        self.budget = budget


class OracleDisagreement(RuntimeError):
    """Two independent computation routes returned different results.

    This is an internal-consistency failure: reachable only through a bug
    (or deliberate fault injection in tests).
    """


class ZeroIdealError(ValueError):
    """Raised where an operation is undefined for the zero ideal."""


def charge(needed: int, budget: int, what: str = "enumeration") -> None:
    """Raise BudgetExceeded if `needed` points exceed `budget`."""
    if needed > budget:
        raise BudgetExceeded(needed, budget, what)
