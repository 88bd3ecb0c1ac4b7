"""Shared exception types."""


class BudgetError(ValueError):
    """An exact computation would exceed its configured size budget."""
