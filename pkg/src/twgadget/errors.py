"""Exceptions shared across modules."""


class BudgetExceededError(RuntimeError):
    """An exact oracle was invoked beyond its configured size budget."""
