"""Exception types shared across the package."""


class BudgetExceeded(RuntimeError):
    """An exhaustive scan would exceed its configured enumeration budget."""


class GraphFormatError(ValueError):
    """Malformed graph text."""
