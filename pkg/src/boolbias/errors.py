"""Exception types shared across the package."""


class BoolBiasError(Exception):
    """Base class for all package errors."""


class DimensionError(BoolBiasError, ValueError):
    """Input vector or object dimension does not match."""


class BudgetExceeded(BoolBiasError):
    """An exact computation was requested beyond its size budget."""


class MemoryBudgetExceeded(BudgetExceeded):
    """A count map grew past its configured cap."""
