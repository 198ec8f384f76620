"""Exception types raised across condlab."""


class ModelError(ValueError):
    """Invalid model parameters or model file."""


class RegimeError(ValueError):
    """An asymptotic formula was requested outside its regime of validity."""


class DomainError(ValueError):
    """Argument outside the domain of a grand-canonical function."""


class BudgetError(ValueError):
    """A computation would exceed its configured size budget."""


class TableMismatchError(ValueError):
    """A partition table was built for a different model."""
