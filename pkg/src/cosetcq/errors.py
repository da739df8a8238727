"""Exception types shared across the package."""


class BudgetExceededError(RuntimeError):
    """Raised when an exact computation would exceed its enumeration budget."""


class ModelViolationError(ValueError):
    """Raised when an input object violates a structural model assumption,

    e.g. a channel whose side receivers are not point-to-point.
    """


class ConsistencyError(RuntimeError):
    """Raised when an internal numerical identity fails beyond tolerance."""


class SpecFileError(ValueError):
    """Raised on malformed channel spec files; carries a human-readable path."""
