"""Exception types shared across the package."""


class ValidationError(ValueError):
    """Input outside the stated domain of an operation."""


class ResourceLimitError(RuntimeError):
    """A computation exceeded its configured budget before converging."""


class InternalCheckError(AssertionError):
    """A machine-checked identity failed; indicates a bug, not bad input."""
