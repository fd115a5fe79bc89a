"""Exception types shared across the package."""


class InputError(ValueError):
    """Raised when inputs violate a documented precondition."""


class ResourceError(RuntimeError):
    """Raised when a computation would exceed a configured budget.

    The message always names the budget that would be required, so callers
    can rerun with an explicit larger budget instead of silently truncating.
    """
