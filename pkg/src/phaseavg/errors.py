"""Exception types shared across the package."""


class InvalidArgumentError(ValueError):
    """An argument is outside the documented domain of an operation."""


class InvalidNetworkError(ValueError):
    """A network violates a structural invariant (dangling wire, dimension mismatch, ...)."""


class RandomBoxesPresentError(InvalidNetworkError):
    """A network still holds random boxes where a deterministic one is required."""


class ResourceLimitError(RuntimeError):
    """A computation would exceed a configured size budget."""
