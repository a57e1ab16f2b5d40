"""Exception types shared across the package."""


class PhysicalityError(ValueError):
    """A covariance matrix violates the quantum uncertainty bound."""


class InsufficientDataError(RuntimeError):
    """Too few samples to run an estimation routine."""
