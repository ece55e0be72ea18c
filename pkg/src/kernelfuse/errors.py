"""Exception types shared across the package."""


class DataError(ValueError):
    """Invalid input data or files: bad shapes, non-finite values, format violations."""


class NumericalError(RuntimeError):
    """A numerical routine failed to produce a usable result."""
