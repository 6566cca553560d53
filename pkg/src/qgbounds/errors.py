"""Exception types shared across the package."""


class DataError(Exception):
    """Malformed or unusable input data (CSV files, config documents)."""


class NumericError(Exception):
    """A numeric routine failed to produce a usable result."""


class UsageError(Exception):
    """Invalid command-line usage."""
