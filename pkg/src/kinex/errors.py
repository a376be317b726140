"""Exception types shared across kinex modules."""


class KinexError(Exception):
    """Base class for kinex-specific failures."""


class DegenerateDataError(KinexError, ValueError):
    """Raised when an input is too degenerate for the requested statistic.

    Covers the all-zero Gini vector, zero-variance moment fits, and
    regressions whose x values are all identical.
    """


class ParseError(KinexError, ValueError):
    """Malformed tabular input. Carries the 1-based line number."""

    def __init__(self, message: str, line_number: int):
        super().__init__(f"line {line_number}: {message}")
        self.line_number = line_number


class ConfigError(KinexError, ValueError):
    """Invalid CLI configuration (unknown key, bad value, bad file)."""
