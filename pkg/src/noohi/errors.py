"""Exception types shared by every module.

The CLI maps these onto exit codes, so library code raises them instead of
returning sentinel values.
"""


class InputError(ValueError):
    """Malformed or inconsistent input (exit code 2)."""


class Inconclusive(RuntimeError):
    """A search ran out of budget before reaching a verdict (exit code 3)."""

    def __init__(self, message, detail=None):
        super().__init__(message)
        self.detail = detail


class PrecisionError(ArithmeticError):
    """An l-adic computation fell below the configured precision floor."""
