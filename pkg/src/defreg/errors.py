"""Exception hierarchy shared across the package.

CLI exit-code mapping: ConfigError -> 2, BudgetError -> 3, everything
else derived from DefregError (failed checks, estimation, partition) -> 1.
"""


class DefregError(Exception):
    """Base class for all errors raised by this package."""


class ConfigError(DefregError):
    """Invalid configuration or arguments (CLI exit 2)."""


class BudgetError(DefregError):
    """An enumeration/work budget would be exceeded (CLI exit 3)."""


class FieldError(DefregError):
    """Invalid finite-field construction or element."""


class FormulaSyntaxError(DefregError):
    """Parse failure, with a position into the source text."""

    def __init__(self, message: str, position: int, text: str = ""):
        self.position = position
        self.text = text
        line = text.count("\n", 0, position) + 1
        col = position - (text.rfind("\n", 0, position) + 1) + 1
        super().__init__(f"{message} (line {line}, column {col})")


class EstimationError(DefregError):
    """No (dimension, measure) pair fits the counts within the error model."""


class PartitionError(DefregError):
    """No acceptable block structure could be built."""


class CrossFieldInstabilityError(PartitionError):
    """Block structure is not stable across the sampled field family."""


class ClauseViolationError(DefregError):
    """A clause of the regularity statement fails on the given input."""
