#!/usr/bin/env python3
"""
⚠️ ERRORS - Exception hierarchy shared by every engine
"""

from typing import Optional


class AmputationError(Exception):
    """Base class for all toolkit errors"""


class ValidationError(AmputationError):
    """Invalid argument or config value; names the offending field"""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


class UseMonteCarloError(AmputationError):
    """Exact evaluation unsupported; the caller should fall back to mc_cdf"""

    def __init__(self, message: str = "use-monte-carlo"):
        super().__init__(message)


class DimensionMismatchError(AmputationError):
    """Shapes or dimensions of the inputs disagree"""


class DegenerateMarginError(AmputationError):
    """Quantity undefined because a margin has p in {0, 1}"""


class DataFormatError(AmputationError):
    """Malformed input file; carries the cell location when known"""

    def __init__(self, message: str, row: Optional[int] = None, column: Optional[str] = None):
        location = ""
        if row is not None or column is not None:
            location = f" (row {row}, column {column})"
        super().__init__(message + location)
        self.row = row
        self.column = column


class ConfigError(AmputationError):
    """Missing or invalid configuration keys (usage error)"""


class ImputationError(AmputationError):
    """Imputation cannot proceed (e.g. a column without observed values)"""
