"""Exception hierarchy.

Everything raised on bad *data* derives from :class:`DataError` so the CLI
can map it to exit status 2; bad *arguments* raise :class:`ValueError`
subclasses.
"""
from __future__ import annotations


class OrgnetError(Exception):
    """Base class for all package errors."""


class DataError(OrgnetError):
    """Input data is malformed or inconsistent."""


class AddressError(DataError, ValueError):
    def __init__(self, raw: str, reason: str = "no '@' present"):
        super().__init__(f"cannot parse address {raw!r}: {reason}")
        self.raw = raw


class FormatMismatchError(DataError):
    def __init__(self, message: str, line_no: int | None = None, line: str | None = None):
        super().__init__(message)
        self.line_no = line_no
        self.line = line


class OrgChartError(DataError):
    """Structural problem in an org chart (cycle, unknown parent, duplicate id)."""


class CategoryError(OrgChartError, ValueError):
    pass


class LevelError(OrgnetError, ValueError):
    pass


class StylingError(OrgnetError, ValueError):
    pass


class ConfigError(OrgnetError, ValueError):
    pass


class ParameterError(OrgnetError, ValueError):
    pass


class InsufficientDataError(DataError):
    pass


class ModelInapplicableError(DataError):
    pass
