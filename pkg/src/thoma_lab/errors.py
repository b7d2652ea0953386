"""Exception types shared across the package.

The CLI maps each of them onto a distinct exit code, so library code raises
the most specific one that applies.
"""


class ThomaLabError(Exception):
    """Base class for all package errors."""


class ContractError(ThomaLabError, ValueError):
    """An operation was called outside its documented precondition."""


class ResourceLimitError(ThomaLabError):
    """An enumeration or materialization would exceed a configured cap."""


class ConfigError(ThomaLabError, ValueError):
    """An experiment configuration could not be parsed or validated."""
