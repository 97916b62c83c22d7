"""Exception hierarchy shared by the loaders, solvers and the CLI."""


class EnergyIOError(Exception):
    """Base class for all package errors."""


class DataFormatError(EnergyIOError):
    """An input file is malformed or inconsistent with the sector catalog.

    ``location`` carries the file plus row/column context when known.
    """

    def __init__(self, message, location=None):
        self.location = location
        if location:
            message = f"{location}: {message}"
        super().__init__(message)


class ConfigError(EnergyIOError):
    """The run configuration is invalid or references missing files."""


class NonProductiveError(EnergyIOError):
    """(I - A) fails the Hawkins-Simon condition, so no nonnegative inverse exists."""


class SolveError(EnergyIOError):
    """A linear solve failed or its residual exceeded the tolerance."""


class PricingError(EnergyIOError):
    """An energy price cannot be derived for a sector."""


class ReportError(EnergyIOError):
    """A report cannot be produced from the results (e.g. nothing to rank)."""
