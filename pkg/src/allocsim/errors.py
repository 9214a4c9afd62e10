"""Exception and warning types shared across the package."""

from __future__ import annotations


class AllocSimError(Exception):
    """Base class for all package-specific errors."""


class NoEventsError(AllocSimError):
    """Every sample in a survival dataset is censored."""


class SingularHessianError(AllocSimError):
    """Newton step undefined even with the ridge term (degenerate data)."""


class NonConvergenceError(AllocSimError):
    """Iterative fit failed to meet tolerance within the iteration cap."""


class EmptyBaselineError(AllocSimError):
    """Survival model has no baseline event times to search."""


class NoComparablePairsError(AllocSimError):
    """Concordance is undefined: no comparable pairs in the data."""


class SingleClassError(AllocSimError):
    """Binary fit or AUROC got labels from one class only."""


class TooLargeError(AllocSimError):
    """Instance exceeds the size cap of an enumeration routine."""


class SchemaMismatchError(AllocSimError):
    """Covariate dimensions disagree between data, models, or config."""


class ParseError(AllocSimError):
    """A delimited input file failed to parse.

    Carries the 1-based data row and the column name when known.
    """

    def __init__(self, message: str, row: int | None = None, column: str | None = None):
        where = []
        if row is not None:
            where.append(f"row {row}")
        if column is not None:
            where.append(f"column {column!r}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.row = row
        self.column = column


class EventOutOfRangeError(AllocSimError):
    """A cohort event lies outside the simulation horizon."""


class ConfigError(AllocSimError):
    """A run-configuration file is malformed or fails validation."""


class UnsortedTimestampsWarning(UserWarning):
    """Input rows were not time-sorted; they were sorted on load."""
