"""Exception and warning types raised across the package."""


class RZChartError(Exception):
    """Base class for all package errors."""


class DomainError(RZChartError, ValueError):
    """An input lies outside the mathematical domain of an operation."""


class StationarityError(DomainError):
    """The transition matrix has spectral radius too close to (or above) 1."""


class ApproximationDomainError(DomainError):
    """The ratio quantile approximation has no real root for this tail probability."""


class EstimationError(RZChartError):
    """Least-squares fit failed, typically because the lagged moment matrix is singular."""


class DataError(RZChartError, ValueError):
    """Malformed or inconsistent input data (CSV layout, fixture integrity)."""


class ConfigError(RZChartError, ValueError):
    """Invalid or conflicting run configuration."""


class ApproximationRangeWarning(UserWarning):
    """A coefficient of variation exceeds 0.2, where the ratio quantile
    approximation is no longer known to be accurate."""
