"""Exception types shared across the package."""


class AgingForecastError(Exception):
    """Base class for all package-specific failures."""


class ConfigError(AgingForecastError):
    """Invalid or inconsistent configuration."""


class SimulationError(AgingForecastError):
    """Reactor simulation failure (non-finite state, runaway cycle, ...).

    ``state`` carries the offending simulator state when available.
    """

    def __init__(self, message, state=None):
        super().__init__(message)
        self.state = state


class IngestionError(AgingForecastError):
    """CSV ingestion failure; message names the offending row/column."""


class FitError(AgingForecastError):
    """Model fitting failure (singular system, NaN loss, ...)."""
