"""Exception types raised across the package."""


class EmptcpError(Exception):
    """Base class for all package errors."""


class DomainError(EmptcpError, ValueError):
    """An input lies outside the domain of a model function."""


class FitError(EmptcpError, ValueError):
    """Coefficient fitting could not be performed on the given data."""


class NotReadyError(EmptcpError, RuntimeError):
    """A predictor was queried before it had enough samples."""


class ConfigError(EmptcpError, ValueError):
    """A configuration or input file is malformed or violates an invariant."""


class SimTimeout(EmptcpError, RuntimeError):
    """A simulation could not complete before its duration limit."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
