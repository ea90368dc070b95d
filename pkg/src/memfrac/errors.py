"""Exception types raised by memfrac."""

from __future__ import annotations


class MemfracError(Exception):
    """Base class for all library errors."""


class InvalidParameterError(MemfracError, ValueError):
    pass


class DomainError(MemfracError, ValueError):
    pass


class ShapeMismatchError(MemfracError, ValueError):
    pass


class StepIndexError(MemfracError, IndexError):
    pass


class QuadratureError(MemfracError, RuntimeError):
    pass


class SolverError(MemfracError, RuntimeError):
    """Linear solve failed. ``report`` carries the last iterate statistics when available."""

    def __init__(self, message, report=None, step=None):
        super().__init__(message)
        self.report = report
        self.step = step


class ConfigError(MemfracError, ValueError):
    pass
