"""Exception hierarchy shared by the numerical modules and the CLI."""

from __future__ import annotations


class LCManifoldError(Exception):
    """Base class for all toolkit errors."""


class DomainError(LCManifoldError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularSystemError(LCManifoldError, ArithmeticError):
    """The order-2 coefficient system has no unique solution."""


class IntegrationError(LCManifoldError, RuntimeError):
    """Time stepping failed.

    ``last_time`` is the last time at which the state was still finite.
    """

    def __init__(self, message: str, last_time: float):
        super().__init__(f"{message} (last good t={last_time:.17g})")
        self.last_time = last_time


class InsufficientDataError(LCManifoldError, ValueError):
    """A series is too short to extract the requested statistic."""
