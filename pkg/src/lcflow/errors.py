"""Exception types shared across the package."""

from __future__ import annotations


class ConstraintViolation(ValueError):
    """A parameter set breaks one of the named admissibility constraints."""


class DomainError(ValueError):
    """An evaluation was requested outside a quantity's domain of validity."""


class NumericFailure(RuntimeError):
    """A linear solve or other numerical kernel failed irrecoverably."""


class EstimationFailure(RuntimeError):
    """A fit or extrapolation had no admissible data to work with."""
