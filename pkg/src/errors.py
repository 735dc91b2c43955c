"""
Exception hierarchy for the BerryLab toolkit.

Library code raises these; only the CLI dispatcher turns them into exit codes.
"""

from typing import Optional


class BerryLabError(Exception):
    """Base class for all BerryLab errors."""


class ConfigurationError(BerryLabError):
    """Invalid experiment configuration or command-line flags."""


class DomainError(BerryLabError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class GeometryError(BerryLabError, ValueError):
    """Degenerate or malformed geometric input."""


class NormalizationError(BerryLabError):
    """A log E normalization was requested with E <= e."""


class ResourceLimitError(BerryLabError):
    """The requested resolution exceeds the configured resource limits."""


class QuadratureAccuracyError(BerryLabError):
    """Adaptive quadrature failed to reach its tolerance."""

    def __init__(self, message: str, achieved_error: float, tolerance: Optional[float] = None):
        super().__init__(f"{message} (achieved {achieved_error:.3e}, tolerance {tolerance})")
        self.achieved_error = achieved_error
        self.tolerance = tolerance


class DiagnosticError(BerryLabError):
    """Sample too small or degenerate for distributional diagnostics."""
