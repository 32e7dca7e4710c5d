"""Exception hierarchy shared by every polarwave module."""

from __future__ import annotations


class PolarwaveError(Exception):
    """Base class for all package errors."""


class OutOfRange(PolarwaveError, ValueError):
    """A parameter violates its validity range."""


class DegenerateCoupling(PolarwaveError):
    """Excitation and photon are degenerate and uncoupled, so the mixing is undefined."""


class CurvatureTooSmall(PolarwaveError):
    """Band curvature is numerically zero and the effective mass diverges."""


class NonFinite(PolarwaveError, FloatingPointError):
    """A function or integrator produced NaN or infinity."""

    def __init__(self, message: str, where: float | None = None):
        super().__init__(message)
        self.where = where


class DegenerateLeadingCoefficient(PolarwaveError, ValueError):
    """A cubic's leading coefficient vanishes relative to the others."""


class NoConvergence(PolarwaveError, RuntimeError):
    """An iterative solver stopped without meeting its tolerance."""

    def __init__(self, message: str, residual: float = float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class NonPositiveK(PolarwaveError, ValueError):
    """A closed-form amplitude was requested at k <= 0."""


class GridTooCoarse(PolarwaveError, ValueError):
    """The k' grid does not resolve the regulated on-shell resonance."""


class ParseError(PolarwaveError, ValueError):
    """Malformed configuration line."""

    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line


class UnknownKey(PolarwaveError, KeyError):
    """Configuration key not in the schema."""

    def __str__(self) -> str:
        return str(self.args[0]) if self.args else ""
