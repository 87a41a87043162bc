"""Exception hierarchy shared by every nhpump module."""

from __future__ import annotations

from typing import Any, Optional


class NHPumpError(Exception):
    """Base class for all errors raised by nhpump."""


class DomainError(NHPumpError, ValueError):
    """Input lies outside the region where the requested quantity is defined."""


class ExceptionalPoint(DomainError):
    """Eigenvectors coalesce: |E| fell below the exceptional-point tolerance."""

    def __init__(self, message: str, *, point: Optional[Any] = None) -> None:
        super().__init__(message)
        self.point = point


class GaplessSpectrum(DomainError):
    """Spectrum closes (min |E| below gap tolerance) somewhere on the grid."""

    def __init__(self, message: str, *, point: Optional[Any] = None, momentum: Optional[float] = None) -> None:
        super().__init__(message)
        self.point = point
        self.momentum = momentum


class DegenerateGBZ(DomainError):
    """Maximal nonreciprocity |mu| = |gamma|: the GBZ radius is 0 or infinite."""


class DegenerateDrive(DomainError):
    """t2 vanishes at this drive phase, so E^2 carries no beta dependence."""


class DegeneratePhi(DomainError):
    """phi = 0 (mod 2 pi) makes the root-difference equation trivial."""


class AdmissibilityViolation(DomainError):
    """GBZ roots fail |beta_M| = |beta_M+1| or disagree with the closed-form radius."""


class NotConverged(DomainError):
    """A plaquette flux reached the branch cut; the torus grid is too coarse."""

    def __init__(self, message: str, *, max_flux: float) -> None:
        super().__init__(message)
        self.max_flux = max_flux


class OverlapCollapse(DomainError):
    """The biorthogonal overlap drifted away from 1 during time evolution."""

    def __init__(self, message: str, *, momentum: Optional[float] = None, step: Optional[int] = None) -> None:
        super().__init__(message)
        self.momentum = momentum
        self.step = step


class NoConvergence(DomainError):
    """The dense eigenvalue iteration failed."""

    def __init__(self, message: str, *, index: Optional[int] = None) -> None:
        super().__init__(message)
        self.index = index


__all__ = [
    "NHPumpError",
    "DomainError",
    "ExceptionalPoint",
    "GaplessSpectrum",
    "DegenerateGBZ",
    "DegenerateDrive",
    "DegeneratePhi",
    "AdmissibilityViolation",
    "NotConverged",
    "OverlapCollapse",
    "NoConvergence",
]
