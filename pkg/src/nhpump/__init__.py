"""Biorthogonal topology and charge pumping for the driven non-Hermitian Rice-Mele chain."""

__version__ = "0.1.0"

from .config import (  # noqa: E402
    DEFAULT_TOLERANCES,
    Band,
    Boundary,
    DriveParams,
    PhasePoint,
    Tolerances,
    TorusGrid,
)
from .errors import DomainError, NHPumpError  # noqa: E402

__all__ = [
    "__version__",
    "DEFAULT_TOLERANCES",
    "Band",
    "Boundary",
    "DriveParams",
    "PhasePoint",
    "Tolerances",
    "TorusGrid",
    "DomainError",
    "NHPumpError",
]
