"""Generalized Brillouin zone of the open Rice-Mele chain.

With beta = e^{ik} the bulk dispersion reads

    E^2(beta) = (t1 - gamma + t2 beta)(t1 + gamma + t2 / beta) + d3^2,

a quadratic in beta with one pole (p = M = 1). Open-boundary states live where
the two roots of E^2(beta) = E^2 have equal magnitude; writing them as beta and
beta e^{i phi} removes E and leaves

    beta^2 = e^{-i phi} (t1 - gamma) / (t1 + gamma),

so the GBZ is the circle |beta| = Gamma = sqrt(|t1 - gamma| / |t1 + gamma|).
The phi-sweep below solves the root-difference equation numerically and checks
the circle against that closed form.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np

from .config import DEFAULT_TOLERANCES, TWO_PI, Boundary, DriveParams, Tolerances
from .errors import AdmissibilityViolation, DegenerateDrive, DegenerateGBZ, DegeneratePhi

logger = logging.getLogger(__name__)

POLE_ORDER = 1
HALF_DEGREE = 1


@dataclass(slots=True)
class GBZContour:
    """Admissible beta roots of a phi-sweep at one drive phase."""

    radius: float
    drive_phase: float
    phis: np.ndarray
    betas: np.ndarray
    pole_order: int = POLE_ORDER
    half_degree: int = HALF_DEGREE
    complex_branch: bool = False
    max_root_mismatch: float = 0.0
    notes: List[str] = field(default_factory=list)

    @property
    def samples(self) -> List[Tuple[float, Tuple[complex, complex]]]:
        return [(float(phi), (complex(pair[0]), complex(pair[1]))) for phi, pair in zip(self.phis, self.betas)]


def _check_hoppings(p: DriveParams, tol: Tolerances) -> None:
    if abs(abs(p.mu) - abs(p.gamma)) <= tol.degenerate_tol:
        raise DegenerateGBZ(
            f"|mu| = |gamma| = {abs(p.gamma):g}: one intra-cell hopping vanishes and the GBZ radius is 0 or infinite"
        )


def gbz_radius(p: DriveParams, *, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    if p.gamma == 0:
        return 1.0
    _check_hoppings(p, tol)
    return math.sqrt(abs(p.t1 - p.gamma) / abs(p.t1 + p.gamma))


def beta_roots(
    p: DriveParams,
    t: float,
    phi: float,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Tuple[complex, complex]:
    """Roots of E^2(beta) = E^2(beta e^{i phi}) after multiplying through by beta."""
    t2 = float(p.t2(t))
    if abs(t2) < tol.degenerate_tol:
        raise DegenerateDrive(f"t2 = {t2:.3e} at drive phase {t:g}; E^2 does not depend on beta")
    wrapped = math.remainder(phi, TWO_PI)
    if abs(wrapped) < tol.degenerate_tol:
        raise DegeneratePhi(f"phi = {phi:g} is 0 mod 2 pi; the root-difference equation is trivial")
    _check_hoppings(p, tol)

    forward = np.exp(1j * phi)
    coefficients = [
        t2 * (p.t1 + p.gamma) * (1.0 - forward),
        0.0,
        t2 * (p.t1 - p.gamma) * (1.0 - np.conj(forward)),
    ]
    first, second = np.roots(coefficients)
    return complex(first), complex(second)


def characteristic_roots(
    p: DriveParams,
    t: float,
    energy_squared: complex,
) -> Tuple[complex, complex]:
    """Both beta solving t2(t1+g) b^2 + (t1^2 - g^2 + t2^2 + d3^2 - E^2) b + t2(t1-g) = 0."""
    t2 = float(p.t2(t))
    d3 = p.delta * math.sin(t)
    coefficients = [
        t2 * (p.t1 + p.gamma),
        p.t1**2 - p.gamma**2 + t2**2 + d3**2 - energy_squared,
        t2 * (p.t1 - p.gamma),
    ]
    first, second = np.roots(coefficients)
    return complex(first), complex(second)


def _energy_squared_at(p: DriveParams, t: float, beta: complex) -> complex:
    t2 = float(p.t2(t))
    d3 = p.delta * math.sin(t)
    return (p.t1 - p.gamma + t2 * beta) * (p.t1 + p.gamma + t2 / beta) + d3**2


def gbz_contour(
    p: DriveParams,
    t: float,
    n_phi: int = 64,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> GBZContour:
    if n_phi < 8:
        raise ValueError(f"n_phi must be at least 8, got {n_phi}")
    expected = gbz_radius(p, tol=tol)

    phis = np.linspace(0.0, TWO_PI, n_phi + 2)[1:-1]
    betas = np.empty((n_phi, 2), dtype=complex)
    worst = 0.0
    for row, phi in enumerate(phis):
        pair = sorted(beta_roots(p, t, float(phi), tol=tol), key=abs)
        mismatch = abs(abs(pair[0]) - abs(pair[1]))
        if mismatch > tol.admissibility_tol:
            raise AdmissibilityViolation(
                f"|beta_1| = {abs(pair[0]):.12f} and |beta_2| = {abs(pair[1]):.12f} differ at phi = {phi:.6f}"
            )
        # both roots of the full polynomial at this E^2 must also sit on the circle
        partners = characteristic_roots(p, t, _energy_squared_at(p, t, pair[0]))
        worst = max(worst, mismatch, abs(abs(partners[0]) - abs(partners[1])))
        if worst > tol.admissibility_tol:
            raise AdmissibilityViolation(
                f"characteristic roots at phi = {phi:.6f} have unequal magnitudes {abs(partners[0]):.12f}, "
                f"{abs(partners[1]):.12f}"
            )
        betas[row] = pair

    radius = float(np.mean(np.abs(betas)))
    if abs(radius - expected) > tol.radius_tol:
        raise AdmissibilityViolation(
            f"phi-sweep radius {radius:.12f} disagrees with closed form {expected:.12f}"
        )

    contour = GBZContour(
        radius=radius,
        drive_phase=float(t),
        phis=phis,
        betas=betas,
        complex_branch=abs(p.mu) < abs(p.gamma),
        max_root_mismatch=worst,
    )
    if contour.complex_branch:
        contour.notes.append("|mu| < |gamma|: sqrt(mu^2 - gamma^2) is imaginary, OBC spectrum is complex")
        logger.warning("GBZ for mu=%g, gamma=%g lies on the complex branch", p.mu, p.gamma)
    logger.debug("GBZ contour at t=%g: radius %.12f from %d phi samples", t, radius, n_phi)
    return contour


def obc_spectrum_gbz(
    p: DriveParams,
    t: float,
    n_theta: int = 401,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """+E over the theta grid followed by -E, from the GBZ Bloch vector."""
    from .eigen import principal_energy
    from .model import bloch_vector_grid

    thetas = TWO_PI * np.arange(n_theta) / n_theta
    energy = principal_energy(bloch_vector_grid(p, thetas, t, Boundary.OBC, tol=tol))
    return np.concatenate([energy, -energy])


def obc_energy_squared_closed_form(
    p: DriveParams,
    theta,
    t: float,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """E^2 on the GBZ written out explicitly; real for mu^2 > gamma^2."""
    if p.gamma != 0:
        _check_hoppings(p, tol)
    theta = np.asarray(theta, dtype=float)
    t2 = float(p.t2(t))
    base = p.mu**2 - p.gamma**2 + t2**2 + (p.delta * math.sin(t)) ** 2
    sign = 1.0 if p.mu + p.gamma >= 0 else -1.0
    root = math.sqrt(abs(p.mu**2 - p.gamma**2))
    if p.mu**2 >= p.gamma**2:
        return base + 2.0 * sign * t2 * root * np.cos(theta) + 0j
    return base + 2j * sign * t2 * root * np.sin(theta)
