"""Biorthogonal Chern numbers on the (momentum, drive phase) torus.

Two independent estimators share one orientation, positive for a plaquette
circulated momentum first, then phase:

* ``chern_plaquette``: gauge-invariant product of biorthogonal links
  U_nu(x) = <u^L(x)|u^R(x + nu)>, one phase per plaquette.
* ``chern_derivative``: the curvature
  Omega = -i (<d_k u^L|d_t u^R> - <d_t u^L|d_k u^R>) sampled with central
  differences and summed over the periodic grid.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Optional

import numpy as np

from .config import DEFAULT_TOLERANCES, TWO_PI, Band, DriveParams, Tolerances, TorusGrid
from .eigen import BiorthPair, band_pair, fix_gauge, principal_energy
from .errors import GaplessSpectrum, NotConverged
from .model import bloch_vector_grid

logger = logging.getLogger(__name__)


@dataclass(slots=True)
class ChernResult:
    value: float
    integer_value: int
    max_plaquette_flux: float
    converged: bool
    method: str
    band: Band
    grid: TorusGrid
    max_nonunitarity: float = 0.0
    imaginary_part: float = 0.0
    berry_curvature_field: Optional[np.ndarray] = field(default=None, repr=False)

    def as_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "band": self.band.value,
            "value": self.value,
            "integer_value": self.integer_value,
            "converged": self.converged,
            "max_plaquette_flux": self.max_plaquette_flux,
            "max_nonunitarity": self.max_nonunitarity,
            "imaginary_part": self.imaginary_part,
            "grid": self.grid.as_dict(),
        }


def _torus_pair(p: DriveParams, band: Band, grid: TorusGrid, tol: Tolerances) -> BiorthPair:
    momenta, phases = grid.mesh()
    d = bloch_vector_grid(p, momenta, phases, grid.boundary, tol=tol)
    magnitude = np.abs(principal_energy(d))
    worst = np.unravel_index(int(np.argmin(magnitude)), magnitude.shape)
    if magnitude[worst] <= tol.gap_tol:
        k, t = float(momenta[worst]), float(phases[worst])
        raise GaplessSpectrum(
            f"min |E| = {magnitude[worst]:.3e} <= gap_tol at (k={k:.6f}, t={t:.6f}) for mu={p.mu:g}, gamma={p.gamma:g}",
            point=(k, t),
            momentum=k,
        )
    logger.debug(
        "%s torus %dx%d for mu=%g gamma=%g: min |E| = %.4e",
        grid.boundary.value,
        grid.n_momentum,
        grid.n_phase,
        p.mu,
        p.gamma,
        magnitude[worst],
    )
    return band_pair(d, band, tol=tol)


def _link(pair: BiorthPair, axis: int) -> np.ndarray:
    return np.sum(np.conj(pair.left) * np.roll(pair.right, -1, axis=axis), axis=-1)


def chern_plaquette(
    p: DriveParams,
    band: Band = Band.MINUS,
    grid: Optional[TorusGrid] = None,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
    strict: bool = True,
    keep_field: bool = False,
) -> ChernResult:
    """Lattice field-strength Chern number; ``strict=False`` reports instead of raising NotConverged."""
    grid = grid or TorusGrid()
    band = Band(band)
    pair = _torus_pair(p, band, grid, tol)

    u_k = _link(pair, axis=0)
    u_t = _link(pair, axis=1)
    loop = u_k * np.roll(u_t, -1, axis=0) / (np.roll(u_k, -1, axis=1) * u_t)
    flux = np.angle(loop)

    max_flux = float(np.max(np.abs(flux)))
    value = float(np.sum(flux) / TWO_PI)
    integer_value = int(np.rint(value))
    converged = max_flux < tol.flux_limit and abs(value - integer_value) < 0.01
    if max_flux >= tol.flux_limit and strict:
        raise NotConverged(
            f"plaquette flux {max_flux:.6f} reached the branch cut on a {grid.n_momentum}x{grid.n_phase} grid",
            max_flux=max_flux,
        )

    return ChernResult(
        value=value,
        integer_value=integer_value,
        max_plaquette_flux=max_flux,
        converged=converged,
        method="plaquette",
        band=band,
        grid=grid,
        max_nonunitarity=float(np.max(np.abs(np.log(np.abs(loop))))),
        berry_curvature_field=flux / np.prod(grid.spacing) if keep_field else None,
    )


def _rephased_neighbour(pair: BiorthPair, shift: int, axis: int):
    # unit phase making <u^L(x)|u^R(x + shift)> real positive
    right = np.roll(pair.right, shift, axis=axis)
    left = np.roll(pair.left, shift, axis=axis)
    overlap = np.sum(np.conj(pair.left) * right, axis=-1)
    phase = (np.abs(overlap) / overlap)[..., None]
    return right * phase, left * phase


def chern_derivative(
    p: DriveParams,
    band: Band = Band.MINUS,
    grid: Optional[TorusGrid] = None,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ChernResult:
    grid = grid or TorusGrid()
    band = Band(band)
    pair = fix_gauge(_torus_pair(p, band, grid, tol), switch_tol=tol.switch_tol)
    h_k, h_t = grid.spacing

    r_kf, l_kf = _rephased_neighbour(pair, -1, axis=0)
    r_kb, l_kb = _rephased_neighbour(pair, 1, axis=0)
    r_tf, l_tf = _rephased_neighbour(pair, -1, axis=1)
    r_tb, l_tb = _rephased_neighbour(pair, 1, axis=1)

    dr_k = (r_kf - r_kb) / (2.0 * h_k)
    dl_k = (l_kf - l_kb) / (2.0 * h_k)
    dr_t = (r_tf - r_tb) / (2.0 * h_t)
    dl_t = (l_tf - l_tb) / (2.0 * h_t)

    curvature = -1j * (
        np.sum(np.conj(dl_k) * dr_t, axis=-1) - np.sum(np.conj(dl_t) * dr_k, axis=-1)
    )
    total = np.sum(curvature) * h_k * h_t / TWO_PI
    value = float(total.real)
    integer_value = int(np.rint(value))

    # coarse-grid flux estimate from the sampled curvature
    max_flux = float(np.max(np.abs(curvature.real)) * h_k * h_t)
    logger.debug("derivative Chern %.6f (imag %.2e) on %dx%d", value, total.imag, grid.n_momentum, grid.n_phase)
    return ChernResult(
        value=value,
        integer_value=integer_value,
        max_plaquette_flux=max_flux,
        converged=abs(value - integer_value) < 0.01,
        method="derivative",
        band=band,
        grid=grid,
        imaginary_part=float(total.imag),
        berry_curvature_field=curvature,
    )
