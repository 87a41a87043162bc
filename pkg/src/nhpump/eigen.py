"""Closed-form biorthogonal eigensystems of 2x2 traceless matrices d . sigma.

Right eigenvectors of the +/-E band are [d3 + sE, d1 + i d2]; the alternate
row [d1 - i d2, -d3 + sE] takes over when the first one vanishes. Left
eigenvectors are the right eigenvectors of H^dagger for E*, i.e. the complex
conjugates of the same construction applied to d -> (d1, -d2, d3).

Every helper here broadcasts over array-valued Bloch vectors so a whole torus
grid is diagonalized in one call.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from .config import DEFAULT_TOLERANCES, Band, Tolerances
from .errors import ExceptionalPoint
from .model import BlochVector

logger = logging.getLogger(__name__)


@dataclass(frozen=True, slots=True)
class BiorthPair:
    """Band energy with right/left eigenvectors normalized to <u^L|u^R> = 1.

    For grid evaluations ``energy`` has the grid shape and ``right``/``left``
    carry a trailing axis of length 2.
    """

    energy: Union[complex, np.ndarray]
    right: np.ndarray
    left: np.ndarray
    band: Band

    def overlap(self) -> Union[complex, np.ndarray]:
        return np.sum(np.conj(self.left) * self.right, axis=-1)

    def projector(self) -> np.ndarray:
        """|u^R><u^L| with shape (..., 2, 2)."""
        return self.right[..., :, None] * np.conj(self.left)[..., None, :]


def principal_energy(d: BlochVector) -> np.ndarray:
    """Principal square root of d.d: Re E >= 0, and Im E >= 0 when Re E = 0."""
    energy = np.sqrt(np.asarray(d.energy_squared(), dtype=complex))
    flip = (energy.real == 0) & (energy.imag < 0)
    return np.where(flip, -energy, energy)


def _components(d: BlochVector) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    d1, d2, d3 = np.broadcast_arrays(
        np.asarray(d.d1, dtype=complex),
        np.asarray(d.d2, dtype=complex),
        np.asarray(d.d3, dtype=complex),
    )
    return d1, d2, d3


def _raw_vectors(
    d: BlochVector, band: Band, energy: np.ndarray, switch_tol: float
) -> Tuple[np.ndarray, np.ndarray]:
    d1, d2, d3 = _components(d)
    se = band.sign * energy

    right = np.stack([d3 + se, d1 + 1j * d2], axis=-1)
    right_alt = np.stack([d1 - 1j * d2, -d3 + se], axis=-1)
    use_alt = np.linalg.norm(right, axis=-1) < switch_tol
    right = np.where(use_alt[..., None], right_alt, right)

    left = np.conj(np.stack([d3 + se, d1 - 1j * d2], axis=-1))
    left_alt = np.conj(np.stack([d1 + 1j * d2, -d3 + se], axis=-1))
    use_alt = np.linalg.norm(left, axis=-1) < switch_tol
    left = np.where(use_alt[..., None], left_alt, left)
    return right, left


def band_pair(d: BlochVector, band: Band, *, tol: Tolerances = DEFAULT_TOLERANCES) -> BiorthPair:
    """Biorthonormal eigenpair of one band, vectorized over the shape of ``d``.

    Raises :class:`ExceptionalPoint` at the first grid point with |E| <= ep_tol.
    """
    band = Band(band)
    energy = principal_energy(d)
    magnitude = np.abs(energy)
    if np.any(magnitude <= tol.ep_tol):
        index = np.unravel_index(int(np.argmin(magnitude)), magnitude.shape) if magnitude.ndim else ()
        raise ExceptionalPoint(
            f"|E| = {float(magnitude[index]):.3e} <= ep_tol = {tol.ep_tol:g}; eigenvectors coalesce",
            point=index,
        )

    right, left = _raw_vectors(d, band, energy, tol.switch_tol)
    right = right / np.linalg.norm(right, axis=-1, keepdims=True)
    overlap = np.sum(np.conj(left) * right, axis=-1)
    left = left / np.conj(overlap)[..., None]
    return BiorthPair(energy=band.sign * energy, right=right, left=left, band=band)


def eigensystem(d: BlochVector, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Tuple[BiorthPair, BiorthPair]:
    """Both bands (plus, minus) at a single Bloch vector or a grid of them."""
    return band_pair(d, Band.PLUS, tol=tol), band_pair(d, Band.MINUS, tol=tol)


def ep_defect(d: BlochVector, band: Band = Band.PLUS, *, tol: Tolerances = DEFAULT_TOLERANCES) -> np.ndarray:
    """Phase rigidity |<u^L|u^R>| of unit-norm vectors; 0 at exceptional points."""
    energy = principal_energy(d)
    right, left = _raw_vectors(d, Band(band), energy, tol.switch_tol)
    norms = np.linalg.norm(right, axis=-1) * np.linalg.norm(left, axis=-1)
    overlap = np.abs(np.sum(np.conj(left) * right, axis=-1))
    with np.errstate(divide="ignore", invalid="ignore"):
        rigidity = np.where(norms > 0, overlap / np.where(norms > 0, norms, 1.0), 0.0)
    rigidity = np.where(np.abs(energy) <= tol.ep_tol, 0.0, rigidity)
    return np.clip(rigidity, 0.0, 1.0)


def chiral_charge(band: Band) -> int:
    """Charge of the chiral quasiparticle carried by ``band`` at sin t = 0."""
    return Band(band).sign


def fix_gauge(pair: BiorthPair, *, switch_tol: float = DEFAULT_TOLERANCES.switch_tol) -> BiorthPair:
    """Make the first non-vanishing component of u^R real positive.

    u^L receives the same unit phase so <u^L|u^R> is untouched.
    """
    first = pair.right[..., 0]
    second = pair.right[..., 1]
    pivot = np.where(np.abs(first) >= switch_tol, first, second)
    phase = np.conj(pivot) / np.abs(pivot)
    return BiorthPair(
        energy=pair.energy,
        right=pair.right * phase[..., None],
        left=pair.left * phase[..., None],
        band=pair.band,
    )
