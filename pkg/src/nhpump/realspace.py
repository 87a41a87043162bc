"""Finite open chain in the site basis, used as an oracle for the GBZ spectrum."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
from scipy.spatial.distance import cdist

from .config import DriveParams
from .errors import NoConvergence

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8


@dataclass(slots=True)
class ChainOperator:
    """2N x 2N single-particle Hamiltonian; site (l, A) is row 2l, (l, B) is row 2l + 1."""

    n_cells: int
    matrix: np.ndarray = field(repr=False)
    drive_phase: float = 0.0
    params: Optional[DriveParams] = None

    @property
    def size(self) -> int:
        return 2 * self.n_cells


@dataclass(slots=True)
class ChainSpectrum:
    values: np.ndarray
    vectors: Optional[np.ndarray] = field(default=None, repr=False)
    max_residual: float = 0.0


def build_chain(p: DriveParams, t: float, n_cells: int) -> ChainOperator:
    if n_cells < 1:
        raise ValueError(f"n_cells must be at least 1, got {n_cells}")
    size = 2 * n_cells
    t2 = float(p.t2(t))
    onsite = p.delta * np.sin(t)

    matrix = np.zeros((size, size), dtype=complex)
    a_sites = np.arange(0, size, 2)
    b_sites = a_sites + 1
    matrix[a_sites, a_sites] = onsite
    matrix[b_sites, b_sites] = -onsite
    matrix[a_sites, b_sites] = p.t1 + p.gamma
    matrix[b_sites, a_sites] = p.t1 - p.gamma
    # inter-cell bonds B(l) <-> A(l + 1); none between the last and first cell
    matrix[a_sites[1:], b_sites[:-1]] = t2
    matrix[b_sites[:-1], a_sites[1:]] = t2
    return ChainOperator(n_cells=n_cells, matrix=matrix, drive_phase=float(t), params=p)


def exact_eigensystem(chain: ChainOperator) -> ChainSpectrum:
    """Dense eigenpairs (LAPACK geev with balancing) with the residual check."""
    try:
        values, vectors = scipy.linalg.eig(chain.matrix, right=True)
    except scipy.linalg.LinAlgError as exc:
        raise NoConvergence(f"dense eigensolver failed for N={chain.n_cells}: {exc}") from exc

    scale = max(np.linalg.norm(chain.matrix, 2), 1.0)
    residuals = np.linalg.norm(chain.matrix @ vectors - vectors * values[None, :], axis=0)
    residuals /= np.linalg.norm(vectors, axis=0)
    worst = int(np.argmax(residuals))
    if residuals[worst] > RESIDUAL_TOL * scale:
        raise NoConvergence(
            f"eigenpair {worst} has residual {residuals[worst]:.3e} > {RESIDUAL_TOL:g} * |M|",
            index=worst,
        )
    return ChainSpectrum(values=values, vectors=vectors, max_residual=float(residuals[worst] / scale))


def exact_spectrum(chain: ChainOperator) -> np.ndarray:
    try:
        values = scipy.linalg.eigvals(chain.matrix)
    except scipy.linalg.LinAlgError as exc:
        raise NoConvergence(f"dense eigensolver failed for N={chain.n_cells}: {exc}") from exc
    logger.debug("exact spectrum for N=%d: %d eigenvalues", chain.n_cells, len(values))
    return values


def spectral_distance(a: Sequence[complex], b: Sequence[complex]) -> float:
    """Symmetric Hausdorff distance between two point sets in the complex plane."""
    a = np.asarray(a, dtype=complex).ravel()
    b = np.asarray(b, dtype=complex).ravel()
    if a.size == 0 or b.size == 0:
        raise ValueError("spectral_distance needs two non-empty spectra")
    distances = cdist(np.column_stack([a.real, a.imag]), np.column_stack([b.real, b.imag]))
    return float(max(distances.min(axis=1).max(), distances.min(axis=0).max()))


def skin_profile(chain: ChainOperator, spectrum: Optional[ChainSpectrum] = None) -> Tuple[np.ndarray, float]:
    """Weighted cell position (1..N) of each right eigenvector and their mean."""
    spectrum = spectrum or exact_eigensystem(chain)
    weights = np.abs(spectrum.vectors) ** 2
    weights = weights[0::2] + weights[1::2]
    weights /= weights.sum(axis=0, keepdims=True)
    cells = np.arange(1, chain.n_cells + 1)[:, None]
    positions = np.sum(cells * weights, axis=0)
    return positions, float(positions.mean())
