"""Driven non-Hermitian Rice-Mele Hamiltonians in Bloch form.

H(k, t) = d(k, t) . sigma with

    d1 = t1 + t2 cos k,   d2 = t2 sin k + i gamma,   d3 = delta sin t,
    t1 = mu,              t2 = mu - cos t.

Under open boundaries the momentum is continued onto the generalized Brillouin
zone, k = theta - i ln(Gamma), i.e. e^{ik} -> Gamma e^{i theta}.

All array helpers broadcast over ``momentum`` and ``phase``; the scalar
operations wrap them for a single :class:`~nhpump.config.PhasePoint`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .config import DEFAULT_TOLERANCES, Boundary, DriveParams, PhasePoint, Tolerances

ArrayLike = Union[float, complex, np.ndarray]
Matrix2 = np.ndarray

SIGMA_1 = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_3 = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SIGMA_1, SIGMA_2, SIGMA_3)


@dataclass(frozen=True, slots=True)
class BlochVector:
    """Complex triple (d1, d2, d3); entries may be scalars or same-shape arrays."""

    d1: ArrayLike
    d2: ArrayLike
    d3: ArrayLike

    def energy_squared(self) -> ArrayLike:
        return self.d1 * self.d1 + self.d2 * self.d2 + self.d3 * self.d3

    def matrix(self) -> np.ndarray:
        """d . sigma with shape (..., 2, 2)."""
        d1, d2, d3 = np.broadcast_arrays(
            np.asarray(self.d1, dtype=complex),
            np.asarray(self.d2, dtype=complex),
            np.asarray(self.d3, dtype=complex),
        )
        out = np.empty(d1.shape + (2, 2), dtype=complex)
        out[..., 0, 0] = d3
        out[..., 0, 1] = d1 - 1j * d2
        out[..., 1, 0] = d1 + 1j * d2
        out[..., 1, 1] = -d3
        return out

    def conj(self) -> "BlochVector":
        return BlochVector(np.conj(self.d1), np.conj(self.d2), np.conj(self.d3))


def momentum_radius(p: DriveParams, boundary: Boundary, tol: Tolerances = DEFAULT_TOLERANCES) -> float:
    """|e^{ik}| on the contour for ``boundary``: 1 for PBC, the GBZ radius for OBC."""
    if Boundary(boundary) is Boundary.PBC:
        return 1.0
    from .gbz import gbz_radius

    return gbz_radius(p, tol=tol)


def bloch_vector_grid(
    p: DriveParams,
    momentum: ArrayLike,
    phase: ArrayLike,
    boundary: Boundary = Boundary.PBC,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BlochVector:
    momentum = np.asarray(momentum, dtype=float)
    phase = np.asarray(phase, dtype=float)
    t2 = p.t2(phase)
    d3 = p.delta * np.sin(phase) + 0j
    if Boundary(boundary) is Boundary.PBC:
        d1 = p.t1 + t2 * np.cos(momentum) + 0j
        d2 = t2 * np.sin(momentum) + 1j * p.gamma
        return BlochVector(d1, d2, d3)

    radius = momentum_radius(p, boundary, tol)
    z = radius * np.exp(1j * momentum)
    d1 = p.t1 + t2 * (z + 1.0 / z) / 2.0
    d2 = t2 * (z - 1.0 / z) / 2j + 1j * p.gamma
    return BlochVector(d1, d2, d3)


def bloch_vector(
    p: DriveParams,
    pt: PhasePoint,
    boundary: Boundary = Boundary.PBC,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> BlochVector:
    d = bloch_vector_grid(p, pt.momentum, pt.drive_phase, boundary, tol=tol)
    return BlochVector(complex(d.d1), complex(d.d2), complex(d.d3))


def hamiltonian(
    p: DriveParams,
    momentum: ArrayLike,
    phase: ArrayLike,
    boundary: Boundary = Boundary.PBC,
    *,
    radius: Optional[float] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    """Matrix entries written out as in the Bloch (or GBZ) Hamiltonian, shape (..., 2, 2)."""
    if radius is None:
        radius = momentum_radius(p, boundary, tol)
    momentum, phase = np.broadcast_arrays(np.asarray(momentum, dtype=float), np.asarray(phase, dtype=float))
    t2 = p.t2(phase)
    onsite = p.delta * np.sin(phase)
    z = radius * np.exp(1j * momentum)
    out = np.empty(momentum.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = onsite
    out[..., 0, 1] = p.mu + p.gamma + t2 / z
    out[..., 1, 0] = p.mu - p.gamma + t2 * z
    out[..., 1, 1] = -onsite
    return out


def dk_hamiltonian(
    p: DriveParams,
    momentum: ArrayLike,
    phase: ArrayLike,
    boundary: Boundary = Boundary.PBC,
    *,
    radius: Optional[float] = None,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    if radius is None:
        radius = momentum_radius(p, boundary, tol)
    momentum, phase = np.broadcast_arrays(np.asarray(momentum, dtype=float), np.asarray(phase, dtype=float))
    t2 = p.t2(phase)
    z = radius * np.exp(1j * momentum)
    out = np.zeros(momentum.shape + (2, 2), dtype=complex)
    out[..., 0, 1] = -1j * t2 / z
    out[..., 1, 0] = 1j * t2 * z
    return out


def h_pbc(p: DriveParams, pt: PhasePoint) -> Matrix2:
    return hamiltonian(p, pt.momentum, pt.drive_phase, Boundary.PBC, radius=1.0)


def h_obc(p: DriveParams, pt: PhasePoint, *, tol: Tolerances = DEFAULT_TOLERANCES) -> Matrix2:
    """GBZ Hamiltonian; reduces to :func:`h_pbc` at gamma = 0."""
    return hamiltonian(p, pt.momentum, pt.drive_phase, Boundary.OBC, tol=tol)


def dk_h(
    p: DriveParams,
    pt: PhasePoint,
    boundary: Boundary = Boundary.PBC,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> Matrix2:
    return dk_hamiltonian(p, pt.momentum, pt.drive_phase, boundary, tol=tol)


def energy_squared(
    p: DriveParams,
    momentum: ArrayLike,
    phase: ArrayLike,
    boundary: Boundary = Boundary.PBC,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> np.ndarray:
    return np.asarray(bloch_vector_grid(p, momentum, phase, boundary, tol=tol).energy_squared())
