"""Biorthogonal Thouless pumping.

Right states follow i d_t psi^R = H psi^R and left states i d_t psi^L = H^dagger psi^L,
which keeps <psi^L|psi^R> constant. The pair is integrated with fixed-step RK4
in physical time over one drive cycle [0, 2 pi A]; the Hamiltonian sees the
drive phase t / A. After each step psi^R is scaled to unit norm and psi^L by
the reciprocal factor, so every biorthogonal matrix element is unchanged.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence

import numpy as np
from scipy.integrate import cumulative_trapezoid

from .config import DEFAULT_TOLERANCES, Band, Boundary, DriveParams, Tolerances, TorusGrid
from .eigen import band_pair, principal_energy
from .errors import ExceptionalPoint, GaplessSpectrum, OverlapCollapse
from .model import bloch_vector_grid, dk_hamiltonian, hamiltonian, momentum_radius
from .topology import ChernResult, chern_plaquette

logger = logging.getLogger(__name__)

HamiltonianAt = Callable[[float], np.ndarray]


@dataclass(slots=True)
class PumpState:
    psi_right: np.ndarray
    psi_left: np.ndarray
    time: float
    log_scale_right: float = 0.0
    log_scale_left: float = 0.0

    def overlap(self) -> complex:
        return complex(np.vdot(self.psi_left, self.psi_right))


@dataclass(slots=True)
class Trajectory:
    """Sampled (psi^R, psi^L) for a batch of momenta; axis 0 is time."""

    times: np.ndarray
    right: np.ndarray
    left: np.ndarray
    log_scale_right: np.ndarray
    log_scale_left: np.ndarray
    max_overlap_drift: float

    def state(self, step: int, column: int = 0) -> PumpState:
        return PumpState(
            psi_right=self.right[step, column].copy(),
            psi_left=self.left[step, column].copy(),
            time=float(self.times[step]),
            log_scale_right=float(self.log_scale_right[step, column]),
            log_scale_left=float(self.log_scale_left[step, column]),
        )


@dataclass(slots=True)
class ImStats:
    max_abs_im: float
    im_range: float
    times: np.ndarray = field(repr=False)
    im_max: np.ndarray = field(repr=False)
    im_min: np.ndarray = field(repr=False)

    @property
    def im_series(self) -> List[tuple]:
        return [(float(t), float(hi), float(lo)) for t, hi, lo in zip(self.times, self.im_max, self.im_min)]

    @classmethod
    def from_energies(cls, times: np.ndarray, energies: np.ndarray) -> "ImStats":
        """``energies`` has shape (n_times, n_momenta)."""
        imag = np.imag(energies)
        im_max = imag.max(axis=1)
        im_min = imag.min(axis=1)
        return cls(
            max_abs_im=float(np.max(np.abs(imag))),
            im_range=float(im_max.max() - im_max.min()),
            times=np.asarray(times, dtype=float),
            im_max=im_max,
            im_min=im_min,
        )


@dataclass(slots=True)
class PumpResult:
    bod: complex
    times: np.ndarray = field(repr=False)
    bod_vs_time: np.ndarray = field(repr=False)
    mean_velocity: np.ndarray = field(repr=False)
    chern_reference: Optional[ChernResult]
    im_stats: ImStats
    max_overlap_drift: float
    n_steps: int

    @property
    def deviation(self) -> Optional[float]:
        if self.chern_reference is None:
            return None
        return abs(self.bod.real - self.chern_reference.integer_value)


def _apply(matrix: np.ndarray, vector: np.ndarray) -> np.ndarray:
    return np.einsum("...ij,...j->...i", matrix, vector)


def _apply_adjoint(matrix: np.ndarray, vector: np.ndarray) -> np.ndarray:
    return np.einsum("...ji,...j->...i", np.conj(matrix), vector)


def propagate(
    hamiltonian_at: HamiltonianAt,
    right: np.ndarray,
    left: np.ndarray,
    times: np.ndarray,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
    rescale_every: int = 1,
    labels: Optional[Sequence[float]] = None,
) -> Trajectory:
    """RK4 for the paired equations on the uniform grid ``times``.

    ``right`` and ``left`` have shape (n, 2). ``labels`` tag columns in
    OverlapCollapse errors. ``rescale_every=0`` disables norm management.
    """
    right = np.array(right, dtype=complex)
    left = np.array(left, dtype=complex)
    n_times = len(times)
    out_right = np.empty((n_times,) + right.shape, dtype=complex)
    out_left = np.empty_like(out_right)
    log_right = np.zeros((n_times,) + right.shape[:-1])
    log_left = np.zeros_like(log_right)
    acc_right = np.zeros(right.shape[:-1])
    acc_left = np.zeros(right.shape[:-1])

    reference = np.sum(np.conj(left) * right, axis=-1)
    out_right[0], out_left[0] = right, left
    worst = 0.0

    for step in range(1, n_times):
        s, h = times[step - 1], times[step] - times[step - 1]
        h_start = hamiltonian_at(s)
        h_mid = hamiltonian_at(s + 0.5 * h)
        h_end = hamiltonian_at(s + h)

        k1 = -1j * _apply(h_start, right)
        k2 = -1j * _apply(h_mid, right + 0.5 * h * k1)
        k3 = -1j * _apply(h_mid, right + 0.5 * h * k2)
        k4 = -1j * _apply(h_end, right + h * k3)
        right = right + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)

        q1 = -1j * _apply_adjoint(h_start, left)
        q2 = -1j * _apply_adjoint(h_mid, left + 0.5 * h * q1)
        q3 = -1j * _apply_adjoint(h_mid, left + 0.5 * h * q2)
        q4 = -1j * _apply_adjoint(h_end, left + h * q3)
        left = left + h / 6.0 * (q1 + 2.0 * q2 + 2.0 * q3 + q4)

        drift = np.abs(np.sum(np.conj(left) * right, axis=-1) - reference)
        column = int(np.argmax(drift))
        worst = max(worst, float(drift[column]))
        if drift[column] > tol.overlap_tol:
            label = labels[column] if labels is not None else column
            raise OverlapCollapse(
                f"biorthogonal overlap drifted by {float(drift[column]):.3e} at step {step} (momentum {label})",
                momentum=float(label),
                step=step,
            )

        if rescale_every and step % rescale_every == 0:
            scale = np.linalg.norm(right, axis=-1)
            right = right / scale[..., None]
            left = left * scale[..., None]
            acc_right += np.log(scale)
            acc_left -= np.log(scale)

        out_right[step], out_left[step] = right, left
        log_right[step], log_left[step] = acc_right, acc_left

    return Trajectory(
        times=np.asarray(times, dtype=float),
        right=out_right,
        left=out_left,
        log_scale_right=log_right,
        log_scale_left=log_left,
        max_overlap_drift=worst,
    )


def _initial_pair(p: DriveParams, momenta: np.ndarray, band: Band, boundary: Boundary, tol: Tolerances):
    d = bloch_vector_grid(p, momenta, 0.0, boundary, tol=tol)
    magnitude = np.abs(principal_energy(d))
    worst = int(np.argmin(magnitude))
    if magnitude[worst] <= tol.gap_tol:
        raise GaplessSpectrum(
            f"spectrum closes at drive phase 0, momentum {momenta[worst]:.6f} (|E| = {magnitude[worst]:.3e})",
            point=(float(momenta[worst]), 0.0),
            momentum=float(momenta[worst]),
        )
    try:
        return band_pair(d, band, tol=tol)
    except ExceptionalPoint as exc:
        raise GaplessSpectrum(str(exc), momentum=float(momenta[worst])) from exc


def _trajectory(
    p: DriveParams,
    momenta: np.ndarray,
    band: Band,
    n_steps: int,
    boundary: Boundary,
    tol: Tolerances,
    rescale_every: int = 1,
) -> Trajectory:
    if n_steps < 1:
        raise ValueError(f"n_steps must be positive, got {n_steps}")
    boundary = Boundary(boundary)
    radius = momentum_radius(p, boundary, tol)
    pair = _initial_pair(p, momenta, Band(band), boundary, tol)
    times = np.linspace(0.0, p.period, n_steps + 1)

    def hamiltonian_at(s: float) -> np.ndarray:
        return hamiltonian(p, momenta, s / p.adiabatic_factor, boundary, radius=radius)

    logger.debug("RK4 over %d steps of %.4e for %d momenta", n_steps, times[1], len(momenta))
    return propagate(
        hamiltonian_at,
        pair.right,
        pair.left,
        times,
        tol=tol,
        rescale_every=rescale_every,
        labels=momenta,
    )


def evolve_pair(
    p: DriveParams,
    momentum: float,
    band: Band = Band.MINUS,
    n_steps: int = 4000,
    *,
    boundary: Boundary = Boundary.PBC,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> List[PumpState]:
    trajectory = _trajectory(p, np.array([float(momentum)]), band, n_steps, boundary, tol)
    return [trajectory.state(step) for step in range(len(trajectory.times))]


def velocity(
    p: DriveParams,
    state: PumpState,
    momentum: float,
    boundary: Boundary = Boundary.PBC,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> complex:
    """<psi^L| d_k H |psi^R> at the drive phase reached by ``state``."""
    dk = dk_hamiltonian(p, momentum, state.time / p.adiabatic_factor, boundary, tol=tol)
    return complex(np.vdot(state.psi_left, dk @ state.psi_right))


def bod_cycle(
    p: DriveParams,
    band: Band = Band.MINUS,
    grid: Optional[TorusGrid] = None,
    *,
    n_steps: int = 4000,
    tol: Tolerances = DEFAULT_TOLERANCES,
    with_chern: bool = True,
    rescale_every: int = 1,
) -> PumpResult:
    """Net biorthogonal displacement over one cycle, one evolved pair per grid momentum."""
    grid = grid or TorusGrid(n_momentum=64)
    band = Band(band)
    momenta = grid.momenta()
    trajectory = _trajectory(p, momenta, band, n_steps, grid.boundary, tol, rescale_every)

    radius = momentum_radius(p, grid.boundary, tol)
    phases = trajectory.times / p.adiabatic_factor
    dk = dk_hamiltonian(p, momenta[None, :], phases[:, None], grid.boundary, radius=radius)
    v = np.sum(np.conj(trajectory.left) * _apply(dk, trajectory.right), axis=-1)
    mean_v = v.mean(axis=1)
    displacement = cumulative_trapezoid(mean_v, trajectory.times, initial=0.0)

    energies = band.sign * principal_energy(
        bloch_vector_grid(p, momenta[None, :], phases[:, None], grid.boundary, tol=tol)
    )
    im_stats = ImStats.from_energies(trajectory.times, energies)

    chern = None
    if with_chern:
        try:
            chern = chern_plaquette(p, band, grid, tol=tol, strict=False)
        except GaplessSpectrum as exc:
            logger.warning("No Chern reference for mu=%g: %s", p.mu, exc)

    bod = complex(displacement[-1])
    logger.debug("BOD %.6f%+.2ei for mu=%g (max drift %.2e)", bod.real, bod.imag, p.mu, trajectory.max_overlap_drift)
    return PumpResult(
        bod=bod,
        times=trajectory.times,
        bod_vs_time=displacement,
        mean_velocity=mean_v,
        chern_reference=chern,
        im_stats=im_stats,
        max_overlap_drift=trajectory.max_overlap_drift,
        n_steps=n_steps,
    )


def imag_fluctuation(
    p: DriveParams,
    band: Band = Band.MINUS,
    grid: Optional[TorusGrid] = None,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> ImStats:
    """Im E of the instantaneous band over the torus; the time axis is the drive phase."""
    grid = grid or TorusGrid()
    momenta, phases = grid.momenta(), grid.phases()
    d = bloch_vector_grid(p, momenta[None, :], phases[:, None], grid.boundary, tol=tol)
    energies = Band(band).sign * principal_energy(d)
    return ImStats.from_energies(phases, energies)
