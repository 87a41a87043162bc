"""Gap and exceptional-point scans over mu."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from functools import partial
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .config import DEFAULT_TOLERANCES, Boundary, DriveParams, PhasePoint, Tolerances, TorusGrid
from .eigen import ep_defect
from .model import bloch_vector, energy_squared
from .workers import run_ordered

logger = logging.getLogger(__name__)

DEFAULT_SCAN_GRID = 64


@dataclass(slots=True)
class GapReport:
    mu: float
    min_abs_e: float
    argmin_point: PhasePoint
    ep_defect_at_argmin: float
    boundary: Boundary = Boundary.PBC
    polished: bool = False

    def as_row(self) -> List[Any]:
        return [
            self.mu,
            self.min_abs_e,
            self.argmin_point.momentum,
            self.argmin_point.drive_phase,
            self.ep_defect_at_argmin,
        ]


@dataclass(slots=True)
class GaplessScan:
    gamma: float
    boundary: Boundary
    intervals: List[Tuple[float, float]]
    excluded: List[float] = field(default_factory=list)
    reports: List[GapReport] = field(default_factory=list)

    def contains(self, mu: float, slack: float = 0.0) -> bool:
        return any(lo - slack <= mu <= hi + slack for lo, hi in self.intervals)

    def summary(self) -> Dict[str, Any]:
        return {
            "gamma": self.gamma,
            "boundary": self.boundary.value,
            "intervals": [list(pair) for pair in self.intervals],
            "excluded": list(self.excluded),
        }


def _abs_energy_squared(p: DriveParams, momentum, phase, boundary: Boundary, tol: Tolerances):
    return np.abs(energy_squared(p, momentum, phase, boundary, tol=tol))


def _polish(p: DriveParams, start: Tuple[float, float], boundary: Boundary, tol: Tolerances) -> Tuple[float, float]:
    def residual(x: np.ndarray) -> np.ndarray:
        value = complex(energy_squared(p, x[0], x[1], boundary, tol=tol))
        return np.array([value.real, value.imag])

    fit = least_squares(residual, np.array(start), jac="3-point", xtol=1e-14, ftol=1e-14, gtol=1e-14)
    return float(fit.x[0]), float(fit.x[1])


def min_gap(
    p: DriveParams,
    boundary: Boundary = Boundary.PBC,
    grid: Optional[TorusGrid] = None,
    *,
    tol: Tolerances = DEFAULT_TOLERANCES,
) -> GapReport:
    """Refined minimum of |E| over the (momentum, phase) torus.

    Subdivision runs on |E^2| (same argmin, smooth through exceptional
    points); a least-squares polish of (Re E^2, Im E^2) finishes the search.
    """
    boundary = Boundary(boundary)
    grid = grid or TorusGrid(DEFAULT_SCAN_GRID, DEFAULT_SCAN_GRID, boundary)
    momenta, phases = grid.mesh()
    values = _abs_energy_squared(p, momenta, phases, boundary, tol)
    index = np.unravel_index(int(np.argmin(values)), values.shape)
    best_k, best_t = float(momenta[index]), float(phases[index])
    best = float(values[index])
    h_k, h_t = grid.spacing

    side = 2 * tol.refine_factor + 1
    for round_ in range(tol.refine_rounds):
        ks = best_k + np.linspace(-h_k, h_k, side)
        ts = best_t + np.linspace(-h_t, h_t, side)
        local_k, local_t = np.meshgrid(ks, ts, indexing="ij")
        local = _abs_energy_squared(p, local_k, local_t, boundary, tol)
        index = np.unravel_index(int(np.argmin(local)), local.shape)
        if local[index] <= best:
            best, best_k, best_t = float(local[index]), float(local_k[index]), float(local_t[index])
        h_k /= tol.refine_factor
        h_t /= tol.refine_factor
        logger.debug("refine round %d for mu=%g: |E|^2 = %.3e", round_ + 1, p.mu, best)

    polished = False
    candidate_k, candidate_t = _polish(p, (best_k, best_t), boundary, tol)
    candidate = float(_abs_energy_squared(p, candidate_k, candidate_t, boundary, tol))
    if candidate < best:
        best, best_k, best_t, polished = candidate, candidate_k, candidate_t, True
    else:
        logger.debug("polish rejected for mu=%g (%.3e >= %.3e)", p.mu, candidate, best)

    point = PhasePoint(best_k, best_t).wrapped()
    defect = float(ep_defect(bloch_vector(p, point, boundary, tol=tol), tol=tol))
    return GapReport(
        mu=p.mu,
        min_abs_e=float(np.sqrt(best)),
        argmin_point=point,
        ep_defect_at_argmin=defect,
        boundary=boundary,
        polished=polished,
    )


def _gap_at(mu: float, base: DriveParams, boundary: Boundary, grid_size: int, tol: Tolerances) -> GapReport:
    grid = TorusGrid(grid_size, grid_size, boundary)
    return min_gap(base.with_mu(mu), boundary, grid, tol=tol)


def _merge(intervals: List[Tuple[float, float]], slack: float) -> List[Tuple[float, float]]:
    merged: List[Tuple[float, float]] = []
    for lo, hi in intervals:
        if merged and lo <= merged[-1][1] + slack:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return merged


def _is_excluded(mu: float, gamma: float, boundary: Boundary, tol: Tolerances) -> bool:
    return boundary is Boundary.OBC and gamma != 0 and abs(abs(mu) - abs(gamma)) <= tol.degenerate_tol


def gapless_intervals(
    gamma: float,
    mu_range: Tuple[float, float] = (-1.0, 1.0),
    n_mu: int = 201,
    boundary: Boundary = Boundary.PBC,
    tol: Optional[float] = None,
    *,
    delta: float = 1.0,
    grid_size: int = DEFAULT_SCAN_GRID,
    tolerances: Tolerances = DEFAULT_TOLERANCES,
    jobs: int = 1,
) -> GaplessScan:
    """Sweep mu, mark min |E| < tol, merge neighbours into (mu_lo, mu_hi) intervals.

    Closures that fall between two sweep points are located by a bounded
    minimisation of min |E| and reported as zero-width intervals. For OBC the
    degenerate points mu = +/-gamma are skipped and listed in ``excluded``.
    """
    if n_mu < 50:
        raise ValueError(f"n_mu must be at least 50, got {n_mu}")
    boundary = Boundary(boundary)
    threshold = tolerances.gapless_tol if tol is None else tol
    base = DriveParams(mu=0.0, gamma=gamma, delta=delta)

    mus = np.linspace(mu_range[0], mu_range[1], n_mu)
    excluded = []
    if boundary is Boundary.OBC and gamma != 0:
        excluded = [m for m in (-abs(gamma), abs(gamma)) if mu_range[0] <= m <= mu_range[1]]
    keep = [float(mu) for mu in mus if not _is_excluded(float(mu), gamma, boundary, tolerances)]

    worker = partial(_gap_at, base=base, boundary=boundary, grid_size=grid_size, tol=tolerances)
    reports = run_ordered(worker, keep, jobs)
    gaps = np.array([report.min_abs_e for report in reports])
    marked = gaps < threshold

    intervals: List[Tuple[float, float]] = []
    start = None
    for i, flag in enumerate(marked):
        if flag and start is None:
            start = i
        if start is not None and (not flag or i == len(marked) - 1):
            stop = i if flag else i - 1
            intervals.append((keep[start], keep[stop]))
            start = None

    for i in range(1, len(keep) - 1):
        if marked[i] or not (gaps[i] <= gaps[i - 1] and gaps[i] <= gaps[i + 1]):
            continue
        lo, hi = keep[i - 1], keep[i + 1]
        if any(lo < m < hi for m in excluded):
            continue
        found = minimize_scalar(
            lambda mu: _gap_at(mu, base, boundary, grid_size, tolerances).min_abs_e,
            bounds=(lo, hi),
            method="bounded",
            options={"xatol": 1e-7},
        )
        if found.fun < threshold:
            logger.debug("isolated closure at mu=%.6f (min |E| = %.2e)", found.x, found.fun)
            intervals.append((float(found.x), float(found.x)))

    intervals = _merge(sorted(intervals), slack=1e-6)
    logger.info("%s gap scan at gamma=%g: %d gapless interval(s)", boundary.value.upper(), gamma, len(intervals))
    return GaplessScan(gamma=gamma, boundary=boundary, intervals=intervals, excluded=excluded, reports=reports)
