import math

import numpy as np
import pytest

from nhpump.config import Boundary, DriveParams, PhasePoint
from nhpump.errors import DegenerateGBZ
from nhpump.model import (
    BlochVector,
    bloch_vector,
    bloch_vector_grid,
    dk_h,
    dk_hamiltonian,
    energy_squared,
    h_obc,
    h_pbc,
    hamiltonian,
    momentum_radius,
)


def test_drive_params_hoppings():
    p = DriveParams(mu=0.7, gamma=0.2)
    assert p.t1 == 0.7
    assert p.t2(0.0) == pytest.approx(-0.3)
    assert p.t2(math.pi) == pytest.approx(1.7)
    assert p.period == pytest.approx(2 * math.pi)
    assert p.with_mu(-0.1).mu == -0.1


@pytest.mark.parametrize("kwargs", [{"mu": float("nan")}, {"mu": 0.5, "adiabatic_factor": 0.0}])
def test_drive_params_rejects_bad_values(kwargs):
    with pytest.raises(ValueError):
        DriveParams(**kwargs)


@pytest.mark.parametrize("boundary", list(Boundary))
def test_hamiltonian_matches_bloch_vector(nonreciprocal, rng, boundary):
    momenta = rng.uniform(0, 2 * math.pi, 20)
    phases = rng.uniform(0, 2 * math.pi, 20)
    direct = hamiltonian(nonreciprocal, momenta, phases, boundary)
    from_d = bloch_vector_grid(nonreciprocal, momenta, phases, boundary).matrix()
    assert np.allclose(direct, from_d, atol=1e-12)


def test_hamiltonian_is_traceless_with_energy_squared(nonreciprocal, rng):
    momenta = rng.uniform(0, 2 * math.pi, 10)
    phases = rng.uniform(0, 2 * math.pi, 10)
    h = hamiltonian(nonreciprocal, momenta, phases)
    assert np.allclose(np.trace(h, axis1=-2, axis2=-1), 0)
    assert np.allclose(-np.linalg.det(h), energy_squared(nonreciprocal, momenta, phases))


def test_hermitian_at_zero_gamma(hermitian):
    h = h_pbc(hermitian, PhasePoint(0.4, 1.1))
    assert np.allclose(h, h.conj().T)


def test_nonreciprocity_breaks_hermiticity(nonreciprocal):
    h = h_pbc(nonreciprocal, PhasePoint(0.4, 1.1))
    assert not np.allclose(h, h.conj().T)
    assert h[0, 1] - np.conj(h[1, 0]) == pytest.approx(2 * nonreciprocal.gamma)


def test_obc_reduces_to_pbc_without_gamma(hermitian):
    pt = PhasePoint(2.3, 0.9)
    assert np.allclose(h_obc(hermitian, pt), h_pbc(hermitian, pt))


@pytest.mark.parametrize("boundary", list(Boundary))
def test_dk_hamiltonian_matches_finite_difference(nonreciprocal, boundary):
    k, t, step = 0.7, 1.9, 1e-5
    numeric = (
        hamiltonian(nonreciprocal, k + step, t, boundary) - hamiltonian(nonreciprocal, k - step, t, boundary)
    ) / (2 * step)
    assert np.allclose(dk_hamiltonian(nonreciprocal, k, t, boundary), numeric, atol=1e-8)
    assert np.allclose(dk_h(nonreciprocal, PhasePoint(k, t), boundary), numeric, atol=1e-8)


def test_momentum_radius(nonreciprocal):
    assert momentum_radius(nonreciprocal, Boundary.PBC) == 1.0
    assert momentum_radius(nonreciprocal, Boundary.OBC) == pytest.approx(math.sqrt(0.7 / 1.3))
    assert momentum_radius(DriveParams(mu=0.3, gamma=0.0), Boundary.OBC) == 1.0


def test_obc_at_maximal_nonreciprocity_is_rejected():
    with pytest.raises(DegenerateGBZ):
        h_obc(DriveParams(mu=0.3, gamma=0.3), PhasePoint(0.0, 0.5))
    # the periodic chain is still well defined there
    assert h_pbc(DriveParams(mu=0.3, gamma=0.3), PhasePoint(0.0, 0.5)).shape == (2, 2)


def test_grid_broadcasting(nonreciprocal):
    momenta = np.linspace(0, 2 * math.pi, 7)[:, None]
    phases = np.linspace(0, 2 * math.pi, 5)[None, :]
    assert energy_squared(nonreciprocal, momenta, phases).shape == (7, 5)
    assert hamiltonian(nonreciprocal, momenta, phases).shape == (7, 5, 2, 2)


def test_scalar_bloch_vector(nonreciprocal):
    d = bloch_vector(nonreciprocal, PhasePoint(0.0, 0.0))
    assert isinstance(d, BlochVector)
    # t2 = 0 at t = 0 for mu = 1: only t1 and i gamma survive
    assert d.d1 == pytest.approx(1.0)
    assert d.d2 == pytest.approx(0.3j)
    assert d.d3 == pytest.approx(0.0)
    assert d.energy_squared() == pytest.approx(1.0 - 0.09)
