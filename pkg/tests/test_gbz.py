import math

import numpy as np
import pytest

from nhpump.config import Boundary, DriveParams
from nhpump.eigen import principal_energy
from nhpump.errors import DegenerateDrive, DegenerateGBZ, DegeneratePhi
from nhpump.gbz import (
    beta_roots,
    characteristic_roots,
    gbz_contour,
    gbz_radius,
    obc_energy_squared_closed_form,
    obc_spectrum_gbz,
)
from nhpump.model import bloch_vector_grid


@pytest.mark.parametrize(
    "mu, gamma, expected",
    [
        (0.5, 0.3, 0.5),
        (1.0, 0.3, math.sqrt(0.7 / 1.3)),
        (-1.0, 0.3, math.sqrt(1.3 / 0.7)),
        (0.1, 0.3, math.sqrt(0.2 / 0.4)),
        (0.5, 0.0, 1.0),
        (0.0, 0.0, 1.0),
    ],
)
def test_gbz_radius_closed_form(mu, gamma, expected):
    assert gbz_radius(DriveParams(mu=mu, gamma=gamma)) == pytest.approx(expected)


@pytest.mark.parametrize("mu", [0.3, -0.3])
def test_gbz_radius_degenerate(mu):
    with pytest.raises(DegenerateGBZ):
        gbz_radius(DriveParams(mu=mu, gamma=0.3))


@pytest.mark.parametrize("phi", [0.4, 1.7, math.pi, 5.9])
def test_beta_roots_share_the_radius(nonreciprocal, phi):
    first, second = beta_roots(nonreciprocal, 0.8, phi)
    radius = gbz_radius(nonreciprocal)
    assert abs(first) == pytest.approx(radius, abs=1e-12)
    assert abs(second) == pytest.approx(radius, abs=1e-12)


@pytest.mark.parametrize("mu, gamma", [(1.0, 0.3), (-1.0, 0.3), (0.1, 0.3), (2.5, 0.7)])
@pytest.mark.parametrize("phi", [0.4, 1.7, 5.9])
def test_beta_roots_product(mu, gamma, phi):
    first, second = beta_roots(DriveParams(mu=mu, gamma=gamma), 0.8, phi)
    expected = -np.exp(-1j * phi) * (mu - gamma) / (mu + gamma)
    assert abs(first * second - expected) < 1e-10


@pytest.mark.parametrize("mu, t", [(1.0, 0.3), (-1.0, 2.1), (0.8, 4.0), (0.1, 0.3)])
def test_obc_energies_solve_characteristic_equation(mu, t):
    p = DriveParams(mu=mu, gamma=0.3)
    n_theta = 64
    energies = obc_spectrum_gbz(p, t, n_theta)[:n_theta]
    beta = gbz_radius(p) * np.exp(1j * 2 * math.pi * np.arange(n_theta) / n_theta)
    t2 = p.t2(t)
    d3 = p.delta * math.sin(t)
    residual = (
        t2 * (mu + p.gamma) * beta**2
        + (mu**2 - p.gamma**2 + t2**2 + d3**2 - energies**2) * beta
        + t2 * (mu - p.gamma)
    )
    assert np.max(np.abs(residual)) < 1e-8


def test_beta_roots_degenerate_inputs(nonreciprocal):
    with pytest.raises(DegeneratePhi):
        beta_roots(nonreciprocal, 0.8, 0.0)
    with pytest.raises(DegeneratePhi):
        beta_roots(nonreciprocal, 0.8, 2 * math.pi)
    # t2 = mu - cos t vanishes at t = arccos(mu)
    p = DriveParams(mu=0.5, gamma=0.3)
    with pytest.raises(DegenerateDrive):
        beta_roots(p, math.acos(0.5), 1.0)


def test_characteristic_roots_lie_on_gbz(nonreciprocal):
    t = 0.8
    beta = gbz_radius(nonreciprocal) * np.exp(0.9j)
    d = bloch_vector_grid(nonreciprocal, 0.9, t, Boundary.OBC)
    first, second = characteristic_roots(nonreciprocal, t, complex(d.energy_squared()))
    assert min(abs(first - beta), abs(second - beta)) < 1e-10
    assert abs(first) == pytest.approx(abs(second), abs=1e-10)


@pytest.mark.parametrize("mu", [1.0, 0.6, -0.8, 0.1, -0.2])
def test_gbz_contour_matches_closed_form(mu):
    p = DriveParams(mu=mu, gamma=0.3)
    contour = gbz_contour(p, 0.3, n_phi=32)
    assert contour.radius == pytest.approx(gbz_radius(p), abs=1e-9)
    assert contour.betas.shape == (32, 2)
    assert len(contour.samples) == 32
    assert contour.pole_order == contour.half_degree == 1
    assert contour.complex_branch == (abs(mu) < 0.3)


def test_gbz_contour_sweep_excludes_endpoints(nonreciprocal):
    contour = gbz_contour(nonreciprocal, 0.3, n_phi=16)
    assert contour.phis[0] > 0
    assert contour.phis[-1] < 2 * math.pi


def test_gbz_contour_validates_sample_count(nonreciprocal):
    with pytest.raises(ValueError):
        gbz_contour(nonreciprocal, 0.3, n_phi=4)


@pytest.mark.parametrize("mu, t", [(1.0, 0.3), (0.6, 1.2), (-0.7, 2.5), (0.1, 0.3), (-0.25, 4.0)])
def test_obc_spectrum_matches_closed_form(mu, t):
    p = DriveParams(mu=mu, gamma=0.3)
    n_theta = 64
    energies = obc_spectrum_gbz(p, t, n_theta)
    thetas = 2 * math.pi * np.arange(n_theta) / n_theta
    assert energies.shape == (2 * n_theta,)
    assert np.allclose(energies[:n_theta] ** 2, obc_energy_squared_closed_form(p, thetas, t), atol=1e-10)
    assert np.allclose(energies[n_theta:], -energies[:n_theta])


@pytest.mark.parametrize("t", [0.0, 0.3, 1.5, 3.0, 5.0])
def test_obc_spectrum_is_real_beyond_gamma(nonreciprocal, t):
    energies = obc_spectrum_gbz(nonreciprocal, t, 101)
    assert np.max(np.abs(energies.imag)) < 1e-10


def test_obc_spectrum_is_complex_inside_gamma():
    energies = obc_spectrum_gbz(DriveParams(mu=0.1, gamma=0.3), 0.3, 101)
    assert np.max(np.abs(energies.imag)) > 1e-3


def test_hermitian_obc_spectrum_equals_bloch(hermitian):
    thetas = 2 * math.pi * np.arange(50) / 50
    bloch = principal_energy(bloch_vector_grid(hermitian, thetas, 0.7, Boundary.PBC))
    assert np.allclose(obc_spectrum_gbz(hermitian, 0.7, 50)[:50], bloch)
