import numpy as np
import pytest

from nhpump.config import Band, Boundary, DriveParams, TorusGrid
from nhpump.errors import GaplessSpectrum
from nhpump.topology import chern_derivative, chern_plaquette

GRID = TorusGrid(48, 48)


def test_hermitian_trivial_point():
    result = chern_plaquette(DriveParams(mu=0.0, gamma=0.0), grid=GRID)
    assert result.integer_value == 0
    assert result.converged
    assert result.method == "plaquette"


def test_hermitian_pump_has_unit_chern(hermitian):
    result = chern_plaquette(hermitian, grid=GRID)
    assert abs(result.integer_value) == 1
    assert result.value == pytest.approx(result.integer_value, abs=1e-9)
    assert result.max_plaquette_flux < np.pi


def test_chern_is_odd_in_mu():
    plus = chern_plaquette(DriveParams(mu=1.5, gamma=0.0), grid=GRID)
    minus = chern_plaquette(DriveParams(mu=-1.5, gamma=0.0), grid=GRID)
    assert plus.integer_value == -minus.integer_value != 0


@pytest.mark.parametrize("mu", [1.5, -1.5, 0.0])
def test_bands_carry_opposite_chern(mu):
    p = DriveParams(mu=mu, gamma=0.3)
    lower = chern_plaquette(p, Band.MINUS, GRID)
    upper = chern_plaquette(p, Band.PLUS, GRID)
    assert lower.integer_value + upper.integer_value == 0


@pytest.mark.parametrize("mu", [1.5, -1.5, 0.0, 1.0])
def test_nonreciprocity_keeps_gapped_plateau(mu):
    hermitian = chern_plaquette(DriveParams(mu=mu, gamma=0.0), grid=GRID)
    pbc = chern_plaquette(DriveParams(mu=mu, gamma=0.3), grid=GRID)
    obc = chern_plaquette(DriveParams(mu=mu, gamma=0.3), grid=TorusGrid(48, 48, Boundary.OBC))
    assert pbc.integer_value == hermitian.integer_value
    assert obc.integer_value == hermitian.integer_value
    assert obc.converged


@pytest.mark.parametrize(
    "mu, gamma, boundary",
    [(1.5, 0.0, Boundary.PBC), (1.2, 0.3, Boundary.PBC), (-1.5, 0.3, Boundary.OBC)],
)
def test_chern_flips_under_drive_reversal(mu, gamma, boundary):
    # t -> -t leaves t2 alone and flips d3, i.e. delta -> -delta
    grid = TorusGrid(48, 48, boundary)
    forward = chern_plaquette(DriveParams(mu=mu, gamma=gamma), grid=grid)
    reversed_ = chern_plaquette(DriveParams(mu=mu, gamma=gamma, delta=-1.0), grid=grid)
    assert forward.integer_value != 0
    assert reversed_.integer_value == -forward.integer_value


@pytest.mark.slow
@pytest.mark.parametrize(
    "boundary, mus",
    [
        (Boundary.PBC, (-1.0, -0.9, -0.2, -0.1, 0.1, 0.2, 0.8, 1.0)),
        (Boundary.OBC, (-1.0, -0.8, -0.4, -0.1, 0.1, 0.4, 0.8, 1.0)),
    ],
)
def test_grid_doubling_keeps_integers(boundary, mus):
    for mu in mus:
        p = DriveParams(mu=mu, gamma=0.3)
        coarse = chern_plaquette(p, grid=TorusGrid(128, 128, boundary), strict=False)
        fine = chern_plaquette(p, grid=TorusGrid(256, 256, boundary), strict=False)
        assert coarse.converged and fine.converged, mu
        assert coarse.integer_value == fine.integer_value, mu


@pytest.mark.parametrize(
    "mu, gamma",
    [
        (1.5, 0.0), (-1.5, 0.3), (0.0, 0.3), (1.2, 0.3), (0.0, 0.0),
        (-1.2, 0.0), (2.0, 0.3), (-2.0, 0.3), (-1.0, 0.0), (0.1, 0.0),
    ],
)
def test_derivative_agrees_with_plaquette(mu, gamma):
    p = DriveParams(mu=mu, gamma=gamma)
    grid = TorusGrid(128, 128)
    plaquette = chern_plaquette(p, grid=grid)
    derivative = chern_derivative(p, grid=grid)
    assert derivative.method == "derivative"
    assert derivative.value == pytest.approx(plaquette.value, abs=0.02)
    assert abs(derivative.imaginary_part) < 0.02
    assert derivative.berry_curvature_field.shape == (128, 128)


def test_gap_closing_on_grid_is_reported():
    # the Hermitian chain closes at (k, t) = (0, 0) for mu = 1/2
    with pytest.raises(GaplessSpectrum) as excinfo:
        chern_plaquette(DriveParams(mu=0.5, gamma=0.0), grid=GRID)
    assert excinfo.value.momentum == pytest.approx(0.0)


def test_curvature_field_integrates_to_chern(hermitian):
    result = chern_plaquette(hermitian, grid=GRID, keep_field=True)
    h_k, h_t = GRID.spacing
    total = np.sum(result.berry_curvature_field) * h_k * h_t / (2 * np.pi)
    assert total == pytest.approx(result.value)
    assert result.as_dict()["grid"]["n_momentum"] == 48


def test_non_strict_mode_reports_instead_of_raising():
    # coarse grid across a narrow gap: the result is returned either way
    result = chern_plaquette(DriveParams(mu=0.66, gamma=0.3), grid=TorusGrid(8, 8), strict=False)
    assert isinstance(result.converged, bool)
