import numpy as np
import pytest
from src.cascade_sim.analytic import amplitude_series
from src.cascade_sim.constants import IDX_A, IDX_E
from src.cascade_sim.exceptions import InvalidParameterError
from src.cascade_sim.lindblad import (
    channel_yields,
    check_density_matrix,
    evolve_master,
    lindblad_rhs,
    populations,
    pure_density,
)
from src.cascade_sim.model import CascadeParams
from src.cascade_sim.observables import p_rad_infty

from .utils_test import fig_params, lossless_params, unequal_params

GRID = np.linspace(0.0, 10.0, 51)


@pytest.mark.parametrize("p", [fig_params(), unequal_params()])
def test_physical_density_matrices(p):
    for rho in evolve_master(p, GRID):
        assert np.trace(rho).real == pytest.approx(1.0, abs=1e-8)
        assert np.array_equal(rho, rho.conj().T)
        assert np.min(np.linalg.eigvalsh(rho)) > -1e-9


@pytest.mark.parametrize("p", [fig_params(), unequal_params()])
def test_populations_match_amplitudes(p):
    rhos = evolve_master(p, GRID)
    for rho, s in zip(rhos, amplitude_series(p, GRID)):
        assert np.max(np.abs(populations(rho) - s.probabilities())) < 1e-8


def test_ground_state_never_coherent():
    for rho in evolve_master(unequal_params(), GRID):
        assert np.max(np.abs(rho[IDX_E, :IDX_E])) < 1e-10


def test_ground_population_is_lost_norm():
    p = unequal_params()
    rho = evolve_master(p, [0.0, 4.0])[1]
    s = amplitude_series(p, [4.0])[0]
    assert populations(rho)[IDX_E] == pytest.approx(1 - s.norm_squared, abs=1e-8)


def test_yields_add_up():
    p = fig_params()
    yields = channel_yields(p, 60.0)
    assert yields.shape == (5,)
    assert np.all(yields >= 0)
    assert yields.sum() == pytest.approx(1.0, abs=1e-8)
    assert yields[0] == pytest.approx(p_rad_infty(p), abs=1e-7)


def test_lossless_yield_all_emission():
    yields = channel_yields(lossless_params(), 60.0)
    assert yields[0] == pytest.approx(1.0, abs=1e-8)
    assert np.all(np.abs(yields[1:]) < 1e-12)


def test_ground_state_is_stationary():
    rho = pure_density(IDX_E)
    assert not np.any(lindblad_rhs(unequal_params(), rho))


def test_zero_parameters_keep_rho():
    for rho in evolve_master(CascadeParams(), [0.0, 5.0]):
        assert np.array_equal(rho, pure_density(IDX_A))


def test_zero_end_time():
    assert len(evolve_master(fig_params(), [0.0, 0.0])) == 2


@pytest.mark.parametrize(
    "rho",
    [
        np.eye(4) / 4,
        np.diag([0.5, 0.6, 0.0, 0.0, -0.1]),
        np.diag([0.5, 0.0, 0.0, 0.0, 0.0]),
        pure_density() + np.triu(np.ones((5, 5)), 1) * 0.1,
    ],
)
def test_bad_density_matrix(rho):
    with pytest.raises(InvalidParameterError):
        check_density_matrix(rho)
    with pytest.raises(InvalidParameterError):
        evolve_master(fig_params(), GRID, rho0=rho)


def test_yields_need_positive_end():
    with pytest.raises(InvalidParameterError):
        channel_yields(fig_params(), 0.0)
