import cmath
import math

import numpy as np
import pytest
from src.cascade_sim.analytic import amplitude_series, amplitudes_general, general_arrays
from src.cascade_sim.exceptions import (
    DivergenceError,
    InvalidParameterError,
    ShapeError,
    UndefinedModeError,
)
from src.cascade_sim.model import AmplitudeState, CascadeParams, SubsystemParams
from src.cascade_sim.observables import (
    FLAG_FLOOR,
    FLAG_OK,
    FLAG_REGIME,
    DetectorConfig,
    channel_probability,
    channel_rates,
    concurrence,
    concurrence_approx,
    detection_probability,
    emission_cutoff,
    emission_rate,
    emission_rate_series,
    interference_term,
    mode_envelope,
    p_rad,
    p_rad_infty,
    reconstruct_concurrence,
    single_cavity_detection,
)

from .utils_test import (
    fig_params,
    fig_subsystem,
    lossless_params,
    random_params,
    unequal_params,
)

FIG_GRID = np.linspace(0.0, 10.0, 1001)

#  g >> K with no losses besides the cavity outputs
STRONG = SubsystemParams(g=50.0, kappa=1.0)
STRONG_PEAKS = [(math.pi / 2 + n * math.pi) / 50.0 for n in range(3)]


def interference_series(p, grid):
    return np.array([interference_term(s, p.phi) for s in amplitude_series(p, grid)])


# ================================================================
#
#  Entanglement
#
# ================================================================


def test_concurrence_bounds():
    for s in amplitude_series(unequal_params(), FIG_GRID[::10]):
        c = concurrence(s)
        assert 0 <= c <= 1
        assert abs(interference_term(s, 1.3)) <= c + 1e-15


def test_interference_identity():
    rng = np.random.default_rng(26)
    for _ in range(10000):
        b_abs, d_abs = rng.uniform(0.0, 0.7, 2)
        b_arg, d_arg, phi = rng.uniform(0.0, 2 * math.pi, 3)
        beta = b_abs * cmath.exp(1j * b_arg)
        delta = d_abs * cmath.exp(1j * d_arg)
        s = AmplitudeState(t=0.0, alpha=0j, beta=beta, delta_amp=delta)
        expected = concurrence(s) * math.cos(d_arg - b_arg - phi)
        assert interference_term(s, phi) == pytest.approx(expected, abs=1e-12)


def test_concurrence_zero_at_start():
    assert concurrence(amplitudes_general(fig_params(), 0.0)) == 0


def test_interference_mostly_negative_early():
    value = interference_series(fig_params(), FIG_GRID)
    top = np.max(np.abs(value))
    early = value[FIG_GRID <= 3.0]
    assert np.mean(early < 0) > 0.9
    assert np.all(early <= 1e-2 * top)


def test_interference_decays():
    value = interference_series(fig_params(), FIG_GRID)
    tail = value[FIG_GRID >= 9.0]
    assert np.max(np.abs(tail)) < 0.1 * np.max(np.abs(value))


def test_interference_phase_invariant():
    base = interference_series(fig_params(), FIG_GRID[::50])
    for phi in (0.7, 3.0, 5.5):
        shifted = interference_series(fig_params(phi=phi), FIG_GRID[::50])
        assert np.max(np.abs(shifted - base)) < 1e-12


def test_concurrence_phase_invariant():
    s0 = amplitudes_general(unequal_params(), 2.0)
    p = unequal_params()
    s1 = amplitudes_general(CascadeParams(a=p.a, b=p.b, phi=4.0), 2.0)
    assert concurrence(s1) == pytest.approx(concurrence(s0), rel=1e-12)


@pytest.mark.parametrize("t", STRONG_PEAKS)
def test_strong_coupling_concurrence(t):
    s = amplitudes_general(CascadeParams(a=STRONG, b=STRONG), t)
    exact = concurrence(s)
    assert concurrence_approx(STRONG, t) == pytest.approx(exact, rel=0.05)
    assert interference_term(s, 0.0) == pytest.approx(-exact, rel=0.05)


# ================================================================
#
#  Rates and emission probabilities
#
# ================================================================


def test_emission_rate_expansion():
    p = unequal_params()
    s = amplitudes_general(p, 1.7)
    ka, kb = p.a.kappa, p.b.kappa
    expanded = (
        ka * abs(s.beta) ** 2
        + kb * abs(s.delta_amp) ** 2
        + 2 * math.sqrt(ka * kb) * interference_term(s, p.phi) / 2
    )
    assert emission_rate(p, s) == pytest.approx(expanded, rel=1e-12)


def test_rate_series_matches_scalar():
    p = unequal_params()
    grid = [0.0, 0.3, 2.0, 6.5]
    series = emission_rate_series(p, grid)
    for value, s in zip(series, amplitude_series(p, grid)):
        assert value == pytest.approx(emission_rate(p, s), rel=1e-12, abs=1e-300)


def test_channel_rates_order():
    p = unequal_params()
    s = amplitudes_general(p, 1.0)
    rates = channel_rates(p, s)
    assert rates[0] == emission_rate(p, s)
    assert rates[1] == pytest.approx(0.3 * abs(s.beta) ** 2)
    assert rates[4] == pytest.approx(0.1 * abs(s.gamma_amp) ** 2)


def test_probability_conserved():
    p = unequal_params()
    t = 5.0
    total = sum(channel_probability(p, k, t) for k in range(1, 6))
    remaining = amplitudes_general(p, t).norm_squared
    assert total + remaining == pytest.approx(1.0, abs=1e-9)
    assert channel_probability(p, 1, t) == p_rad(p, t)


def test_p_rad_monotone():
    p = fig_params()
    values = [p_rad(p, t) for t in (0.0, 0.5, 1.0, 2.0, 5.0)]
    assert values[0] == 0
    assert all(b > a for a, b in zip(values, values[1:]))


def test_emission_phase_invariant():
    p = unequal_params()
    base = None
    for phi in (0.0, 1.0, math.pi, 5.0):
        q = CascadeParams(a=p.a, b=p.b, phi=phi)
        values = (p_rad(q, 5.0), mode_envelope(q, FIG_GRID[::10]).zeta_sq)
        if base is None:
            base = values
        assert values[0] == pytest.approx(base[0], abs=1e-10)
        assert np.max(np.abs(values[1] - base[1])) < 1e-10


def test_p_rad_rejects_negative_time():
    with pytest.raises(InvalidParameterError):
        p_rad(fig_params(), -1.0)


def test_channel_probability_range():
    with pytest.raises(InvalidParameterError):
        channel_probability(fig_params(), 6, 1.0)


def test_lossless_photon_always_radiated():
    assert p_rad_infty(lossless_params()) == pytest.approx(1.0, abs=1e-8)


def test_figure_p_rad_infty_bounds():
    value = p_rad_infty(fig_params())
    assert 0.3 < value < 0.8


def test_no_output_coupling():
    p = CascadeParams(a=fig_subsystem(kappa=0.0), b=fig_subsystem())
    assert p_rad_infty(p) == 0.0
    assert p_rad(p, 3.0) == 0.0


def test_no_dissipation_diverges():
    with pytest.raises(DivergenceError):
        p_rad_infty(CascadeParams())
    with pytest.raises(DivergenceError):
        emission_cutoff(CascadeParams(a=SubsystemParams(g=1.0)))


def test_trapped_excitation_never_radiates():
    #  atom a is not coupled, its excitation stays put while cavity a leaks
    p = CascadeParams(
        a=SubsystemParams(kappa=0.9, kappa_loss=0.1), b=SubsystemParams(g=5.0, kappa=0.9)
    )
    assert p_rad_infty(p) == 0.0
    with pytest.raises(UndefinedModeError):
        mode_envelope(p, FIG_GRID)


def test_slow_decay_diverges():
    p = CascadeParams(a=SubsystemParams(g=1.0, kappa=1e-12))
    with pytest.raises(DivergenceError):
        p_rad_infty(p)


def test_strong_coupling_quadrature(caplog):
    p = CascadeParams(a=STRONG, b=STRONG)
    assert p_rad_infty(p) == pytest.approx(1.0, abs=1e-8)
    assert "not converged" not in caplog.text


def test_emission_cutoff():
    t_cut, residual = emission_cutoff(fig_params())
    assert residual < 1e-10
    assert amplitudes_general(fig_params(), t_cut / 2).norm_squared >= 1e-10


# ================================================================
#
#  Mode function
#
# ================================================================


def normalised_mode(p):
    t_cut, _residual = emission_cutoff(p)
    return mode_envelope(p, np.linspace(0.0, t_cut, int(400 * t_cut) + 1))


def quick_params(rng):
    """random_params, redrawn until the photon has left by t=256"""
    while True:
        p = random_params(rng)
        try:
            if p.a.kappa > 0 and p.a.g > 0 and emission_cutoff(p)[0] <= 256:
                return p
        except DivergenceError:
            pass


@pytest.mark.parametrize("seed", range(5))
def test_mode_normalised(seed):
    mode = normalised_mode(quick_params(np.random.default_rng(seed)))
    assert mode.integral() == pytest.approx(1.0, abs=1e-6)
    assert np.all(mode.zeta_sq >= 0)


@pytest.mark.slow
def test_mode_normalised_many():
    rng = np.random.default_rng(50)
    for _ in range(50):
        mode = normalised_mode(quick_params(rng))
        assert mode.integral() == pytest.approx(1.0, abs=1e-6)


def test_mode_starts_at_zero():
    mode = mode_envelope(fig_params(), FIG_GRID)
    assert mode.zeta_sq[0] == 0


def test_mode_without_cavity_b_is_beta():
    p = fig_params()
    q = CascadeParams(a=p.a, b=fig_subsystem(kappa=0.0, kappa_loss=0.0))
    envelope = mode_envelope(q, FIG_GRID).scaled_envelope(p.a.kappa)
    beta = np.abs(general_arrays(q, FIG_GRID)[1])
    assert np.max(np.abs(envelope - beta)) < 1e-12


def test_cascade_delays_the_mode():
    p = fig_params()
    q = CascadeParams(a=p.a, b=fig_subsystem(kappa=0.0, kappa_loss=0.0))

    def centroid(mode):
        weight = mode.scaled_envelope(p.a.kappa) ** 2
        return np.sum(FIG_GRID * weight) / np.sum(weight)

    assert centroid(mode_envelope(q, FIG_GRID)) < centroid(mode_envelope(p, FIG_GRID)) - 1


def test_mode_undefined():
    p = CascadeParams(a=fig_subsystem(kappa=0.0), b=fig_subsystem())
    with pytest.raises(UndefinedModeError):
        mode_envelope(p, FIG_GRID)


def test_short_mode_grid_warns(caplog):
    mode_envelope(fig_params(), [0.0, 0.5, 1.0])
    assert "will not integrate to 1" in caplog.text


# ================================================================
#
#  Detector
#
# ================================================================


@pytest.mark.parametrize(
    "kwargs", [{"eta": -0.1}, {"eta": 1.5}, {"t_bin": 0.0}, {"t_bin": -1.0}]
)
def test_detector_rejects(kwargs):
    with pytest.raises(InvalidParameterError):
        DetectorConfig(**kwargs)


def test_detection_probability():
    p = unequal_params()
    det = DetectorConfig(eta=0.5, t_bin=0.02)
    rate = emission_rate(p, amplitudes_general(p, 2.0))
    assert detection_probability(p, 2.0, det) == pytest.approx(0.01 * rate, rel=1e-12)
    assert detection_probability(p, 2.0, DetectorConfig(eta=0.0)) == 0


def test_single_cavity_reference():
    p = fig_params()
    det = DetectorConfig()
    q = CascadeParams(a=p.a, b=fig_subsystem(kappa=0.0, kappa_loss=0.0))
    for t in (0.5, 1.0, 3.0):
        assert single_cavity_detection(p, t, det) == pytest.approx(
            detection_probability(q, t, det), rel=1e-12
        )


# ================================================================
#
#  Reconstruction
#
# ================================================================


def test_reconstruct_exact_inputs():
    det = DetectorConfig(eta=0.8, t_bin=0.01)
    kappa = 0.9
    scale = det.eta * kappa * det.t_bin
    beta = np.array([0.5, 0.4, 0.2])
    delta = np.array([0.1, 0.3, 0.0])
    rec = reconstruct_concurrence(scale * (beta - delta) ** 2, scale * beta**2, det, kappa)
    assert rec.flags == (FLAG_OK,) * 3
    assert np.max(np.abs(rec.beta_abs - beta)) < 1e-12
    assert np.max(np.abs(rec.delta_abs - delta)) < 1e-12
    assert np.max(np.abs(rec.concurrence - 2 * beta * delta)) < 1e-12


def test_reconstruct_equal_measurements():
    rec = reconstruct_concurrence([1e-3], [1e-3], DetectorConfig(), 1.0)
    assert rec.delta_abs[0] == 0 and rec.concurrence[0] == 0


def test_reconstruct_flags(caplog):
    pd = [1e-3, 2e-3, 0.0]
    pd_single = [0.0, 1e-3, 1e-3]
    rec = reconstruct_concurrence(pd, pd_single, DetectorConfig(), 1.0)
    assert rec.flags == (FLAG_FLOOR, FLAG_REGIME, FLAG_OK)
    assert math.isnan(rec.concurrence[0]) and math.isnan(rec.beta_abs[0])
    assert math.isnan(rec.concurrence[1]) and not math.isnan(rec.beta_abs[1])
    assert "strong-coupling branch" in caplog.text


def test_reconstruct_clamped():
    rec = reconstruct_concurrence([0.0], [0.01], DetectorConfig(t_bin=0.01), 1.0)
    assert rec.concurrence[0] == 1.0


def test_reconstruct_shape_mismatch():
    with pytest.raises(ShapeError):
        reconstruct_concurrence([1.0, 2.0], [1.0], DetectorConfig(), 1.0)


def test_reconstruct_needs_kappa():
    with pytest.raises(InvalidParameterError):
        reconstruct_concurrence([1.0], [1.0], DetectorConfig(), 0.0)
    with pytest.raises(InvalidParameterError):
        reconstruct_concurrence([1.0], [1.0], DetectorConfig(eta=0.0), 1.0)


def test_reconstruct_strong_coupling_pipeline():
    p = CascadeParams(a=STRONG, b=STRONG)
    q = CascadeParams(a=STRONG, b=SubsystemParams(g=50.0))
    det = DetectorConfig()
    pd = [detection_probability(p, t, det) for t in STRONG_PEAKS]
    pd1 = [detection_probability(q, t, det) for t in STRONG_PEAKS]
    rec = reconstruct_concurrence(pd, pd1, det, STRONG.kappa)
    for t, value in zip(STRONG_PEAKS, rec.concurrence):
        exact = concurrence(amplitudes_general(p, t))
        assert value == pytest.approx(exact, rel=0.05)


def test_reconstruct_exact_dynamics():
    p = fig_params()
    det = DetectorConfig()
    grid = FIG_GRID[::10]
    pd = [detection_probability(p, t, det) for t in grid]
    pd1 = [single_cavity_detection(p, t, det) for t in grid]
    rec = reconstruct_concurrence(pd, pd1, det, p.a.kappa)
    assert rec.flags[0] == FLAG_FLOOR
    assert set(rec.flags) <= {FLAG_OK, FLAG_FLOOR, FLAG_REGIME}

    n_ok = 0
    for s, flag, value in zip(amplitude_series(p, grid), rec.flags, rec.concurrence):
        b, d = abs(s.beta), abs(s.delta_amp)
        field = abs(s.beta + s.delta_amp)
        assert (flag == FLAG_REGIME) == (flag != FLAG_FLOOR and field > b)
        if flag != FLAG_OK or value == 1.0:
            continue
        n_ok += 1
        #  anti-phased fields invert exactly, any other relative phase lowers the estimate
        deviation = concurrence(s) - value
        assert deviation == pytest.approx(2 * b * (field + d - b), abs=1e-9)
        assert -1e-9 <= deviation <= concurrence(s) + 1e-9
    assert n_ok >= 10
