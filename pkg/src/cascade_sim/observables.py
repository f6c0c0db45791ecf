#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See the README.md in the repository for more info
#
#  Everything here is evaluated on the closed-form amplitudes of
#  analytic.py. Rates are <J_i^dag J_i> of the no-jump state.
#

"""Concurrence, emission probabilities, mode function and detector response"""

import cmath
import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np
import numpy.typing as npt
from scipy.integrate import quad, trapezoid

from .analytic import (
    AmplitudeArrays,
    amplitudes_general,
    general_arrays,
    omega_values,
)
from .constants import (
    NORM_CUTOFF,
    QUAD_ABS_TOL,
    QUAD_LIMIT,
    RECONSTRUCT_FLOOR,
    T_CUT_LIMIT,
    T_CUT_START,
)
from .exceptions import (
    DivergenceError,
    InvalidParameterError,
    ShapeError,
    UndefinedModeError,
)
from .model import AmplitudeState, CascadeParams, SubsystemParams, big_k
from .ode_engine import IntegratorConfig, check_time_grid

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]

FLAG_OK = "ok"
FLAG_FLOOR = "below_floor"
FLAG_REGIME = "regime_violation"

#  Remaining norm at the end of a mode grid for the envelope to be complete
_MODE_TAIL = 1e-8


@dataclass(frozen=True)
class DetectorConfig:
    """Photodetector with quantum efficiency eta and time resolution t_bin"""

    eta: float = 1.0
    t_bin: float = 0.01

    def __post_init__(self) -> None:
        if not 0 <= self.eta <= 1:
            raise InvalidParameterError(f"eta must be in [0, 1], got {self.eta}")
        if not self.t_bin > 0:
            raise InvalidParameterError(f"t_bin must be > 0, got {self.t_bin}")


@dataclass(frozen=True)
class ModeFunction:
    """zeta^2(t) of the radiated photon on a time grid"""

    t_grid: FloatArray
    zeta_sq: FloatArray
    p_rad_inf: float

    def integral(self) -> float:
        return float(trapezoid(self.zeta_sq, self.t_grid))

    def scaled_envelope(self, kappa: float) -> FloatArray:
        """zeta(t) sqrt(p_rad(inf)/kappa), the quantity plotted for the mode"""
        return np.sqrt(self.zeta_sq * self.p_rad_inf / kappa)


@dataclass(frozen=True)
class Reconstruction:
    """Concurrence recovered from the two detector measurements"""

    beta_abs: FloatArray
    delta_abs: FloatArray
    concurrence: FloatArray
    flags: Tuple[str, ...]


def concurrence(state: AmplitudeState) -> float:
    """Concurrence of the two intracavity fields, atoms traced out"""
    return 2 * abs(state.beta) * abs(state.delta_amp)


def concurrence_approx(p: SubsystemParams, t: float) -> float:
    """kappa t sin^2(gt) e^{-(K+Gamma)t/2}, equal subsystems with g >> K, Gamma, Delta"""
    return p.kappa * t * math.sin(p.g * t) ** 2 * math.exp(-(big_k(p) + p.gamma) * t / 2)


def interference_term(state: AmplitudeState, phi: float) -> float:
    """2 Re[beta* delta e^{-i phi}], equals C cos(phi_delta - phi_beta)"""
    return 2 * (state.beta.conjugate() * state.delta_amp * cmath.exp(-1j * phi)).real


def emission_rate(p: CascadeParams, state: AmplitudeState) -> float:
    """<J1^dag J1>, the click rate of an ideal detector

    ka|b|^2 + kb|d|^2 + 2 sqrt(ka kb) Re[b* d e^{-i phi}] as one modulus.
    """
    field = math.sqrt(p.a.kappa) * state.beta + math.sqrt(p.b.kappa) * cmath.exp(
        -1j * p.phi
    ) * state.delta_amp
    return abs(field) ** 2


def channel_rates(p: CascadeParams, state: AmplitudeState) -> Tuple[float, ...]:
    """<J_i^dag J_i> for the five channels, in channel order"""
    return (
        emission_rate(p, state),
        p.a.kappa_loss * abs(state.beta) ** 2,
        p.b.kappa_loss * abs(state.delta_amp) ** 2,
        p.a.gamma * abs(state.alpha) ** 2,
        p.b.gamma * abs(state.gamma_amp) ** 2,
    )


def rate_arrays(p: CascadeParams, arrays: AmplitudeArrays) -> FloatArray:
    """Channel rates on a grid, shape (5, n), rows in channel order"""
    alpha, beta, gamma_amp, delta_amp = arrays
    field = math.sqrt(p.a.kappa) * beta + math.sqrt(p.b.kappa) * cmath.exp(
        -1j * p.phi
    ) * delta_amp
    return np.vstack(
        [
            np.abs(field) ** 2,
            p.a.kappa_loss * np.abs(beta) ** 2,
            p.b.kappa_loss * np.abs(delta_amp) ** 2,
            p.a.gamma * np.abs(alpha) ** 2,
            p.b.gamma * np.abs(gamma_amp) ** 2,
        ]
    )


def emission_rate_series(p: CascadeParams, t_grid: Sequence[float]) -> FloatArray:
    """<J1^dag J1> on a time grid"""
    return rate_arrays(p, general_arrays(p, t_grid))[0]


def _integrate_rate(
    p: CascadeParams, t: float, cfg: IntegratorConfig, channel: int
) -> float:
    """QUADPACK Gauss-Kronrod integral of one channel rate over [0, t]

    [0, t] is pre-split about once per period of the fastest beat between
    the eigen-rates of the two subsystems.
    """
    if t <= 0:
        return 0.0

    def rate(s: float) -> float:
        return float(rate_arrays(p, general_arrays(p, [s]))[channel, 0])

    ov = omega_values(p)
    beat = abs(ov.omega_a.imag) + abs(ov.omega_b.imag) + 2 * abs(ov.lam)
    cycles = t * beat / (2 * math.pi)
    n_pieces = min(QUAD_LIMIT // 4, math.ceil(cycles))
    points = np.linspace(0.0, t, n_pieces + 1)[1:-1] if n_pieces > 1 else None
    result = quad(
        rate,
        0.0,
        t,
        epsabs=min(QUAD_ABS_TOL, 100 * cfg.abs_tol),
        epsrel=cfg.rel_tol,
        limit=QUAD_LIMIT,
        points=points,
        full_output=1,
    )
    if len(result) > 3:
        logger.warning("rate integral over [0, %s] not converged: %s", t, result[3])
    return float(result[0])


def p_rad(p: CascadeParams, t: float, cfg: IntegratorConfig = IntegratorConfig()) -> float:
    """Probability that the photon has been radiated towards the detector by t"""
    if t < 0:
        raise InvalidParameterError(f"t must be >= 0, got {t}")
    return _integrate_rate(p, t, cfg, 0)


def channel_probability(
    p: CascadeParams, channel: int, t: float, cfg: IntegratorConfig = IntegratorConfig()
) -> float:
    """Integrated probability of jump channel 1..5 over [0, t]"""
    if channel not in range(1, 6):
        raise InvalidParameterError(f"channel must be 1..5, got {channel}")
    return _integrate_rate(p, t, cfg, channel - 1)


def emission_cutoff(p: CascadeParams) -> Tuple[float, float]:
    """Time by which the no-jump norm has fallen below NORM_CUTOFF

    Returns (t_cut, remaining norm). Doubles from T_CUT_START.
    """
    if not p.dissipative:
        raise DivergenceError("all dissipation rates are zero, the photon never leaves")
    t_cut = T_CUT_START
    while True:
        residual = amplitudes_general(p, t_cut).norm_squared
        if residual < NORM_CUTOFF:
            return t_cut, residual
        if t_cut >= T_CUT_LIMIT:
            raise DivergenceError(
                f"norm still {residual:.3g} at t={t_cut}, "
                "part of the excitation never decays"
            )
        t_cut *= 2


def p_rad_infty(p: CascadeParams, cfg: IntegratorConfig = IntegratorConfig()) -> float:
    """Total probability that the photon leaves through the monitored output"""
    if not p.dissipative:
        raise DivergenceError("all dissipation rates are zero, the photon never leaves")
    if p.a.kappa == 0 or p.a.g == 0:
        #  cavity A never couples out or atom A never feeds it
        return 0.0
    t_cut, residual = emission_cutoff(p)
    value = p_rad(p, t_cut, cfg)
    logger.debug("p_rad(inf)=%r, t_cut=%s, truncation bound %.3g", value, t_cut, residual)
    return value


def mode_envelope(
    p: CascadeParams,
    t_grid: Sequence[float],
    cfg: IntegratorConfig = IntegratorConfig(),
    window: bool = False,
) -> ModeFunction:
    """zeta^2(t) = <J1^dag J1>(t) / p_rad(inf), normalised over [0, inf)

    With window set the grid is a plotting window, a cut off tail is only
    logged at DEBUG.
    """
    grid = check_time_grid(t_grid, 0.0)
    pinf = p_rad_infty(p, cfg)
    if pinf <= 0:
        raise UndefinedModeError()
    arrays = general_arrays(p, grid)
    tail = sum(abs(amp[-1]) ** 2 for amp in arrays)
    if tail >= _MODE_TAIL:
        logger.log(
            logging.DEBUG if window else logging.WARNING,
            "mode grid ends at t=%s with norm %.3g left, zeta^2 will not integrate to 1",
            grid[-1],
            tail,
        )
    zeta_sq = rate_arrays(p, arrays)[0] / pinf
    return ModeFunction(t_grid=grid, zeta_sq=zeta_sq, p_rad_inf=pinf)


def detection_probability(p: CascadeParams, t: float, det: DetectorConfig) -> float:
    """Click probability in [t - T/2, t + T/2] for the cascaded system"""
    return det.eta * det.t_bin * emission_rate(p, amplitudes_general(p, t))


def single_cavity_detection(p: CascadeParams, t: float, det: DetectorConfig) -> float:
    """Reference measurement with cavity A alone, eta kappa_a T |beta|^2"""
    beta = amplitudes_general(p, t).beta
    return det.eta * p.a.kappa * det.t_bin * abs(beta) ** 2


def reconstruct_concurrence(
    pd_two_cavity: Sequence[float],
    pd_single_cavity: Sequence[float],
    det: DetectorConfig,
    kappa: float,
    floor: float = RECONSTRUCT_FLOOR,
) -> Reconstruction:
    """Concurrence from P_D (both cavities) and P_D' (cavity A alone)

    |beta| = sqrt(P_D'/(eta kappa T)), |delta| = |beta| (1 - sqrt(P_D/P_D')).
    Only the root with |delta| <= |beta| is used, points where it does not
    exist are flagged. Points with P_D' below floor are left undefined.
    """
    pd = np.asarray(pd_two_cavity, dtype=float)
    pd1 = np.asarray(pd_single_cavity, dtype=float)
    if pd.shape != pd1.shape or pd.ndim != 1:
        raise ShapeError(f"series shapes differ: {pd.shape} vs {pd1.shape}")
    if not kappa > 0:
        raise InvalidParameterError(f"kappa must be > 0, got {kappa}")
    scale = det.eta * kappa * det.t_bin
    if not scale > 0:
        raise InvalidParameterError("eta * kappa * t_bin must be > 0")

    n = pd.size
    beta_abs = np.full(n, np.nan)
    delta_abs = np.full(n, np.nan)
    conc = np.full(n, np.nan)
    flags = []
    for i in range(n):
        if not pd1[i] > floor:
            flags.append(FLAG_FLOOR)
            continue
        beta_abs[i] = math.sqrt(pd1[i] / scale)
        x = 1 - math.sqrt(max(pd[i] / pd1[i], 0.0))
        if x < 0:
            flags.append(FLAG_REGIME)
            continue
        delta_abs[i] = beta_abs[i] * x
        conc[i] = min(max(2 * beta_abs[i] * delta_abs[i], 0.0), 1.0)
        flags.append(FLAG_OK)

    n_regime = flags.count(FLAG_REGIME)
    if n_regime:
        logger.warning("%d of %d points outside the strong-coupling branch", n_regime, n)
    return Reconstruction(
        beta_abs=beta_abs, delta_abs=delta_abs, concurrence=conc, flags=tuple(flags)
    )
