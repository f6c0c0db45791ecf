#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See the README.md in the repository for more info
#
#  Closed-form no-jump amplitudes for the initial state |a>.
#
#  Every product of a growing and a decaying exponential is evaluated as a
#  single exponential of the combined exponent, through _exp_difference().
#  The eigen-rates s +- Omega/2 of each subsystem have non-positive real
#  part, so no intermediate value can overflow, whatever t is.
#
#  The *_arrays functions take a 1-d array of times, the public scalar
#  functions wrap them.
#

"""Closed-form amplitudes, general and equal-parameter cases"""

import cmath
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .constants import CRITICAL_OMEGA_FLOOR, DEGENERACY_THRESHOLD
from .exceptions import InvalidParameterError
from .model import AmplitudeState, CascadeParams, SubsystemParams, big_k

FloatArray = npt.NDArray[np.float64]
ComplexArray = npt.NDArray[np.complex128]
AmplitudeArrays = Tuple[ComplexArray, ComplexArray, ComplexArray, ComplexArray]

#  |x| below which the equal-parameter brackets switch to their series
_SERIES_X = 0.1


@dataclass(frozen=True)
class OmegaValues:
    """Characteristic rates of the cascaded pair"""

    omega_a: complex
    omega_b: complex
    upsilon: float
    lam: float


def omega(p: SubsystemParams) -> complex:
    """Principal root of K^2/4 - 4g^2 - iK(D - iG/2) - (D - iG/2)^2

    Results built on it are invariant under Omega -> -Omega.
    """
    k = big_k(p)
    d = complex(p.delta, -p.gamma / 2)
    return cmath.sqrt(k * k / 4 - 4 * p.g * p.g - 1j * k * d - d * d)


def omega_values(p: CascadeParams) -> OmegaValues:
    return OmegaValues(
        omega_a=omega(p.a),
        omega_b=omega(p.b),
        upsilon=(big_k(p.a) - big_k(p.b) + p.a.gamma - p.b.gamma) / 4,
        lam=(p.a.delta - p.b.delta) / 2,
    )


def _decay_rate(p: SubsystemParams) -> complex:
    """s = -(K + Gamma)/4 - i Delta/2, centre of the two eigen-rates"""
    return complex(-(big_k(p) + p.gamma) / 4, -p.delta / 2)


def _exp_difference(x: complex, y: complex, t: FloatArray, scale: float) -> ComplexArray:
    """(e^{xt} - e^{yt}) / (x - y)

    Equals e^{yt} (e^{dt} - 1)/d with d = x - y, the g/h building block.
    A vanishing d (equal subsystems) falls back to the series
    t (1 + dt/2 + (dt)^2/6).
    """
    d = x - y
    dt = d * t
    if abs(d) < DEGENERACY_THRESHOLD * scale:
        return np.exp(y * t) * t * (1 + dt / 2 + dt * dt / 6)
    out = np.empty(t.shape, dtype=np.complex128)
    small = np.abs(dt) < 1.0
    out[small] = np.exp(y * t[small]) * np.expm1(dt[small]) / d
    big = ~small
    out[big] = (np.exp(x * t[big]) - np.exp(y * t[big])) / d
    return out


def _subsystem_arrays(
    p: SubsystemParams, t: FloatArray
) -> Tuple[ComplexArray, ComplexArray]:
    """alpha, beta of the source subsystem, which evolves on its own"""
    s = _decay_rate(p)
    om = omega(p)
    lam_p = s + om / 2
    lam_m = s - om / 2
    cosh_part = (np.exp(lam_p * t) + np.exp(lam_m * t)) / 2
    #  sinh(Omega t/2) e^{st} / Omega, finite at Omega = 0
    sinh_part = _exp_difference(lam_p, lam_m, t, max(1.0, abs(om))) / 2
    q = complex(big_k(p) / 2 - p.gamma / 2, -p.delta)
    return q * sinh_part + cosh_part, -2j * p.g * sinh_part


def _lifted(om: complex, scale: float) -> complex:
    """Critical damping has Omega = 0, where f+- is 0/0, lift it off zero"""
    floor = CRITICAL_OMEGA_FLOOR * scale
    if abs(om) < floor:
        return complex(floor, 0.0)
    return om


def _times(t_grid: Sequence[float]) -> FloatArray:
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if t.ndim != 1:
        raise InvalidParameterError("times must be a 1-d sequence")
    if np.any(t < 0):
        raise InvalidParameterError(f"t must be >= 0, got min {t.min()}")
    return t


def general_arrays(p: CascadeParams, t_grid: Sequence[float]) -> AmplitudeArrays:
    """alpha, beta, gamma, delta on a time grid, arbitrary a/b parameters

    Equal subsystems go through equal_arrays(), exact at critical damping.
    """
    if p.a == p.b:
        return equal_arrays(p.a, p.phi, t_grid)
    t = _times(t_grid)
    alpha, beta = _subsystem_arrays(p.a, t)

    c = p.cascade_coupling
    if c == 0 or p.a.g == 0:
        #  nothing ever reaches subsystem b
        zero = np.zeros(t.shape, dtype=np.complex128)
        return alpha, beta, zero, zero.copy()

    ov = omega_values(p)
    scale = max(1.0, abs(ov.omega_a), abs(ov.omega_b))
    om_a = _lifted(ov.omega_a, scale)
    om_b = _lifted(ov.omega_b, scale)
    s_a = _decay_rate(p.a)
    s_b = _decay_rate(p.b)
    lam_p = s_a + om_a / 2
    lam_m = s_a - om_a / 2
    mu_p = s_b + om_b / 2
    mu_m = s_b - om_b / 2

    #  e^{mu+ t} [g_-(t) + h_+(t)]  and  e^{mu- t} [g_+(t) + h_-(t)]
    fg_p = _exp_difference(lam_p, mu_p, t, scale) - _exp_difference(lam_m, mu_p, t, scale)
    fg_m = _exp_difference(lam_p, mu_m, t, scale) - _exp_difference(lam_m, mu_m, t, scale)

    #  f+- without its exponential
    pref = p.a.g * c / (om_a * om_b)
    gamma_amp = p.b.g * pref * (fg_p - fg_m)

    w = complex((big_k(p.b) - p.b.gamma) / 4, -p.b.delta / 2)
    delta_amp = 1j * pref * ((w + om_b / 2) * fg_m - (w - om_b / 2) * fg_p)
    return alpha, beta, gamma_amp, delta_amp


def _equal_brackets(
    om: complex, s: complex, t: FloatArray
) -> Tuple[ComplexArray, ComplexArray]:
    """(x cosh x - sinh x)/x^3 e^{st} and sinh(x)/x e^{st}, x = Omega t/2

    Both are even in x, so the branch of Omega does not matter.
    """
    x = om * t / 2
    cubic = np.empty(t.shape, dtype=np.complex128)
    sinhc = np.empty(t.shape, dtype=np.complex128)

    near = np.abs(x) < _SERIES_X
    x2 = x[near] ** 2
    decay = np.exp(s * t[near])
    cubic[near] = (1 / 3 + x2 / 30 + x2**2 / 840 + x2**3 / 45360) * decay
    sinhc[near] = (1 + x2 / 6 + x2**2 / 120 + x2**3 / 5040) * decay

    far = ~near
    xf = x[far]
    e_p = np.exp((s + om / 2) * t[far])
    e_m = np.exp((s - om / 2) * t[far])
    ch = (e_p + e_m) / 2
    sh = (e_p - e_m) / 2
    cubic[far] = (xf * ch - sh) / xf**3
    sinhc[far] = sh / xf
    return cubic, sinhc


def equal_arrays(
    p: SubsystemParams, phi: float, t_grid: Sequence[float]
) -> AmplitudeArrays:
    """Both subsystems share p, gamma and delta in their simplified form"""
    t = _times(t_grid)
    alpha, beta = _subsystem_arrays(p, t)
    if p.kappa == 0 or p.g == 0:
        zero = np.zeros(t.shape, dtype=np.complex128)
        return alpha, beta, zero, zero.copy()

    cubic, sinhc = _equal_brackets(omega(p), _decay_rate(p), t)
    phase = cmath.exp(1j * phi)
    q = complex((big_k(p) - p.gamma) / 2, -p.delta)
    gamma_amp = p.kappa * p.g**2 * phase * t**3 * cubic / 2
    delta_amp = 1j * p.kappa * p.g * phase * (t * t * sinhc / 2 - q * t**3 * cubic / 4)
    return alpha, beta, gamma_amp, delta_amp


def _states(t: Sequence[float], arrays: AmplitudeArrays) -> List[AmplitudeState]:
    alpha, beta, gamma_amp, delta_amp = arrays
    return [
        AmplitudeState(
            t=float(ti),
            alpha=complex(alpha[i]),
            beta=complex(beta[i]),
            gamma_amp=complex(gamma_amp[i]),
            delta_amp=complex(delta_amp[i]),
        )
        for i, ti in enumerate(np.atleast_1d(np.asarray(t, dtype=float)))
    ]


def amplitudes_general(p: CascadeParams, t: float) -> AmplitudeState:
    """alpha, beta, gamma, delta at time t for arbitrary a/b parameters"""
    return _states([t], general_arrays(p, [t]))[0]


def amplitudes_equal(p: SubsystemParams, phi: float, t: float) -> AmplitudeState:
    """Equal subsystems, caller guarantees a == b == p"""
    return _states([t], equal_arrays(p, phi, [t]))[0]


def amplitude_series(p: CascadeParams, t_grid: Sequence[float]) -> List[AmplitudeState]:
    return _states(t_grid, general_arrays(p, t_grid))
