#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See the README.md in the repository for more info
#
#  All rates are in units of a reference rate K_ref, times in 1/K_ref,
#  hbar = 1. Basis order is fixed to (a, b, c, d, e), see constants.py
#

"""Parameter and state types, Hamiltonian and jump operators"""

import cmath
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Tuple

import numpy as np
import numpy.typing as npt

from .constants import (
    BASIS,
    IDX_A,
    IDX_B,
    IDX_C,
    IDX_D,
    IDX_E,
    NORM_SLACK,
    TWO_PI,
)
from .exceptions import InvalidParameterError

OperatorMatrix5 = npt.NDArray[np.complex128]

_RATE_FIELDS = ("g", "kappa", "kappa_loss", "gamma")


@dataclass(frozen=True)
class SubsystemParams:
    """One atom-cavity subsystem

    g           atom-cavity coupling
    kappa       cavity output rate (towards the detector)
    kappa_loss  mirror absorption/scattering rate
    gamma       spontaneous emission rate
    delta       detuning, any sign
    """

    g: float = 0.0
    kappa: float = 0.0
    kappa_loss: float = 0.0
    gamma: float = 0.0
    delta: float = 0.0

    def __post_init__(self) -> None:
        for name in _RATE_FIELDS + ("delta",):
            value = getattr(self, name)
            if not math.isfinite(value):
                raise InvalidParameterError(f"{name} must be finite, got {value}")
        for name in _RATE_FIELDS:
            if getattr(self, name) < 0:
                raise InvalidParameterError(
                    f"{name} must be >= 0, got {getattr(self, name)}"
                )

    @property
    def big_k(self) -> float:
        return big_k(self)

    @property
    def dissipative(self) -> bool:
        """True if any channel can remove the excitation"""
        return self.big_k > 0 or self.gamma > 0


@dataclass(frozen=True)
class CascadeParams:
    """Source subsystem a cascaded into target subsystem b"""

    a: SubsystemParams = field(default_factory=SubsystemParams)
    b: SubsystemParams = field(default_factory=SubsystemParams)
    phi: float = 0.0

    def __post_init__(self) -> None:
        if not math.isfinite(self.phi):
            raise InvalidParameterError(f"phi must be finite, got {self.phi}")
        #  frozen, so bypass __setattr__ for the reduction to [0, 2pi)
        phi = math.fmod(self.phi, TWO_PI) % TWO_PI
        if phi >= TWO_PI:
            phi = 0.0
        object.__setattr__(self, "phi", phi)

    @property
    def cascade_coupling(self) -> complex:
        """sqrt(kappa_a kappa_b) e^{i phi}, the b -> d drive of the no-jump evolution"""
        return math.sqrt(self.a.kappa * self.b.kappa) * cmath.exp(1j * self.phi)

    @property
    def dissipative(self) -> bool:
        return self.a.dissipative or self.b.dissipative

    def as_dict(self) -> Dict[str, Any]:
        return {
            "a": _subsystem_dict(self.a),
            "b": _subsystem_dict(self.b),
            "phi": self.phi,
        }


def _subsystem_dict(p: SubsystemParams) -> Dict[str, float]:
    return {
        "g": p.g,
        "kappa": p.kappa,
        "kappa_loss": p.kappa_loss,
        "gamma": p.gamma,
        "delta": p.delta,
    }


@dataclass(frozen=True)
class AmplitudeState:
    """No-jump amplitudes of |a>, |b>, |c>, |d> at time t

    |e> is implicit, its weight is the norm lost so far.
    """

    t: float
    alpha: complex
    beta: complex = 0j
    gamma_amp: complex = 0j
    delta_amp: complex = 0j

    def __post_init__(self) -> None:
        n2 = self.norm_squared
        if not n2 <= 1.0 + NORM_SLACK:
            raise InvalidParameterError(f"state norm^2 {n2} exceeds 1 at t={self.t}")

    @property
    def norm_squared(self) -> float:
        return (
            abs(self.alpha) ** 2
            + abs(self.beta) ** 2
            + abs(self.gamma_amp) ** 2
            + abs(self.delta_amp) ** 2
        )

    def as_vector(self) -> npt.NDArray[np.complex128]:
        """4 amplitudes in basis order"""
        return np.array(
            [self.alpha, self.beta, self.gamma_amp, self.delta_amp], dtype=np.complex128
        )

    def as_ket(self) -> npt.NDArray[np.complex128]:
        """5 component ket, zero weight on |e>"""
        return np.append(self.as_vector(), 0j)

    def probabilities(self) -> Tuple[float, float, float, float, float]:
        """Populations of a, b, c, d and e of the mixed state"""
        pa = abs(self.alpha) ** 2
        pb = abs(self.beta) ** 2
        pc = abs(self.gamma_amp) ** 2
        pd = abs(self.delta_amp) ** 2
        return pa, pb, pc, pd, 1.0 - (pa + pb + pc + pd)

    @classmethod
    def from_vector(cls, t: float, vec) -> "AmplitudeState":
        return cls(
            t=float(t),
            alpha=complex(vec[0]),
            beta=complex(vec[1]),
            gamma_amp=complex(vec[2]),
            delta_amp=complex(vec[3]),
        )


def initial_state(t: float = 0.0) -> AmplitudeState:
    """Atom A excited, everything else empty"""
    return AmplitudeState(t=t, alpha=1 + 0j)


def basis_projector(label: str) -> OperatorMatrix5:
    """|k><k| for k in a..e"""
    try:
        idx = BASIS.index(label)
    except ValueError as exc:
        raise InvalidParameterError(f"unknown basis label: {label}") from exc
    proj = np.zeros((5, 5), dtype=np.complex128)
    proj[idx, idx] = 1.0
    return proj


def big_k(p: SubsystemParams) -> float:
    """Total cavity decay K = kappa + kappa'"""
    return p.kappa + p.kappa_loss


def build_hamiltonian(p: CascadeParams) -> OperatorMatrix5:
    """H_A + H_B + cascade term, restricted to the one-excitation manifold"""
    h = np.zeros((5, 5), dtype=np.complex128)
    h[IDX_A, IDX_A] = p.a.delta
    h[IDX_A, IDX_B] = h[IDX_B, IDX_A] = p.a.g
    h[IDX_C, IDX_C] = p.b.delta
    h[IDX_C, IDX_D] = h[IDX_D, IDX_C] = p.b.g

    #  i sqrt(ka kb)/2 (e^{-i phi} b a^dag - e^{i phi} b^dag a)
    half = math.sqrt(p.a.kappa * p.b.kappa) / 2
    h[IDX_B, IDX_D] = 1j * half * cmath.exp(-1j * p.phi)
    h[IDX_D, IDX_B] = -1j * half * cmath.exp(1j * p.phi)
    return h


def build_jump_operators(p: CascadeParams) -> List[OperatorMatrix5]:
    """J1..J5, every one maps into span{|e>}

    J1 emission by both cavities, J2/J3 mirror losses,
    J4/J5 spontaneous emission.
    """
    jumps = [np.zeros((5, 5), dtype=np.complex128) for _ in range(5)]
    jumps[0][IDX_E, IDX_B] = math.sqrt(p.a.kappa)
    jumps[0][IDX_E, IDX_D] = math.sqrt(p.b.kappa) * cmath.exp(-1j * p.phi)
    jumps[1][IDX_E, IDX_B] = math.sqrt(p.a.kappa_loss)
    jumps[2][IDX_E, IDX_D] = math.sqrt(p.b.kappa_loss)
    jumps[3][IDX_E, IDX_A] = math.sqrt(p.a.gamma)
    jumps[4][IDX_E, IDX_C] = math.sqrt(p.b.gamma)
    return jumps


def effective_hamiltonian(p: CascadeParams) -> OperatorMatrix5:
    """H - (i/2) sum J^dag J, written out in closed form

    The cascade makes it one-directional: b drives d, d never feeds back.
    """
    h = build_hamiltonian(p)
    h[IDX_A, IDX_A] -= 0.5j * p.a.gamma
    h[IDX_B, IDX_B] -= 0.5j * big_k(p.a)
    h[IDX_C, IDX_C] -= 0.5j * p.b.gamma
    h[IDX_D, IDX_D] -= 0.5j * big_k(p.b)
    h[IDX_D, IDX_B] = -1j * p.cascade_coupling
    h[IDX_B, IDX_D] = 0j
    return h
