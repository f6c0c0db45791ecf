#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See the README.md in the repository for more info
#

"""Adaptive integration of the no-jump amplitude equations"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Union

import numpy as np
import numpy.typing as npt
from scipy.integrate import OdeSolution, solve_ivp
from scipy.optimize import OptimizeResult

from .constants import ABS_TOL_DEFAULT, ABS_TOL_MAX, REL_TOL_DEFAULT, REL_TOL_MAX
from .exceptions import IntegrationError, InvalidParameterError, SpanError
from .model import AmplitudeState, CascadeParams, big_k, initial_state

logger = logging.getLogger(__name__)

ComplexVector = npt.NDArray[np.complex128]
TimeLike = Union[float, npt.NDArray[np.float64]]

#  Dormand-Prince 5(4), carries complex y natively
_METHOD = "RK45"


@dataclass(frozen=True)
class IntegratorConfig:
    """Tolerances shared by every adaptive integration in the package"""

    rel_tol: float = REL_TOL_DEFAULT
    abs_tol: float = ABS_TOL_DEFAULT
    max_step: float = math.inf
    dense_output: bool = False

    def __post_init__(self) -> None:
        if not 0 < self.rel_tol <= REL_TOL_MAX:
            raise InvalidParameterError(f"rel_tol must be in (0, {REL_TOL_MAX}]")
        if not 0 < self.abs_tol <= ABS_TOL_MAX:
            raise InvalidParameterError(f"abs_tol must be in (0, {ABS_TOL_MAX}]")
        if not self.max_step > 0:
            raise InvalidParameterError("max_step must be > 0")


def amplitude_rhs(p: CascadeParams) -> Callable[[float, ComplexVector], ComplexVector]:
    """Right-hand side of the four coupled amplitude equations"""
    da = complex(p.a.delta, -p.a.gamma / 2)
    db = complex(p.b.delta, -p.b.gamma / 2)
    ga = p.a.g
    gb = p.b.g
    half_ka = big_k(p.a) / 2
    half_kb = big_k(p.b) / 2
    drive = p.cascade_coupling

    def rhs(_t: float, y: ComplexVector) -> ComplexVector:
        alpha, beta, gamma, delta = y
        return np.array(
            [
                -1j * da * alpha - 1j * ga * beta,
                -1j * ga * alpha - half_ka * beta,
                -1j * db * gamma - 1j * gb * delta,
                -1j * gb * gamma - half_kb * delta - drive * beta,
            ],
            dtype=np.complex128,
        )

    return rhs


def run_solver(
    rhs: Callable[[float, ComplexVector], ComplexVector],
    t_span: Sequence[float],
    y0: ComplexVector,
    cfg: IntegratorConfig,
    t_eval: Optional[npt.NDArray[np.float64]] = None,
    dense_output: bool = False,
) -> OptimizeResult:
    """solve_ivp with the package tolerances, failures become IntegrationError"""
    sol = solve_ivp(
        rhs,
        t_span=(float(t_span[0]), float(t_span[1])),
        y0=y0,
        method=_METHOD,
        t_eval=t_eval,
        dense_output=dense_output,
        rtol=cfg.rel_tol,
        atol=cfg.abs_tol,
        max_step=cfg.max_step,
    )
    if sol.status < 0:
        t_reached = float(sol.t[-1]) if len(sol.t) else float(t_span[0])
        raise IntegrationError(
            f"integration failed at t={t_reached}: {sol.message}", t_reached=t_reached
        )
    logger.debug("%s: %d rhs evaluations over %s", _METHOD, sol.nfev, t_span)
    return sol


def check_time_grid(t_grid: Sequence[float], t0: float) -> npt.NDArray[np.float64]:
    grid = np.asarray(t_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0:
        raise InvalidParameterError("t_grid must be a non-empty 1-d sequence")
    if np.any(np.diff(grid) < 0):
        raise InvalidParameterError("t_grid must be ascending")
    if grid[0] < t0:
        raise InvalidParameterError(f"t_grid starts at {grid[0]} before init.t={t0}")
    return grid


def integrate(
    p: CascadeParams,
    t_grid: Sequence[float],
    init: Optional[AmplitudeState] = None,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> List[AmplitudeState]:
    """Amplitudes at every grid time, starting from init (default |a>)"""
    if init is None:
        init = initial_state()
    grid = check_time_grid(t_grid, init.t)
    t_end = float(grid[-1])
    if t_end == init.t:
        return [init for _ in grid]
    sol = run_solver(amplitude_rhs(p), (init.t, t_end), init.as_vector(), cfg, t_eval=grid)
    return [AmplitudeState.from_vector(t, sol.y[:, i]) for i, t in enumerate(sol.t)]


@dataclass(frozen=True)
class DenseSolution:
    """Continuous no-jump solution over [t_start, t_end], read only"""

    t_start: float
    t_end: float
    interpolant: OdeSolution

    def _check(self, t: TimeLike) -> None:
        lo = np.min(t)
        hi = np.max(t)
        if lo < self.t_start or hi > self.t_end:
            raise SpanError(
                f"t in [{lo}, {hi}] outside integrated span "
                f"[{self.t_start}, {self.t_end}]"
            )

    def amplitudes(self, t: TimeLike) -> ComplexVector:
        """shape (4,) for scalar t, (4, n) for an array"""
        self._check(t)
        return self.interpolant(t)

    def norm_squared(self, t: TimeLike) -> npt.NDArray[np.float64]:
        amps = self.amplitudes(t)
        return np.sum(amps.real**2 + amps.imag**2, axis=0)

    def state(self, t: float) -> AmplitudeState:
        return AmplitudeState.from_vector(t, self.amplitudes(t))


def solve_dense(
    p: CascadeParams,
    t_end: float,
    init: Optional[AmplitudeState] = None,
    cfg: IntegratorConfig = IntegratorConfig(dense_output=True),
) -> DenseSolution:
    """Integrate once and keep the interpolant, used by the jump sampler"""
    if init is None:
        init = initial_state()
    if not t_end > init.t:
        raise InvalidParameterError(f"t_end={t_end} must be after init.t={init.t}")
    sol = run_solver(
        amplitude_rhs(p), (init.t, t_end), init.as_vector(), cfg, dense_output=True
    )
    return DenseSolution(t_start=init.t, t_end=float(t_end), interpolant=sol.sol)


def norm_squared_at(dense_solution: DenseSolution, t: float) -> float:
    """<psi|psi>(t) of the unnormalised no-jump state"""
    return float(dense_solution.norm_squared(float(t)))
