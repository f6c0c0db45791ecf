#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See the README.md in the repository for more info
#
#  Direct master-equation evolution of the 5x5 density matrix. Shares
#  operators with model.py and the integrator settings with ode_engine.py,
#  so it is an independent route to the same populations.
#

"""Lindblad master equation on the one-excitation manifold"""

import logging
from typing import List, Optional, Sequence

import numpy as np
import numpy.typing as npt

from .constants import IDX_A
from .exceptions import InvalidParameterError
from .model import CascadeParams, build_hamiltonian, build_jump_operators
from .ode_engine import IntegratorConfig, check_time_grid, run_solver

logger = logging.getLogger(__name__)

DensityMatrix5 = npt.NDArray[np.complex128]

_DIM = 5
_SIZE = _DIM * _DIM


def pure_density(label_index: int = IDX_A) -> DensityMatrix5:
    """|k><k|, default the initial state |a><a|"""
    rho = np.zeros((_DIM, _DIM), dtype=np.complex128)
    rho[label_index, label_index] = 1.0
    return rho


def check_density_matrix(rho: DensityMatrix5, tol: float = 1e-10) -> None:
    """Hermitian, unit trace, no eigenvalue below -tol"""
    rho = np.asarray(rho)
    if rho.shape != (_DIM, _DIM):
        raise InvalidParameterError(f"density matrix must be 5x5, got {rho.shape}")
    if np.max(np.abs(rho - rho.conj().T)) > tol:
        raise InvalidParameterError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1) > tol:
        raise InvalidParameterError(f"density matrix trace is {np.trace(rho).real}")
    if np.min(np.linalg.eigvalsh(rho)) < -tol:
        raise InvalidParameterError("density matrix has negative eigenvalues")


class _Generator:
    """Precomputed pieces of the Lindblad generator for one parameter set"""

    def __init__(self, p: CascadeParams):
        self.h = build_hamiltonian(p)
        self.jumps = build_jump_operators(p)
        self.jumps_dag = [j.conj().T for j in self.jumps]
        self.decay = sum(jd @ j for jd, j in zip(self.jumps_dag, self.jumps))

    def apply(self, rho: DensityMatrix5) -> DensityMatrix5:
        drho = -1j * (self.h @ rho - rho @ self.h)
        for j, jd in zip(self.jumps, self.jumps_dag):
            drho += j @ rho @ jd
        drho -= 0.5 * (self.decay @ rho + rho @ self.decay)
        return drho

    def channel_rates(self, rho: DensityMatrix5) -> npt.NDArray[np.float64]:
        """Tr(J_i rho J_i^dag) for i = 1..5"""
        return np.array(
            [np.trace(j @ rho @ jd).real for j, jd in zip(self.jumps, self.jumps_dag)]
        )


def lindblad_rhs(p: CascadeParams, rho: DensityMatrix5) -> DensityMatrix5:
    """-i[H, rho] + sum_i (J rho J^dag - {J^dag J, rho}/2)"""
    return _Generator(p).apply(np.asarray(rho, dtype=np.complex128))


def _symmetrised(rho: DensityMatrix5) -> DensityMatrix5:
    return 0.5 * (rho + rho.conj().T)


def evolve_master(
    p: CascadeParams,
    t_grid: Sequence[float],
    rho0: Optional[DensityMatrix5] = None,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> List[DensityMatrix5]:
    """Density matrices at the grid times, rho0 defaults to |a><a|

    Hermiticity is restored on every returned matrix.
    """
    if rho0 is None:
        rho0 = pure_density()
    check_density_matrix(rho0)
    grid = check_time_grid(t_grid, 0.0)
    rho0 = np.asarray(rho0, dtype=np.complex128)
    if grid[-1] == 0.0:
        return [rho0.copy() for _ in grid]

    gen = _Generator(p)

    def rhs(_t: float, y: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
        return gen.apply(y.reshape(_DIM, _DIM)).ravel()

    sol = run_solver(rhs, (0.0, float(grid[-1])), rho0.ravel(), cfg, t_eval=grid)
    return [_symmetrised(sol.y[:, i].reshape(_DIM, _DIM)) for i in range(sol.y.shape[1])]


def channel_yields(
    p: CascadeParams,
    t_end: float,
    rho0: Optional[DensityMatrix5] = None,
    cfg: IntegratorConfig = IntegratorConfig(),
) -> npt.NDArray[np.float64]:
    """Probability that each jump channel 1..5 has fired by t_end

    The master equation is carried together with five accumulators
    dY_i/dt = Tr(J_i rho J_i^dag).
    """
    if rho0 is None:
        rho0 = pure_density()
    check_density_matrix(rho0)
    if not t_end > 0:
        raise InvalidParameterError(f"t_end must be > 0, got {t_end}")
    gen = _Generator(p)

    def rhs(_t: float, y: npt.NDArray[np.complex128]) -> npt.NDArray[np.complex128]:
        rho = y[:_SIZE].reshape(_DIM, _DIM)
        out = np.empty_like(y)
        out[:_SIZE] = gen.apply(rho).ravel()
        out[_SIZE:] = gen.channel_rates(rho)
        return out

    y0 = np.concatenate([np.asarray(rho0, dtype=np.complex128).ravel(), np.zeros(5)])
    sol = run_solver(rhs, (0.0, float(t_end)), y0, cfg)
    yields = sol.y[_SIZE:, -1].real
    logger.debug("channel yields at t=%s: %s", t_end, yields)
    return yields


def populations(rho: DensityMatrix5) -> npt.NDArray[np.float64]:
    """Diagonal of rho in basis order"""
    return np.real(np.diag(rho)).copy()
