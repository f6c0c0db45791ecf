#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See the README.md in the repository for more info
#
#  Quantum-jump unraveling with a single excitation: every trajectory
#  jumps at most once, into |e>. The jump time is drawn by inverting the
#  no-jump norm, which is the same for every trajectory, so one dense
#  ODE solution serves the whole ensemble.
#
#  Trajectory i always uses the generator seeded with
#  seed_i = SeedSequence(base_seed, spawn_key=(i,)), so results do not
#  depend on how the work is split across threads.
#

"""Monte Carlo wave function sampling of jump times and channels"""

import logging
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import numpy.typing as npt

from .constants import BINS_DEFAULT, BISECT_MAX_ITER, BISECT_XTOL, ENV_THREADS
from .exceptions import InvalidParameterError, SamplingError, SpanError
from .model import CascadeParams, OperatorMatrix5, build_jump_operators
from .ode_engine import DenseSolution, IntegratorConfig, check_time_grid, solve_dense

logger = logging.getLogger(__name__)

FloatArray = npt.NDArray[np.float64]
IntArray = npt.NDArray[np.int64]

#  channel code used in the raw arrays for "no jump within horizon"
NO_JUMP = 0


@dataclass(frozen=True)
class TrajectoryRecord:
    """Outcome of one trajectory, jump_time and channel are None without a jump"""

    jump_time: Optional[float]
    channel: Optional[int]
    seed: int

    def __post_init__(self) -> None:
        if (self.jump_time is None) != (self.channel is None):
            raise InvalidParameterError("channel must be given exactly when jump_time is")
        if self.channel is not None and self.channel not in range(1, 6):
            raise InvalidParameterError(f"channel must be 1..5, got {self.channel}")


@dataclass(frozen=True)
class EnsembleSummary:
    """Aggregated ensemble

    channel_counts[0] is the no-jump count, [1..5] the jump channels.
    population_series has one row per t_grid time, columns in basis order.
    """

    n_traj: int
    horizon: float
    base_seed: int
    channel_counts: Tuple[int, ...]
    click_histogram: IntArray
    bin_edges: FloatArray
    t_grid: FloatArray
    population_series: FloatArray

    def p_rad_estimate(self) -> Tuple[float, float]:
        """Channel-1 fraction and its binomial standard error"""
        frac = self.channel_counts[1] / self.n_traj
        return frac, math.sqrt(frac * (1 - frac) / self.n_traj)

    def channel_fractions(self) -> Tuple[float, ...]:
        return tuple(c / self.n_traj for c in self.channel_counts)


def trajectory_seed(base_seed: int, index: int) -> int:
    """64-bit seed of trajectory index, derived from base_seed by counter"""
    if base_seed < 0 or index < 0:
        raise InvalidParameterError("seeds and trajectory indices must be >= 0")
    seq = np.random.SeedSequence(base_seed, spawn_key=(index,))
    return int(seq.generate_state(1, dtype=np.uint64)[0])


def worker_count(requested: Optional[int] = None) -> int:
    """Threads to use, from requested or CASCADE_SIM_THREADS, 0 means all cores"""
    if requested is None:
        raw = os.environ.get(ENV_THREADS, "0").strip() or "0"
        try:
            requested = int(raw)
        except ValueError as exc:
            raise InvalidParameterError(
                f"{ENV_THREADS} must be an integer, got {raw!r}"
            ) from exc
    if requested < 0:
        raise InvalidParameterError(f"thread count must be >= 0, got {requested}")
    if requested == 0:
        return os.cpu_count() or 1
    return requested


def _draws(seeds: Sequence[int]) -> Tuple[FloatArray, FloatArray]:
    """(u, v) per seed, u in (0, 1) for the jump time, v in [0, 1) for the channel"""
    u = np.empty(len(seeds))
    v = np.empty(len(seeds))
    for i, seed in enumerate(seeds):
        rng = np.random.Generator(np.random.Philox(seed))
        ui = rng.random()
        while ui == 0.0:
            ui = rng.random()
        u[i] = ui
        v[i] = rng.random()
    return u, v


def _bisect_jump_times(dense: DenseSolution, u: FloatArray) -> FloatArray:
    """Smallest t with norm(t) <= u, for every u at once

    Caller guarantees norm(t_start) > u >= norm(t_end). Returns the upper
    end of the final bracket, so every time lies in (t_start, t_end].
    """
    lo = np.full(u.shape, dense.t_start)
    hi = np.full(u.shape, dense.t_end)
    xtol = BISECT_XTOL * max(1.0, dense.t_end)
    for _ in range(BISECT_MAX_ITER):
        if np.all(hi - lo <= xtol):
            return hi
        mid = 0.5 * (lo + hi)
        above = dense.norm_squared(mid) > u
        lo = np.where(above, mid, lo)
        hi = np.where(above, hi, mid)
    raise SamplingError(
        f"jump time bisection not converged after {BISECT_MAX_ITER} iterations"
    )


def _pick_channels(
    dense: DenseSolution, jumps: List[OperatorMatrix5], t: FloatArray, v: FloatArray
) -> IntArray:
    """Channel i with probability |J_i psi|^2 / sum_j |J_j psi|^2 at each t"""
    kets = np.vstack([dense.amplitudes(t).reshape(4, -1), np.zeros((1, t.size))])
    weights = np.array([np.sum(np.abs(j @ kets) ** 2, axis=0) for j in jumps])
    cumulative = np.cumsum(weights, axis=0)
    total = cumulative[-1]
    if np.any(total <= 0):
        raise SamplingError("all jump rates vanish at a sampled jump time")
    return np.argmax(v * total < cumulative, axis=0).astype(np.int64) + 1


def _sample_block(
    dense: DenseSolution, jumps: List[OperatorMatrix5], seeds: Sequence[int]
) -> Tuple[FloatArray, IntArray]:
    """Jump times (nan for none) and channels (NO_JUMP for none) of seeds"""
    u, v = _draws(seeds)
    times = np.full(u.shape, np.nan)
    channels = np.full(u.shape, NO_JUMP, dtype=np.int64)
    jumped = dense.norm_squared(np.array([dense.t_end])) <= u
    if np.any(jumped):
        t_jump = _bisect_jump_times(dense, u[jumped])
        times[jumped] = t_jump
        channels[jumped] = _pick_channels(dense, jumps, t_jump, v[jumped])
    return times, channels


def _check_horizon(horizon: float) -> None:
    if not horizon > 0 or not math.isfinite(horizon):
        raise InvalidParameterError(f"horizon must be > 0, got {horizon}")


def _records(
    times: FloatArray, channels: IntArray, seeds: Sequence[int]
) -> List[TrajectoryRecord]:
    out = []
    for t, ch, seed in zip(times, channels, seeds):
        if ch == NO_JUMP:
            out.append(TrajectoryRecord(jump_time=None, channel=None, seed=seed))
        else:
            out.append(TrajectoryRecord(jump_time=float(t), channel=int(ch), seed=seed))
    return out


def sample_trajectory(
    p: CascadeParams,
    horizon: float,
    seed: int,
    cfg: IntegratorConfig = IntegratorConfig(dense_output=True),
) -> TrajectoryRecord:
    """One trajectory from the generator seeded with seed"""
    _check_horizon(horizon)
    dense = solve_dense(p, horizon, cfg=cfg)
    times, channels = _sample_block(dense, build_jump_operators(p), [seed])
    return _records(times, channels, [seed])[0]


def _sample_all(
    dense: DenseSolution,
    jumps: List[OperatorMatrix5],
    seeds: List[int],
    threads: int,
) -> Tuple[FloatArray, IntArray]:
    n_chunks = max(1, min(threads, len(seeds)))
    bounds = np.linspace(0, len(seeds), n_chunks + 1).astype(int)
    chunks = [seeds[lo:hi] for lo, hi in zip(bounds[:-1], bounds[1:])]
    if n_chunks == 1:
        parts = [_sample_block(dense, jumps, chunks[0])]
    else:
        with ThreadPoolExecutor(max_workers=n_chunks) as pool:
            #  map() keeps chunk order, so the concatenation is schedule independent
            parts = list(pool.map(lambda c: _sample_block(dense, jumps, c), chunks))
    return (
        np.concatenate([t for t, _ in parts]),
        np.concatenate([c for _, c in parts]),
    )


def _ensemble(
    p: CascadeParams,
    horizon: float,
    n_traj: int,
    base_seed: int,
    threads: Optional[int],
    cfg: IntegratorConfig,
) -> Tuple[DenseSolution, List[int], FloatArray, IntArray]:
    _check_horizon(horizon)
    if n_traj < 1:
        raise InvalidParameterError(f"n_traj must be >= 1, got {n_traj}")
    n_threads = worker_count(threads)
    logger.debug(
        "ensemble: %d trajectories, horizon %s, %d threads", n_traj, horizon, n_threads
    )
    seeds = [trajectory_seed(base_seed, i) for i in range(n_traj)]
    dense = solve_dense(p, horizon, cfg=cfg)
    times, channels = _sample_all(dense, build_jump_operators(p), seeds, n_threads)
    return dense, seeds, times, channels


def sample_ensemble(
    p: CascadeParams,
    horizon: float,
    n_traj: int,
    base_seed: int,
    threads: Optional[int] = None,
    cfg: IntegratorConfig = IntegratorConfig(dense_output=True),
) -> List[TrajectoryRecord]:
    """Per-trajectory records, trajectory i seeded by trajectory_seed(base_seed, i)"""
    _dense, seeds, times, channels = _ensemble(p, horizon, n_traj, base_seed, threads, cfg)
    return _records(times, channels, seeds)


def _population_series(
    dense: DenseSolution, grid: FloatArray, times: FloatArray
) -> FloatArray:
    """Empirical mean occupation of a..e at each grid time

    A trajectory still waiting at t sits in the normalised no-jump state,
    one that has jumped sits in |e>.
    """
    n = times.size
    jumped_at = np.sort(times[~np.isnan(times)])
    alive = 1.0 - np.searchsorted(jumped_at, grid, side="right") / n

    weights = np.abs(dense.amplitudes(grid).reshape(4, -1)) ** 2
    norm = np.sum(weights, axis=0)
    shares = np.divide(weights, norm, out=np.zeros_like(weights), where=norm > 0)

    pops = np.empty((grid.size, 5))
    pops[:, :4] = (alive * shares).T
    pops[:, 4] = 1.0 - alive
    return pops


def run_ensemble(
    p: CascadeParams,
    horizon: float,
    n_traj: int,
    base_seed: int,
    t_grid: Optional[Sequence[float]] = None,
    bins: int = BINS_DEFAULT,
    threads: Optional[int] = None,
    cfg: IntegratorConfig = IntegratorConfig(dense_output=True),
) -> EnsembleSummary:
    """Sample n_traj trajectories and aggregate them

    t_grid defaults to the histogram bin edges and must lie in [0, horizon].
    """
    _check_horizon(horizon)
    if bins < 1:
        raise InvalidParameterError(f"bins must be >= 1, got {bins}")
    edges = np.linspace(0.0, horizon, bins + 1)
    grid = edges.copy() if t_grid is None else check_time_grid(t_grid, 0.0)
    if grid[-1] > horizon:
        raise SpanError(f"t_grid ends at {grid[-1]}, after horizon {horizon}")

    dense, _seeds, times, channels = _ensemble(p, horizon, n_traj, base_seed, threads, cfg)
    counts = np.bincount(channels, minlength=6)
    hist, _ = np.histogram(times[channels == 1], bins=edges)
    summary = EnsembleSummary(
        n_traj=n_traj,
        horizon=float(horizon),
        base_seed=base_seed,
        channel_counts=tuple(int(c) for c in counts),
        click_histogram=hist.astype(np.int64),
        bin_edges=edges,
        t_grid=grid,
        population_series=_population_series(dense, grid, times),
    )
    logger.debug("channel counts %s", summary.channel_counts)
    return summary
