#
#  License: MIT
#
#  Part of cascade-sim
#
#  See constants.py for version info
#
#  See the README.md in the repository for more info
#
#  Every command writes fixed file names into the --out directory,
#  together with manifest.json. Nothing time or host dependent goes into
#  any file, so the same command line gives the same bytes.
#

# pylint: disable=C0116

"""Class that runs the cascade-sim command line"""

import logging
import os
import sys
from dataclasses import replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .analytic import amplitude_series, general_arrays
from .config import config_digest, load_config
from .constants import (
    BASIS,
    CHANNEL_NAMES,
    DETECT_HEADER,
    EVOLVE_HEADER,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_USAGE,
    FIGURE_HEADER,
    FIGURE_PARAMS,
    FIGURE_PHI,
    RECONSTRUCT_HEADER,
    __version__,
)
from .exceptions import (
    CascadeSimError,
    ConfigError,
    DivergenceError,
    IntegrationError,
    SamplingError,
    ShapeError,
    UndefinedModeError,
)
from .lindblad import evolve_master
from .model import AmplitudeState, CascadeParams, SubsystemParams
from .observables import (
    DetectorConfig,
    detection_probability,
    mode_envelope,
    reconstruct_concurrence,
    single_cavity_detection,
)
from .ode_engine import integrate
from .trajectories import run_ensemble
from .utils import parse_cmdline, read_series, verify_out_dir, write_csv, write_json

logger = logging.getLogger(__name__)

MANIFEST_FILE = "manifest.json"

#  exceptions that mean the numbers could not be produced
_NUMERICAL = (IntegrationError, DivergenceError, SamplingError, UndefinedModeError)

Row = Sequence[Any]


def figure_params() -> CascadeParams:
    """Equal subsystems with the parameters of both published figures"""
    sub = SubsystemParams(**FIGURE_PARAMS)
    return CascadeParams(a=sub, b=sub, phi=FIGURE_PHI)


def evolve_rows(states: Sequence[AmplitudeState]) -> List[Row]:
    rows = []
    for s in states:
        amps = []
        for z in (s.alpha, s.beta, s.gamma_amp, s.delta_amp):
            amps.extend((z.real, z.imag))
        rows.append([s.t, *amps, *s.probabilities()])
    return rows


def lindblad_rows(t_grid: Sequence[float], rhos: Sequence[np.ndarray]) -> List[Row]:
    """The global phase is not in rho, amplitude columns are nan"""
    nan8 = [float("nan")] * 8
    return [[t, *nan8, *np.real(np.diag(rho))] for t, rho in zip(t_grid, rhos)]


class CascadeSim:
    """Class that runs one cascade-sim command"""

    lib_version: str = __version__

    def __init__(
        self,
        parse_cmd_line: bool = True,
        #
        #  if parse_cmd_line is True argv is ignored and sys.argv is used
        #
        argv: Optional[Sequence[str]] = None,
    ):
        if parse_cmd_line:
            argv = sys.argv[1:]
        self.args = parse_cmdline(list(argv or []))
        self.out_dir = ""
        self.written: List[str] = []
        self.manifest: Dict[str, Any] = {}

    # ================================================================
    #
    #  Entry point
    #
    # ================================================================

    def run(self) -> int:
        """Run the selected command, returns the process exit code"""
        self.setup_logging()
        handler = getattr(self, f"cmd_{self.args.command}")
        try:
            self.out_dir = verify_out_dir(self.args.out)
            handler()
            self.write_manifest()
        except (ConfigError, ShapeError) as error:
            logger.error("%s", error.message)
            return EXIT_USAGE
        except _NUMERICAL as error:
            logger.error("%s", error.message)
            return EXIT_NUMERICAL
        except CascadeSimError as error:
            #  invalid parameters reaching the library through flags
            logger.error("%s", error.message)
            return EXIT_USAGE
        return EXIT_OK

    def setup_logging(self) -> None:
        level = logging.WARNING
        if self.args.verbose == 1:
            level = logging.INFO
        elif self.args.verbose > 1:
            level = logging.DEBUG
        logging.basicConfig(level=level, format="%(levelname)s: %(message)s")

    # ================================================================
    #
    #  Commands
    #
    # ================================================================

    def cmd_evolve(self) -> None:
        p = load_config(self.args.config)
        grid = self.time_grid()
        engine = self.args.engine
        if engine == "analytic":
            rows = evolve_rows(amplitude_series(p, grid))
        elif engine == "ode":
            rows = evolve_rows(integrate(p, grid))
        else:
            rows = lindblad_rows(grid, evolve_master(p, grid))
        self.write_csv("evolve.csv", EVOLVE_HEADER, rows)
        self.manifest.update(
            config_digest=config_digest(p), engine=engine, grid=self.grid_spec(), seed=None
        )

    def cmd_figure(self) -> None:
        p = load_config(self.args.config) if self.args.config else figure_params()
        grid = self.time_grid()
        if self.args.which == "fig2":
            rows = self.fig2_rows(p, grid)
        else:
            rows = self.fig3_rows(p, grid)
        self.write_csv(f"{self.args.which}.csv", FIGURE_HEADER, rows)
        self.manifest.update(
            config_digest=config_digest(p),
            engine="analytic",
            grid=self.grid_spec(),
            seed=None,
        )

    def cmd_trajectories(self) -> None:
        p = load_config(self.args.config)
        summary = run_ensemble(
            p,
            horizon=self.args.horizon,
            n_traj=self.args.n,
            base_seed=self.args.seed,
            bins=self.args.bins,
            threads=self.args.threads,
        )
        frac, stderr = summary.p_rad_estimate()
        counts = {"no_jump": summary.channel_counts[0]}
        counts.update(zip(CHANNEL_NAMES, summary.channel_counts[1:]))
        self.write_json(
            "summary.json",
            {
                "n_traj": summary.n_traj,
                "seed": summary.base_seed,
                "horizon": summary.horizon,
                "channel_counts": counts,
                "p_rad_estimate": frac,
                "p_rad_stderr": stderr,
            },
        )
        edges = summary.bin_edges
        self.write_csv(
            "histogram.csv",
            ("t_lo", "t_hi", "count"),
            zip(edges[:-1], edges[1:], summary.click_histogram),
        )
        self.write_csv(
            "populations.csv",
            ("t",) + tuple(f"prob_{k}" for k in BASIS),
            ([t, *row] for t, row in zip(summary.t_grid, summary.population_series)),
        )
        self.manifest.update(
            config_digest=config_digest(p),
            engine="trajectories",
            grid={"horizon": self.args.horizon, "bins": self.args.bins, "n": self.args.n},
            seed=self.args.seed,
        )

    def cmd_detect(self) -> None:
        p = load_config(self.args.config)
        det = DetectorConfig(eta=self.args.eta, t_bin=self.args.t_bin)
        grid = self.time_grid()
        if self.args.single_cavity:
            name = "detect_single.csv"
            values = [single_cavity_detection(p, t, det) for t in grid]
        else:
            name = "detect.csv"
            values = [detection_probability(p, t, det) for t in grid]
        self.write_csv(name, DETECT_HEADER, zip(grid, values))
        self.manifest.update(
            config_digest=config_digest(p),
            engine="analytic",
            grid=self.grid_spec(),
            seed=None,
            detector={"eta": det.eta, "t_bin": det.t_bin},
        )

    def cmd_reconstruct(self) -> None:
        t_pd, pd = read_series(self.args.pd)
        t_pd1, pd1 = read_series(self.args.pd_prime)
        if len(t_pd) != len(t_pd1) or any(a != b for a, b in zip(t_pd, t_pd1)):
            raise ShapeError("--pd and --pd-prime are not on the same t grid")
        det = DetectorConfig(eta=self.args.eta, t_bin=self.args.t_bin)
        rec = reconstruct_concurrence(pd, pd1, det, self.args.kappa)
        self.write_csv(
            "reconstruct.csv",
            RECONSTRUCT_HEADER,
            zip(t_pd, rec.beta_abs, rec.delta_abs, rec.concurrence, rec.flags),
        )
        self.manifest.update(
            config_digest=None,
            engine="reconstruct",
            grid={"points": len(t_pd)},
            seed=None,
            detector={"eta": det.eta, "t_bin": det.t_bin, "kappa": self.args.kappa},
        )

    # ================================================================
    #
    #  Figure data
    #
    # ================================================================

    @staticmethod
    def fig2_variants(p: CascadeParams) -> List[Tuple[str, CascadeParams]]:
        return [("full", p), ("g_b=0", replace(p, b=replace(p.b, g=0.0)))]

    def fig2_rows(self, p: CascadeParams, grid: np.ndarray) -> List[Row]:
        """2 Re[beta* delta e^{-i phi}] per variant, then -C of the full system"""
        phase = np.exp(-1j * p.phi)
        rows: List[Row] = []
        for variant, q in self.fig2_variants(p):
            _alpha, beta, _gamma, delta = general_arrays(q, grid)
            value = 2 * np.real(np.conj(beta) * delta * phase)
            rows.extend((t, v, variant) for t, v in zip(grid, value))
        _alpha, beta, _gamma, delta = general_arrays(p, grid)
        minus_c = -2 * np.abs(beta) * np.abs(delta)
        rows.extend((t, v, "minus_concurrence") for t, v in zip(grid, minus_c))
        return rows

    @staticmethod
    def fig3_variants(p: CascadeParams) -> List[Tuple[str, CascadeParams]]:
        no_cavity_b = replace(p.b, kappa=0.0, kappa_loss=0.0)
        return [
            ("full", p),
            ("g_b=0", replace(p, b=replace(p.b, g=0.0))),
            ("K_b=0", replace(p, b=no_cavity_b)),
        ]

    def fig3_rows(self, p: CascadeParams, grid: np.ndarray) -> List[Row]:
        """zeta(t) sqrt(p_rad(inf)/kappa) per variant"""
        rows: List[Row] = []
        for variant, q in self.fig3_variants(p):
            mode = mode_envelope(q, grid, window=True)
            value = mode.scaled_envelope(p.a.kappa)
            rows.extend((t, v, variant) for t, v in zip(grid, value))
        return rows

    # ================================================================
    #
    #  Output
    #
    # ================================================================

    def time_grid(self) -> np.ndarray:
        return np.linspace(0.0, self.args.t_max, self.args.steps)

    def grid_spec(self) -> Dict[str, Any]:
        return {"t_max": self.args.t_max, "steps": self.args.steps}

    def out_path(self, name: str) -> str:
        self.written.append(name)
        return os.path.join(self.out_dir, name)

    def write_csv(self, name: str, header: Sequence[str], rows) -> None:
        path = self.out_path(name)
        logger.info("Writing %s to %s", name, path)
        write_csv(path, header, rows)

    def write_json(self, name: str, obj: Dict[str, Any]) -> None:
        path = self.out_path(name)
        logger.info("Writing %s to %s", name, path)
        write_json(path, obj)

    def write_manifest(self) -> None:
        """RunManifest of this run, lists the files written before it"""
        manifest = {
            "command": self.args.command,
            "version": self.lib_version,
            "files": sorted(self.written),
        }
        manifest.update(self.manifest)
        write_json(os.path.join(self.out_dir, MANIFEST_FILE), manifest)
