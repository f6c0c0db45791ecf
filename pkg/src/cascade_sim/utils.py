#  -*- mode: python; mode: fold -*-
#
#  License: MIT
#
#  Part of cascade-sim
#
#  See constants.py for version info
#
#  See the README.md in the repository for more info
#

"""Common stuff, command line parsing and output files"""

import argparse
import csv
import json
import math
import numbers
import os
from typing import Any, Dict, Iterable, List, Sequence, Tuple

from .constants import (
    BINS_DEFAULT,
    FIGURE_PARAMS,
    FIGURE_STEPS,
    FIGURE_T_MAX,
    HORIZON_DEFAULT,
    __version__,
)
from .exceptions import ConfigError, ShapeError


def fmt_float(value: float) -> str:
    """Shortest decimal that reads back as the same double"""
    return repr(float(value))


def _positive_float(text: str) -> float:
    value = float(text)
    if not value > 0 or not math.isfinite(value):
        raise argparse.ArgumentTypeError(f"must be > 0, got {text}")
    return value


def _unit_float(text: str) -> float:
    value = float(text)
    if not 0 <= value <= 1:
        raise argparse.ArgumentTypeError(f"must be in [0, 1], got {text}")
    return value


def _int_at_least(minimum: int):
    def check(text: str) -> int:
        value = int(text)
        if value < minimum:
            raise argparse.ArgumentTypeError(f"must be >= {minimum}, got {text}")
        return value

    return check


def _add_grid(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--t-max",
        type=_positive_float,
        default=FIGURE_T_MAX,
        help=f"End of the time grid, units 1/K. Default {FIGURE_T_MAX}",
    )
    parser.add_argument(
        "--steps",
        type=_int_at_least(2),
        default=FIGURE_STEPS,
        help=f"Number of grid points including both ends. Default {FIGURE_STEPS}",
    )


def _add_detector(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--eta", type=_unit_float, default=1.0, help="Detector quantum efficiency"
    )
    parser.add_argument(
        "--t-bin", type=_positive_float, default=0.01, help="Detector time resolution T"
    )


def _add_out(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--out", default=".", help="Output directory, created if needed. Default ."
    )


def parse_cmdline(args):
    """Parse command line options"""

    parser = argparse.ArgumentParser(
        prog="cascade-sim",
        description="Single photon emission from two cascaded atom-cavity systems: "
        + "amplitudes, entanglement, mode function and quantum-jump ensembles.",
    )

    #  Prints cascade-sim version info then exits
    parser.add_argument(
        "-V",
        "--version",
        action="version",
        version=f"%(prog)s {__version__}",
    )

    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="-v logs progress, -vv also solver details",
    )

    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("evolve", help="Amplitudes and populations on a time grid")
    p.add_argument("config", help="JSON parameter file")
    p.add_argument(
        "--engine",
        choices=["analytic", "ode", "lindblad"],
        default="analytic",
        help="Closed form, adaptive ODE or master equation. Default analytic",
    )
    _add_grid(p)
    _add_out(p)

    p = sub.add_parser("figure", help="Data of the interference and mode figures")
    p.add_argument("--which", choices=["fig2", "fig3"], required=True)
    p.add_argument(
        "--config", default="", help="Override the built in figure parameters"
    )
    _add_grid(p)
    _add_out(p)

    p = sub.add_parser("trajectories", help="Quantum-jump Monte Carlo ensemble")
    p.add_argument("config", help="JSON parameter file")
    p.add_argument("--n", type=_int_at_least(1), default=1000, help="Trajectories")
    p.add_argument("--seed", type=_int_at_least(0), default=0, help="Base seed")
    p.add_argument(
        "--horizon",
        type=_positive_float,
        default=HORIZON_DEFAULT,
        help=f"Simulated time span. Default {HORIZON_DEFAULT}",
    )
    p.add_argument(
        "--bins",
        type=_int_at_least(1),
        default=BINS_DEFAULT,
        help=f"Click histogram bins. Default {BINS_DEFAULT}",
    )
    p.add_argument(
        "--threads",
        type=_int_at_least(0),
        default=None,
        help="Worker threads, 0 = all cores. Default from CASCADE_SIM_THREADS",
    )
    _add_out(p)

    p = sub.add_parser("detect", help="Detector click probability P_D(t)")
    p.add_argument("config", help="JSON parameter file")
    p.add_argument(
        "--single-cavity",
        action="store_true",
        help="Reference measurement P_D' with cavity A alone",
    )
    _add_grid(p)
    _add_detector(p)
    _add_out(p)

    p = sub.add_parser("reconstruct", help="Concurrence from two detector series")
    p.add_argument("--pd", required=True, help="CSV t,p_d with both cavities")
    p.add_argument("--pd-prime", required=True, help="CSV t,p_d with cavity A alone")
    p.add_argument(
        "--kappa",
        type=_positive_float,
        default=FIGURE_PARAMS["kappa"],
        help=f"Cavity output rate kappa. Default {FIGURE_PARAMS['kappa']}",
    )
    _add_detector(p)
    _add_out(p)

    return parser.parse_args(args)


def verify_out_dir(out_dir: str) -> str:
    """Create out_dir if needed, return it as a full path"""
    if not out_dir:
        raise ConfigError("--out: empty output directory")
    out_dir = os.path.abspath(os.path.expanduser(out_dir))
    try:
        os.makedirs(out_dir, exist_ok=True)
    except OSError as error:
        raise ConfigError(f"--out: cannot create {out_dir}: {error.strerror}") from error
    return out_dir


def _cell(value: Any) -> str:
    if isinstance(value, str):
        return value
    if isinstance(value, numbers.Integral) and not isinstance(value, bool):
        return str(value)
    return fmt_float(value)


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Header row then rows, floats in shortest round-trip form, \\n line ends"""
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(v) for v in row])


def write_json(path: str, obj: Dict[str, Any]) -> None:
    with open(path, "w", encoding="utf-8") as f:
        f.write(json.dumps(obj, sort_keys=True, indent=2) + "\n")


def read_series(path: str) -> Tuple[List[float], List[float]]:
    """(t, value) from a two column CSV with a t column, e.g. detect output"""
    try:
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as error:
        raise ConfigError(f"<file>: cannot read {path}: {error.strerror}") from error
    if not rows or len(rows[0]) != 2 or rows[0][0] != "t":
        raise ShapeError(f"{path}: expected a header 't,<value>'")
    t_col, v_col = [], []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 2:
            raise ShapeError(f"{path}:{lineno}: expected 2 columns, got {len(row)}")
        try:
            t_col.append(float(row[0]))
            v_col.append(float(row[1]))
        except ValueError as error:
            raise ShapeError(f"{path}:{lineno}: {error}") from error
    return t_col, v_col
