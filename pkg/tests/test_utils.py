import math

import pytest
from src.cascade_sim import utils
from src.cascade_sim.constants import FIGURE_STEPS, FIGURE_T_MAX, HORIZON_DEFAULT
from src.cascade_sim.exceptions import ConfigError, ShapeError

from .utils_test import read_csv


@pytest.mark.parametrize(
    "test_input,expected",
    [
        (0.1, "0.1"),
        (1, "1.0"),
        (1e-300, "1e-300"),
        (-0.0, "-0.0"),
        (math.nan, "nan"),
    ],
)
def test_utils_fmt_float(test_input, expected):
    assert utils.fmt_float(test_input) == expected


def test_utils_parse_evolve_defaults():
    args = utils.parse_cmdline(["evolve", "p.json"])
    assert args.command == "evolve"
    assert args.config == "p.json"
    assert args.engine == "analytic"
    assert args.t_max == FIGURE_T_MAX
    assert args.steps == FIGURE_STEPS
    assert args.out == "."
    assert args.verbose == 0


@pytest.mark.parametrize(
    "test_input,expected",
    [
        (["-v"], 1),
        (["-vv"], 2),
        (["--verbose", "-v"], 2),
    ],
)
def test_utils_parse_verbose(test_input, expected):
    args = utils.parse_cmdline(test_input + ["figure", "--which", "fig2"])
    assert args.verbose == expected


def test_utils_parse_trajectories():
    args = utils.parse_cmdline(
        ["trajectories", "p.json", "--n", "50", "--seed", "7", "--threads", "0"]
    )
    assert (args.n, args.seed, args.threads) == (50, 7, 0)
    assert args.horizon == HORIZON_DEFAULT
    assert utils.parse_cmdline(["trajectories", "p.json"]).threads is None


def test_utils_parse_detect():
    args = utils.parse_cmdline(
        ["detect", "p.json", "--single-cavity", "--eta", "0.5", "--t-bin", "0.02"]
    )
    assert args.single_cavity is True
    assert (args.eta, args.t_bin) == (0.5, 0.02)


def test_utils_parse_reconstruct():
    args = utils.parse_cmdline(["reconstruct", "--pd", "a.csv", "--pd-prime", "b.csv"])
    assert (args.pd, args.pd_prime, args.kappa) == ("a.csv", "b.csv", 0.9)


@pytest.mark.parametrize(
    "test_input",
    [
        [],
        ["evolve"],
        ["evolve", "p.json", "--engine", "euler"],
        ["evolve", "p.json", "--steps", "1"],
        ["evolve", "p.json", "--t-max", "0"],
        ["figure", "--which", "fig4"],
        ["figure"],
        ["trajectories", "p.json", "--n", "0"],
        ["trajectories", "p.json", "--seed", "-1"],
        ["detect", "p.json", "--eta", "1.5"],
        ["reconstruct", "--pd", "a.csv"],
    ],
)
def test_utils_parse_rejects(test_input):
    with pytest.raises(SystemExit) as excinfo:
        utils.parse_cmdline(test_input)
    assert excinfo.value.code == 2


def test_utils_verify_out_dir(tmp_path):
    target = tmp_path / "new" / "dir"
    assert utils.verify_out_dir(str(target)) == str(target)
    assert target.is_dir()
    with pytest.raises(ConfigError):
        utils.verify_out_dir("")


def test_utils_verify_out_dir_is_file(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x", encoding="utf-8")
    with pytest.raises(ConfigError):
        utils.verify_out_dir(str(blocker / "sub"))


def test_utils_write_csv(tmp_path):
    path = tmp_path / "out.csv"
    rows = [(0.0, 0.25, "full"), (1, 1e-20, "x")]
    utils.write_csv(str(path), ("t", "value", "variant"), rows)
    assert path.read_bytes() == b"t,value,variant\n0.0,0.25,full\n1,1e-20,x\n"


def test_utils_write_json(tmp_path):
    path = tmp_path / "out.json"
    utils.write_json(str(path), {"b": 1, "a": [1, 2]})
    expected = '{\n  "a": [\n    1,\n    2\n  ],\n  "b": 1\n}\n'
    assert path.read_text(encoding="utf-8") == expected


def test_utils_read_series(tmp_path):
    path = tmp_path / "series.csv"
    utils.write_csv(str(path), ("t", "p_d"), [(0.0, 0.0), (0.5, 1.25e-3)])
    assert utils.read_series(str(path)) == ([0.0, 0.5], [0.0, 1.25e-3])
    header, rows = read_csv(path)
    assert header == ["t", "p_d"] and len(rows) == 2


@pytest.mark.parametrize(
    "content",
    [
        "",
        "time,p_d\n0,1\n",
        "t,p_d,extra\n0,1,2\n",
        "t,p_d\n0,1\n1\n",
        "t,p_d\n0,abc\n",
    ],
)
def test_utils_read_series_rejects(tmp_path, content):
    path = tmp_path / "series.csv"
    path.write_text(content, encoding="utf-8")
    with pytest.raises(ShapeError):
        utils.read_series(str(path))


def test_utils_read_series_missing(tmp_path):
    with pytest.raises(ConfigError):
        utils.read_series(str(tmp_path / "absent.csv"))
