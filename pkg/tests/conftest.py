"""
Test module
"""

import pytest

from src.cascade_sim.constants import ENV_THREADS

from .utils_test import fig_params, write_config


@pytest.fixture
def fig_config(tmp_path):
    return write_config(tmp_path / "fig.json", fig_params())


@pytest.fixture
def single_thread(monkeypatch):
    with monkeypatch.context() as m:
        m.setenv(ENV_THREADS, "1")
        yield
