from __future__ import annotations

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parents[1]))


def pytest_addoption(parser):
    parser.addoption("--run-slow", action="store_true", default=False, help="run Monte Carlo reproductions")


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long Monte Carlo reproduction")


def pytest_collection_modifyitems(config, items):
    if config.getoption("--run-slow"):
        return
    skip_slow = pytest.mark.skip(reason="needs --run-slow")
    for item in items:
        if "slow" in item.keywords:
            item.add_marker(skip_slow)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def unit_grid():
    return np.linspace(0.0, 1.0, 51)
