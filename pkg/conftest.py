import logging

import numpy as np
import pytest

from photon_lab.numerics import random_stream

#: seed shared by all randomized tests
TEST_SEED = 20240601


def pytest_addoption(parser):
    parser.addoption(
        "--photon-lab-log-level",
        default="warning",
        choices=("debug", "info", "warning", "error", "critical"),
        help="log level of the photon_lab loggers",
    )


def pytest_configure(config):
    level = config.getoption("photon_lab_log_level")
    logging.getLogger("photon_lab").setLevel(level.upper())


@pytest.fixture
def rng() -> np.random.Generator:
    """A fresh PCG64 stream with the fixed test seed."""
    return random_stream(TEST_SEED)
