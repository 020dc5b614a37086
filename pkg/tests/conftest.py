import numpy as np
import pytest


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance: end-to-end acceptance gate; the basin checks run for minutes"
    )
    config.addinivalue_line("markers", "slow: takes more than about a minute")


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
