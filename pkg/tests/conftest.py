import numpy as np
import pytest

from thinscale import DistributionSpec, sample_weights


@pytest.fixture
def gaussian():
    return DistributionSpec("gaussian")


@pytest.fixture
def field_5x5(gaussian):
    return sample_weights(gaussian, 5, 5, 11)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
