import numpy as np
import pytest

from urllc_evt.interference import SimConfig, generate_trace

# default link and traffic parameters at a mid-range mean INR
BASE = SimConfig(num_interferers=5, activation_factor=0.4, message_duration=10,
                   filter_length=100, mean_inr_db=0.0, mean_snr_db=20.0, seed=2024)


@pytest.fixture(scope="session")
def base_config():
    return BASE


@pytest.fixture(scope="session")
def base_training():
    """1000-sample training trace, the default training length."""
    return generate_trace(BASE, 1000).values


@pytest.fixture(scope="session")
def long_trace():
    """2e5 slots: first half for training, second half held out."""
    return generate_trace(BASE.with_(seed=77), 200_000).values


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import VERDICTS

    if VERDICTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(VERDICTS):
            terminalreporter.write_line(VERDICTS[n])
