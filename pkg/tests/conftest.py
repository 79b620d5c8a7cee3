"""
Pytest configuration and fixtures for switchgrade tests.

Session fixtures hold the expensive objects (lambda, the polar-table norm)
so each is computed once no matter how many tests lean on it.
"""

import pytest
from dotenv import load_dotenv
from pathlib import Path

import numpy as np


# Load environment variables
@pytest.fixture(scope="session", autouse=True)
def load_test_env():
    """Load environment variables once for all tests."""
    env_path = Path(__file__).parent.parent / ".env"
    if env_path.exists():
        load_dotenv(env_path)
    yield


@pytest.fixture(scope="session")
def lam():
    """The growth rate of the rotating pair."""
    from switchgrade.catalog import rotation_lambda
    return rotation_lambda()


@pytest.fixture(scope="session")
def sys_A():
    from switchgrade.catalog import system_A
    return system_A()


@pytest.fixture(scope="session")
def sys_B(lam):
    from switchgrade.catalog import system_B
    return system_B()


@pytest.fixture(scope="session")
def sys_B0(lam):
    from switchgrade.catalog import system_B0
    return system_B0()


@pytest.fixture(scope="session")
def sys_X(lam):
    from switchgrade.catalog import system_X
    return system_X()


@pytest.fixture(scope="session")
def norm_B(sys_B):
    from switchgrade.barabanov import norm_B_build
    return norm_B_build(sys_B)


@pytest.fixture
def smooth_laws():
    """Three smooth A-laws (1 - alpha, alpha) for the discretization tests."""
    from switchgrade.models import MeasurableLaw
    return [
        MeasurableLaw.from_alpha(lambda t: 0.5 + 0.5 * np.sin(3 * t), label='sine'),
        MeasurableLaw.from_alpha(lambda t: np.asarray(t) ** 2 / 4.0, label='quadratic'),
        MeasurableLaw.from_alpha(lambda t: 1.0 / (1.0 + np.exp(-4 * (np.asarray(t) - 1))), label='logistic'),
    ]


@pytest.fixture
def schedule_file(tmp_path):
    """Factory writing a schedule JSON file and returning its path."""
    def _write(text: str, name: str = 'schedule.json'):
        path = tmp_path / name
        path.write_text(text, encoding='utf-8')
        return path
    return _write


# Pytest configuration
def pytest_configure(config):
    """Configure pytest with custom markers."""
    config.addinivalue_line(
        "markers", "integration: mark test as driving the command line end to end"
    )
    config.addinivalue_line(
        "markers", "acceptance: mark test as reproducing a headline result"
    )
    config.addinivalue_line(
        "markers", "slow: mark test as slow running"
    )


def pytest_collection_modifyitems(config, items):
    """Modify test collection to add markers automatically."""
    for item in items:
        # Everything in test_cli.py goes through argparse and the JSON writer
        if "test_cli" in item.nodeid:
            item.add_marker(pytest.mark.integration)
