import sys
from pathlib import Path

import numpy as np
import pytest

from digishear import PROFILES, build_isotropic_system_2d, build_system_2d, build_system_3d

ROOT = Path(__file__).resolve().parents[1]
sys.path.insert(0, str(ROOT / "tools"))


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(scope="session")
def sl2d1_64():
    return build_system_2d((64, 64), PROFILES["SL2D_1"])


@pytest.fixture(scope="session")
def sl2d2_64():
    return build_system_2d((64, 64), PROFILES["SL2D_2"])


@pytest.fixture(scope="session")
def iso_64():
    return build_isotropic_system_2d((64, 64), 4)


@pytest.fixture(scope="session")
def sl3d1_16():
    return build_system_3d((16, 16, 16), PROFILES["SL3D_1"])


ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])
