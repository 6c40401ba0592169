from __future__ import annotations

import warnings

import numpy as np
import pytest

from vpbwaves.eos_riemann import EndStates, ThermoState, forward_end_state
from vpbwaves.wave_profiles import build_composite

# one line per acceptance criterion, printed at the end of the session
ACCEPTANCE_LINES: dict[int, str] = {}

# total strength 0.1: left rest state, right state on the pattern's wave curves
STABILITY_LEFT = ThermoState(1.0, 0.0, 1.0)
STABILITY_RIGHT = ThermoState(1.0, 0.082458, 1.056575)


def pytest_configure(config):
    warnings.filterwarnings("ignore", message=".*TBB.*")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])


@pytest.fixture(scope="session")
def moderate_ends() -> EndStates:
    left = ThermoState(1.0, 0.0, 1.0)
    right, _ = forward_end_state(left, 1.05, 1.1, 1.0)
    return EndStates(left, right)


@pytest.fixture(scope="session")
def moderate_wave(moderate_ends):
    return build_composite(moderate_ends)


@pytest.fixture(scope="session")
def stability_ends() -> EndStates:
    return EndStates(STABILITY_LEFT, STABILITY_RIGHT)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
