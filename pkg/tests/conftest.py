import math
import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mhd_wavekit import FluidState, GasLaw  # noqa: E402

GAMMAS = (1.4, 5.0 / 3.0, 2.0)


def random_state(rng, v_range=(0.1, 10.0), b_range=(0.01, 5.0), u_scale=1.0):
    v = 10 ** rng.uniform(math.log10(v_range[0]), math.log10(v_range[1]))
    mag = 10 ** rng.uniform(math.log10(b_range[0]), math.log10(b_range[1]))
    th = rng.uniform(0.0, 2.0 * math.pi)
    u = rng.uniform(-u_scale, u_scale, 3)
    return FluidState(v, mag * math.cos(th), mag * math.sin(th), *u)


def random_law(rng, beta_range=(0.1, 3.0)):
    return GasLaw(float(rng.choice(GAMMAS)), rng.uniform(*beta_range))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def law53():
    return GasLaw(5.0 / 3.0, 1.0)


@pytest.fixture
def left53():
    return FluidState(1.0, 0.5, 0.0, 0.0, 0.0, 0.0)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
