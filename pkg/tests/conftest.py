import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import settings, strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from minkval import bodies, convex_hull  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=40, derandomize=True)
settings.load_profile("default")

seeds = st.integers(min_value=0, max_value=2**32 - 1)

_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)


def random_body(seed: int, n: int = 3, shifted: bool = False):
    rng = np.random.default_rng(seed)
    shift = bodies.random_shift(rng, n) if shifted else None
    return bodies.random_polytope(rng, n, shift=shift)


def centered(K):
    return convex_hull(K.vertices - K.vertices.mean(axis=0))
