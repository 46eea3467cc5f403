"""Shared fixtures: seeded RNGs and one-way layout problem builders."""

from __future__ import annotations

import numpy as np
import pytest

from specglht.glht import GlhtProblem
from specglht.simlab import TestSpec, make_design

# a library dataclass whose name happens to start with "Test"; tell pytest
# it is not a test container
TestSpec.__test__ = False

# one line per acceptance check, replayed after the run summary so the
# measured values survive stdout capture of passing tests
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance scorecard")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def one_way():
    """Factory for a one-way layout problem with optional coefficient matrix
    and covariance square root applied to the noise."""

    def build(p, group_sizes, seed=0, B=None, sigma_half=None):
        rng = np.random.default_rng(seed)
        k = len(group_sizes)
        X, C = make_design(k, group_sizes)
        N = sum(group_sizes)
        Z = rng.standard_normal((p, N))
        noise = Z if sigma_half is None else np.asarray(sigma_half) @ Z
        Y = noise if B is None else np.asarray(B) @ X + noise
        return GlhtProblem(Y, X, C)

    return build
