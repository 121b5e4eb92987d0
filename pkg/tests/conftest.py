"""Shared fixtures and the acceptance-criteria reporting hook."""

import math

import numpy as np
import pytest

from gspear import OperatorSpec, euclidean, lp_space

ACCEPTANCE_RESULTS = []


def record_criterion(num: int, desc: str, passed: bool, detail: str = ""):
    ACCEPTANCE_RESULTS.append((num, desc, bool(passed), detail))
    assert passed, f"criterion {num} ({desc}) failed: {detail}"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for num, desc, passed, detail in sorted(ACCEPTANCE_RESULTS):
        status = "PASS" if passed else "FAIL"
        line = f"criterion {num:2d} [{status}] {desc}"
        if detail:
            line += f" ({detail})"
        terminalreporter.write_line(line)


@pytest.fixture
def l1_2():
    return lp_space(1, 2)


@pytest.fixture
def l2_2():
    return euclidean(2)


@pytest.fixture
def l2_3():
    return euclidean(3)


@pytest.fixture
def linf_2():
    return lp_space(math.inf, 2)


@pytest.fixture
def example_G(l1_2):
    """The rank-one coordinate projection on l1^2: a relative spear, not a spear."""
    return OperatorSpec([[1.0, 0.0], [0.0, 0.0]], l1_2, l1_2)


def random_instance(space, seed, normalize_G=True):
    """A seeded (G, T) pair on the given square space."""
    from gspear import normalize

    rng = np.random.default_rng(seed)
    n = space.dim
    G = OperatorSpec(rng.standard_normal((n, n)), space, space)
    if normalize_G:
        G = normalize(G)
    T = OperatorSpec(rng.standard_normal((n, n)), space, space)
    return G, T
