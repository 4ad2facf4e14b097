import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from barabanov import (
    BarabanovResult,
    IterationConfig,
    MatrixPair,
    angular_function,
    compute_barabanov,
    regular_polygon,
    run,
)
from barabanov.config import PRESETS, PairSpec
from barabanov.polygon import validate

# fixed example sequence so every run checks the same cases
settings.register_profile(
    "repo", derandomize=True, deadline=None, suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much]
)
settings.load_profile("repo")

TOL = 1e-8
STEPS = 10_000
CASES = ("case1", "case2", "case3")
ALL_PRESETS = ("eqM1-mycase", *CASES)


def preset_pair(name: str) -> MatrixPair:
    return PairSpec.from_doc({"preset": name}).build()


def assert_valid(poly):
    problems = validate(poly)
    assert not problems, problems


def fixed_result(poly=None, rho: float = 1.0) -> BarabanovResult:
    """A hand-made converged result around a known polygon."""
    poly = poly if poly is not None else regular_polygon(64)
    return BarabanovResult(poly, rho, rho, 0, 0.0, True)


@pytest.fixture(scope="session")
def pairs():
    return {name: preset_pair(name) for name in PRESETS}


@pytest.fixture(scope="session")
def norms(pairs):
    cfg = IterationConfig(tol=TOL)
    return {name: compute_barabanov(pair, cfg) for name, pair in pairs.items()}


@pytest.fixture(scope="session")
def trajectories(pairs, norms):
    return {name: run(pairs[name], norms[name], n=STEPS) for name in pairs}


@pytest.fixture(scope="session")
def profiles(pairs, norms):
    out = {}
    for name in CASES:
        out[name] = angular_function(pairs[name], norms[name], rotation_iterations=20_000)
    out["eqM1-mycase"] = angular_function(
        pairs["eqM1-mycase"], norms["eqM1-mycase"], domain=(0.0, 0.5 * math.pi), rotation_iterations=20_000
    )
    return out


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
