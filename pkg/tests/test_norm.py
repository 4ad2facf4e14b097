import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from barabanov.linalg import MatrixPair, make_rotation_pair, rotation
from barabanov.norm import (
    IterationConfig,
    NonConvergenceError,
    Scheme,
    all_words,
    barabanov_operator,
    barabanov_residual,
    brute_force_bounds,
    compute_barabanov,
    max_word_spectral_radius,
    ratio_bounds,
)
from barabanov.polygon import DegenerateBallError, hausdorff, new_polygon, regular_polygon

from conftest import ALL_PRESETS, TOL, assert_valid, preset_pair

RHO_EQM1 = 1.098668
SQUARE = new_polygon([(1, 1), (-1, 1)])
DISC = regular_polygon(64)


def diag_pair(a, b):
    return MatrixPair.raw(np.diag(a), np.diag(b))


def test_operator_on_equal_rotations_keeps_the_disc(rng):
    pair = MatrixPair.raw(rotation(0.3), rotation(0.3))
    image = barabanov_operator(pair, DISC)
    assert_valid(image)
    x = rng.normal(size=(200, 2))
    np.testing.assert_allclose(image.gauge(x), DISC.gauge(x), rtol=1e-3)


def test_operator_on_doubling_pair_halves_the_square():
    image = barabanov_operator(diag_pair([2, 2], [2, 2]), SQUARE)
    assert {tuple(v) for v in image.vertices.tolist()} == {(0.5, 0.5), (-0.5, 0.5), (-0.5, -0.5), (0.5, -0.5)}


def test_operator_matches_max_of_gauges(rng):
    pair = preset_pair("eqM1-mycase")
    image = barabanov_operator(pair, SQUARE)
    assert_valid(image)
    x = rng.normal(size=(50, 2))
    expected = np.maximum(SQUARE.gauge(x @ pair.a0.T), SQUARE.gauge(x @ pair.a1.T))
    np.testing.assert_allclose(image.gauge(x), expected, rtol=1e-12)


def test_ratio_bounds_examples(norms):
    lo, hi = ratio_bounds(MatrixPair.raw(rotation(0.3), rotation(0.3)), new_polygon([(2, 0.1), (0.3, 1)]))
    assert lo <= 1.0 <= hi
    lo, hi = ratio_bounds(diag_pair([2, 2], [1, 1]), DISC)
    assert lo == pytest.approx(2.0, rel=1e-14) and hi == pytest.approx(2.0, rel=1e-14)
    lo, hi = ratio_bounds(preset_pair("eqM1-mycase"), norms["eqM1-mycase"].polygon)
    assert abs(lo - RHO_EQM1) <= 1e-4 and abs(hi - RHO_EQM1) <= 1e-4


def test_eq_m1_brackets_the_reference_value():
    res = compute_barabanov(preset_pair("eqM1-mycase"), IterationConfig(tol=1e-3))
    assert res.converged
    assert res.rho_lower <= RHO_EQM1 <= res.rho_upper
    assert res.gap <= 1e-3
    assert_valid(res.polygon)


def test_pure_rotation_gives_a_disc():
    res = compute_barabanov(make_rotation_pair(0.3, 0.3, 1.0), IterationConfig(tol=1e-3))
    assert res.converged
    assert 1 - 1e-3 <= res.rho_lower <= 1.0 <= res.rho_upper <= 1 + 1e-3
    assert hausdorff(res.polygon, regular_polygon(512)) <= 1e-2


def test_homogeneity_is_exact_for_power_of_two():
    pair = preset_pair("case1")
    base = compute_barabanov(pair, IterationConfig(tol=1e-6))
    scaled = compute_barabanov(pair.scaled(2.0), IterationConfig(tol=2e-6))
    assert scaled.iterations == base.iterations
    assert scaled.rho_lower == 2 * base.rho_lower
    assert scaled.rho_upper == 2 * base.rho_upper


@settings(max_examples=8)
@given(st.floats(0.2, 5.0))
def test_homogeneity_for_any_positive_factor(c):
    pair = preset_pair("eqM1-mycase")
    base = compute_barabanov(pair, IterationConfig(tol=1e-6))
    scaled = compute_barabanov(pair.scaled(c), IterationConfig(tol=1e-6 * c))
    assert scaled.converged
    assert scaled.rho_lower == pytest.approx(c * base.rho_lower, rel=1e-9)
    assert scaled.rho_upper == pytest.approx(c * base.rho_upper, rel=1e-9)


def test_case1_gap_and_brute_force_cross_check(norms):
    res = norms["case1"]
    assert res.converged and res.gap <= 1e-4
    bar, _, top = brute_force_bounds(preset_pair("case1"), 12)
    assert bar <= res.rho_upper + 1e-12
    assert res.rho_lower <= top


def test_brute_force_examples():
    bar, _, top = brute_force_bounds(MatrixPair.raw(rotation(0.3), rotation(0.3)), 8)
    assert bar == pytest.approx(1.0, abs=1e-14) and top == pytest.approx(1.0, abs=1e-14)
    bar, _, top = brute_force_bounds(diag_pair([2, 2], [1, 1]), 4)
    assert bar == pytest.approx(2.0, rel=1e-14) and top == pytest.approx(2.0, rel=1e-14)
    bar, _, top = brute_force_bounds(preset_pair("eqM1-mycase"), 16)
    assert bar <= RHO_EQM1 + 1e-6 and top >= RHO_EQM1 - 1e-6


def test_brute_force_matches_word_enumeration():
    pair = preset_pair("case2")
    for n in (1, 3, 6):
        assert brute_force_bounds(pair, n)[0] == pytest.approx(
            max_word_spectral_radius(pair, list(all_words(n))), rel=1e-12
        )


@pytest.mark.parametrize("n", [0, 25])
def test_brute_force_rejects_bad_length(n):
    with pytest.raises(ValueError):
        brute_force_bounds(preset_pair("case1"), n)


@pytest.mark.parametrize("name", ALL_PRESETS)
def test_sandwich_and_residual(norms, name):
    res = norms[name]
    assert res.converged
    assert 0 < res.rho_lower <= res.rho_upper
    for rec in res.history:
        assert rec.lower <= res.rho_upper
        assert rec.upper >= res.rho_lower
    assert res.residual <= 5 * TOL
    assert res.residual == barabanov_residual(preset_pair(name), res.polygon, res.rho)
    for n in (4, 10, 16):
        bar, _, top = brute_force_bounds(preset_pair(name), n)
        assert bar <= res.rho_upper + TOL
        assert res.rho_lower - TOL <= top


def test_similarity_invariance(rng, norms):
    pair = preset_pair("case3")
    rho = norms["case3"].rho
    for _ in range(3):
        s = np.eye(2) + 0.4 * rng.normal(size=(2, 2))
        if np.linalg.cond(s) > 10:
            continue
        res = compute_barabanov(pair.conjugated(s), IterationConfig(tol=1e-6))
        assert res.rho_lower - 1e-2 <= rho <= res.rho_upper + 1e-2


def test_power_scheme_agrees_with_relaxation(norms):
    res = compute_barabanov(preset_pair("eqM1-mycase"), IterationConfig(tol=1e-6, scheme=Scheme.POWER))
    ref = norms["eqM1-mycase"]
    assert res.rho_lower <= ref.rho_upper and ref.rho_lower <= res.rho_upper


def test_non_convergence_keeps_valid_bounds(norms):
    cfg = IterationConfig(tol=TOL, max_iter=3)
    res = compute_barabanov(preset_pair("case1"), cfg)
    assert not res.converged and res.iterations == 3
    rho = norms["case1"].rho
    assert res.rho_lower <= rho <= res.rho_upper
    with pytest.raises(NonConvergenceError) as info:
        compute_barabanov(preset_pair("case1"), cfg, raise_on_nonconvergence=True)
    assert info.value.result.rho_lower <= rho <= info.value.result.rho_upper


def test_reducible_pair_degenerates_under_power_scheme():
    pair = MatrixPair.raw([[2.0, 0.0], [0.0, 1.0]], [[2.0, 0.0], [0.0, 0.5]])
    with pytest.raises(DegenerateBallError):
        compute_barabanov(pair, IterationConfig(scheme=Scheme.POWER))


def test_speed_mode_pruning(norms):
    res = compute_barabanov(preset_pair("eqM1-mycase"), IterationConfig(tol=TOL, prune_eps=1e-12))
    ref = norms["eqM1-mycase"]
    assert res.converged
    assert res.rho_lower <= ref.rho_upper + TOL and ref.rho_lower - TOL <= res.rho_upper


def test_iteration_callback_sees_every_record():
    seen = []
    res = compute_barabanov(preset_pair("case2"), IterationConfig(tol=1e-4), on_iteration=seen.append)
    assert tuple(seen) == res.history
    assert [r.k for r in seen] == list(range(1, res.iterations + 1))


@pytest.mark.parametrize(
    "kwargs",
    [
        {"tol": 0.0},
        {"max_iter": 0},
        {"initial_vertices": 5},
        {"initial_vertices": 2},
        {"prune_eps": -1.0},
        {"scheme": "newton"},
        {"reference_direction": (0.0, 0.0)},
    ],
)
def test_iteration_config_validation(kwargs):
    with pytest.raises(ValueError):
        IterationConfig(**kwargs)


def test_initial_polygon_is_optional_and_honored():
    pair = preset_pair("eqM1-mycase")
    res = compute_barabanov(pair, IterationConfig(tol=1e-6), initial=SQUARE)
    assert res.converged and abs(res.rho - RHO_EQM1) < 1e-5
    assert math.isfinite(res.residual)
