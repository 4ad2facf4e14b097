import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from barabanov.angular import (
    NotConvergedError,
    NotInvariantError,
    angular_function,
    branch_angles,
    circular_distance,
    gauge_gap,
    rotation_number_estimate,
    switching_lines,
    switching_sets,
)
from barabanov.linalg import MatrixPair, rotation
from barabanov.norm import BarabanovResult, IterationConfig, compute_barabanov

from conftest import CASES, preset_pair

PI = math.pi
EXPECTED = {  # (orientation preserved, discontinuities)
    "case1": (False, 2),
    "case2": (True, 1),
    "case3": (True, 2),
}


def test_branch_angles_examples():
    pair = MatrixPair.raw(rotation(0.4), np.eye(2))
    phi = np.linspace(0, 3, 7)
    p0, p1 = branch_angles(pair, phi)
    np.testing.assert_allclose(p0, np.mod(phi + 0.4, PI), atol=1e-15)
    np.testing.assert_allclose(p1, phi, atol=1e-15)
    a1 = preset_pair("case1").a1
    assert a1[1, 0] == math.sin(0.8) / 0.75
    expected = math.atan2(math.sin(0.8) / 0.75, math.cos(0.8)) % PI
    assert branch_angles(preset_pair("case1"), 0.0)[1] == pytest.approx(expected, abs=1e-15)


@given(st.floats(0, 2 * PI, exclude_max=True))
def test_branch_angles_stay_in_half_circle(phi):
    for v in branch_angles(preset_pair("case2"), phi):
        assert 0.0 <= v < PI


@pytest.mark.parametrize("name", CASES)
def test_pi_periodicity(profiles, name):
    prof = profiles[name]
    for phi in np.linspace(0.01, PI - 0.01, 97):
        a, sa = prof.evaluate(phi)
        b, sb = prof.evaluate(phi + PI)
        assert sa == sb
        assert circular_distance(a, b) <= 1e-10


@pytest.mark.parametrize("name", [*CASES, "eqM1-mycase"])
def test_argmax_and_range(profiles, norms, name):
    prof = profiles[name]
    pair = preset_pair(name)
    d = gauge_gap(pair, prof.polygon, prof.grid)
    rho = norms[name].rho
    sign = np.where(prof.branch == 0, 1.0, -1.0)
    assert np.all(sign * d >= -1e-10 * rho)
    assert np.all((prof.phi_next >= 0) & (prof.phi_next < PI))
    assert list(prof.switching_angles) == sorted(prof.switching_angles)


@pytest.mark.parametrize("name", [*CASES, "eqM1-mycase"])
def test_switching_angles_are_on_both_branches(profiles, norms, name):
    prof = profiles[name]
    d = gauge_gap(preset_pair(name), prof.polygon, np.array(prof.switching_angles))
    assert np.all(np.abs(d) <= 1e-9 * norms[name].rho)


@pytest.mark.parametrize("name", CASES)
def test_case_structure(profiles, name):
    prof = profiles[name]
    preserving, ndisc = EXPECTED[name]
    assert prof.orientation_preserving is preserving
    assert len(prof.discontinuities) == ndisc
    assert switching_lines(prof) == 2


@pytest.mark.parametrize("name", CASES)
def test_grid_refinement_is_stable(pairs, norms, name):
    coarse = angular_function(pairs[name], norms[name], 4096, rotation_iterations=0)
    fine = angular_function(pairs[name], norms[name], 16384, rotation_iterations=0)
    assert coarse.orientation_preserving == fine.orientation_preserving
    assert len(coarse.discontinuities) == len(fine.discontinuities)
    assert len(coarse.switching_angles) == len(fine.switching_angles)
    np.testing.assert_allclose(coarse.switching_angles, fine.switching_angles, rtol=0, atol=1e-9)


def test_eq_m1_single_switch_on_first_quadrant(profiles):
    prof = profiles["eqM1-mycase"]
    assert switching_lines(prof) == 1
    (w,) = prof.switching_angles
    sets = switching_sets(prof)
    assert sets.omega1 == ((0.0, w),)
    assert sets.omega0 == ((w, PI / 2),)


@pytest.mark.parametrize("name", CASES)
def test_switching_sets_cover_the_arc(profiles, name):
    sets = switching_sets(profiles[name])
    pieces = sorted(sets.omega0 + sets.omega1)
    assert pieces[0][0] == 0.0 and pieces[-1][1] == PI
    for (_, b), (a, _) in zip(pieces[:-1], pieces[1:]):
        assert a == b


def test_dominant_branch_has_no_switch():
    pair = MatrixPair.raw(2 * np.eye(2), np.eye(2))
    norm = compute_barabanov(pair)
    prof = angular_function(pair, norm, 1024)
    assert switching_lines(prof) == 0
    assert np.all(prof.branch == 0)
    assert switching_sets(prof).omega1 == ()


def test_rigid_rotation_number():
    theta = 1.0
    pair = MatrixPair.raw(rotation(theta), 0.5 * rotation(theta))
    norm = compute_barabanov(pair, IterationConfig(tol=1e-3))
    prof = angular_function(pair, norm, 1024, rotation_iterations=5000)
    assert prof.orientation_preserving and not prof.discontinuities
    assert prof.rotation_number == pytest.approx(theta / PI, abs=1e-9)


def test_case1_has_no_rotation_number(profiles):
    assert profiles["case1"].rotation_number is None
    assert rotation_number_estimate(profiles["case1"], 100) is None


def test_case2_rotation_number_is_start_independent(profiles):
    prof = profiles["case2"]
    values = [rotation_number_estimate(prof, 100_000, 1000, phi0) for phi0 in (0.0, 1.0, 2.5)]
    assert 0 < values[0] < 1
    assert max(values) - min(values) <= 1e-4


def test_unconverged_norm_is_refused(pairs, norms):
    norm = norms["case2"]
    raw = BarabanovResult(norm.polygon, norm.rho_lower, norm.rho_upper, 1, norm.residual, False)
    with pytest.raises(NotConvergedError):
        angular_function(pairs["case2"], raw)
    prof = angular_function(pairs["case2"], raw, 512, allow_unconverged=True, rotation_iterations=0)
    assert len(prof.grid) == 512


def test_non_invariant_arc_is_rejected(pairs, norms):
    with pytest.raises(NotInvariantError):
        angular_function(pairs["case1"], norms["case1"], 512, domain=(0.0, PI / 2))


@pytest.mark.parametrize("domain", [(-0.1, 1.0), (1.0, 1.0), (0.0, 4.0)])
def test_bad_domain(pairs, norms, domain):
    with pytest.raises(ValueError):
        angular_function(pairs["case2"], norms["case2"], 64, domain=domain)
