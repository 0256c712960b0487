import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from _oracles import brute_log_integral
from conftest import CASES, random_cartan
from maxent_orbits.errors import OracleOverflowError, SpecError
from maxent_orbits.groups import make_group_spec, weyl_elements, weyl_act
from maxent_orbits.montecarlo import mc_log_integral
from maxent_orbits.oracle import (
    CoincidencePattern,
    confluent_limit,
    gradient,
    log_integral,
    orbit_mean,
)


def test_rank_one_point_orbit():
    assert log_integral(make_group_spec("U", 1), [3.0], [-2.0]).log_value == pytest.approx(6.0, abs=1e-12)


def test_u2_unit_gaps():
    r = log_integral(make_group_spec("U", 2), [0.0, 1.0], [0.0, -1.0])
    assert r.log_value == pytest.approx(np.log(np.e - 1.0), abs=1e-14)
    assert round(r.log_value, 6) == 0.541325


def test_su2_archimedes():
    # the diagonal entry of a Haar-rotated diag(i f, -i f) is uniform on [-f, f]
    s = make_group_spec("SU", 2)
    for f, y in [(1.0, 0.3), (2.0, -1.7), (0.5, 4.0)]:
        expected = np.log(np.sinh(2 * f * y) / (2 * f * y))
        assert log_integral(s, [f, -f], [y, -y]).log_value == pytest.approx(expected, rel=1e-13)


def test_o2_two_point_orbit():
    # the orbit of F under O(2) is {F, -F}, each with mass 1/2
    s = make_group_spec("Oeven", 1)
    for f, y in [(1.0, 0.3), (2.0, -1.7), (0.5, 40.0)]:
        r = log_integral(s, [f], [y])
        assert r.log_value == pytest.approx(np.log(np.cosh(f * y)), rel=1e-13)
        assert r.gradient[0] == pytest.approx(f * np.tanh(f * y), rel=1e-13)
    mc = mc_log_integral(s, [1.0], [0.3], 100_000, seed=2)
    assert abs(mc.mean - np.log(np.cosh(0.3))) <= 3 * mc.stderr


def test_usp1_matches_su2():
    # USp(1) = SU(2) with the same orthonormal coordinate
    a = log_integral(make_group_spec("USp", 1), [1.3], [0.8]).log_value
    b = log_integral(make_group_spec("SU", 2), [1.3 / np.sqrt(2), -1.3 / np.sqrt(2)],
                     [0.8 / np.sqrt(2), -0.8 / np.sqrt(2)]).log_value
    assert a == pytest.approx(b, rel=1e-13)


def test_zero_y_is_exactly_zero(spec, rng):
    for _ in range(10):
        r = log_integral(spec, random_cartan(spec, rng), np.zeros(spec.coord_len))
        assert r.log_value == 0.0


def test_so4_example_against_monte_carlo():
    s = make_group_spec("SOeven", 2)
    F, Y = np.array([0.5, 1.0]), -np.array([0.3, 0.7])
    mc = mc_log_integral(s, F, Y, 100_000, seed=11)
    assert abs(log_integral(s, F, Y).log_value - mc.mean) <= 3 * mc.stderr


def test_matches_high_precision_reference(spec, rng):
    for _ in range(5):
        F, Y = random_cartan(spec, rng), random_cartan(spec, rng)
        ref = brute_log_integral(spec.family.value, F, Y)
        assert abs(log_integral(spec, F, Y).log_value - ref) <= 1e-12 * max(1.0, abs(ref))


def test_gradient_examples():
    np.testing.assert_allclose(gradient(make_group_spec("SU", 2), [1.0, -1.0], [0.0, 0.0]), 0.0, atol=1e-15)
    np.testing.assert_allclose(gradient(make_group_spec("U", 2), [1.0, 0.0], [0.0, 0.0]), [-0.5, -0.5], atol=1e-14)


def test_gradient_center_component():
    s = make_group_spec("U", 3)
    F = np.array([0.4, 1.1, -2.0])
    g = gradient(s, F, np.array([0.3, -0.9, 1.2]))
    assert g.mean() == pytest.approx(-F.mean(), abs=1e-13)
    assert abs(gradient(make_group_spec("SU", 3), F - F.mean(), [0.3, -0.9, 0.6]).sum()) < 1e-14


def test_orbit_mean_is_negative_gradient(spec, rng):
    F, Y = random_cartan(spec, rng), random_cartan(spec, rng)
    np.testing.assert_array_equal(orbit_mean(spec, F, Y), -gradient(spec, F, Y))


def _fd_gradient(spec, F, Y, h=1e-5):
    n = spec.coord_len
    if spec.family.value == "SU":
        dirs = np.eye(n) - 1.0 / n
    else:
        dirs = np.eye(n)
    return np.array([
        (log_integral(spec, F, Y + h * d).log_value - log_integral(spec, F, Y - h * d).log_value) / (2 * h)
        for d in dirs
    ])


def test_gradient_finite_differences(spec, rng):
    for _ in range(5):
        F, Y = random_cartan(spec, rng), random_cartan(spec, rng)
        g = gradient(spec, F, Y)
        if spec.family.value == "SU":
            g = (np.eye(spec.n) - 1.0 / spec.n) @ g
        fd = _fd_gradient(spec, F, Y)
        assert np.max(np.abs(g - fd)) <= 1e-5 * max(1.0, np.max(np.abs(g)))


def test_gradient_with_a_zero_coordinate():
    # SO(2n): the product term contributes even when one coordinate vanishes
    s = make_group_spec("SOeven", 3)
    F, Y = np.array([0.3, -1.2, 0.8]), np.array([0.0, 0.7, -1.1])
    assert np.max(np.abs(gradient(s, F, Y) - _fd_gradient(s, F, Y))) < 1e-8


def test_weyl_invariance(spec, rng):
    elements = list(weyl_elements(spec))
    for _ in range(3):
        F, Y = random_cartan(spec, rng), random_cartan(spec, rng)
        base = log_integral(spec, F, Y).log_value
        for w in elements:
            assert abs(log_integral(spec, F, weyl_act(w, Y)).log_value - base) <= 1e-10 * max(1, abs(base))
            assert abs(log_integral(spec, weyl_act(w, F), Y).log_value - base) <= 1e-10 * max(1, abs(base))


@settings(max_examples=30, deadline=None)
@given(st.sampled_from(CASES), st.integers(0, 2 ** 32 - 1))
def test_convex_along_lines(case, seed):
    s = make_group_spec(*case)
    rng = np.random.default_rng(seed)
    F, Y1, Y2 = (random_cartan(s, rng) for _ in range(3))
    e1, e2 = log_integral(s, F, Y1).log_value, log_integral(s, F, Y2).log_value
    for t in np.linspace(0, 1, 11):
        mid = log_integral(s, F, t * Y1 + (1 - t) * Y2).log_value
        assert mid <= t * e1 + (1 - t) * e2 + 1e-9


def test_confluent_limit_u2_example():
    r = confluent_limit(make_group_spec("U", 2), [1.0, 1.0], [0.0, -1.0],
                        CoincidencePattern(f_groups=[[0, 1]]))
    assert abs(r.log_value - 1.0) <= 1e-9
    assert r.confluent


def test_confluent_limit_zero_y():
    s = make_group_spec("SOodd", 2)
    r = confluent_limit(s, [0.4, 1.0], [0.0, 0.0], CoincidencePattern(y_groups=[[0, 1]]))
    assert r.log_value == 0.0


def test_confluent_limit_zero_pinning():
    s = make_group_spec("SOodd", 2)
    F, Y = np.array([0.9, 0.0]), np.array([0.4, -1.3])
    lim = confluent_limit(s, F, Y, CoincidencePattern(f_zeros=[1])).log_value
    near = log_integral(s, [0.9, 1e-6], Y).log_value
    assert abs(lim - near) <= 1e-5


@pytest.mark.parametrize("case", CASES, ids=lambda c: f"{c[0]}{c[1]}")
def test_confluent_error_decreases(case):
    s = make_group_spec(*case)
    if s.coord_len < 2:
        pytest.skip("needs two coordinates")
    rng = np.random.default_rng(5)
    F, Y = random_cartan(s, rng), random_cartan(s, rng)
    Y[1] = Y[0]
    if s.family.value == "SU":
        Y = Y - Y.mean()
    lim = confluent_limit(s, F, Y, CoincidencePattern(y_groups=[[0, 1]])).log_value
    errs = []
    for xi in (1e-4, 1e-5, 1e-6):
        Yp = Y.copy()
        Yp[1] += xi
        if s.family.value == "SU":
            Yp = Yp - Yp.mean()
        errs.append(abs(log_integral(s, F, Yp).log_value - lim))
    assert errs[0] <= 10 * 1e-4
    assert errs[2] <= errs[0]


def test_confluent_pattern_rejected_when_far():
    with pytest.raises(SpecError) as info:
        confluent_limit(make_group_spec("U", 2), [1.0, 1.5], [0.0, 0.0], CoincidencePattern(f_groups=[[0, 1]]))
    assert info.value.code == "BAD_PATTERN"


def test_confluent_flag():
    s = make_group_spec("U", 3)
    assert log_integral(s, [1.0, 1.0, 0.0], [0.2, 0.1, 0.0]).confluent
    assert not log_integral(s, [1.0, 0.5, 0.0], [0.2, 0.1, 0.0]).confluent


def test_large_arguments_stay_finite():
    s = make_group_spec("USp", 3)
    r = log_integral(s, [-1.0, 0.15, 1.3], [700.0, -600.0, -1900.0])
    assert np.isfinite(r.log_value) and r.condition_estimate < 5


def test_overflow_reported():
    # F nearly on one su(2) factor of so(4): the two determinant parts cancel
    s = make_group_spec("SOeven", 2)
    with pytest.raises(OracleOverflowError) as info:
        log_integral(s, [1.0, -1.0000001], [100.0, 100.0])
    assert info.value.code == "NUMERIC_OVERFLOW"


def test_length_checked():
    with pytest.raises(SpecError):
        log_integral(make_group_spec("U", 2), [1.0, 0.0], [1.0])
