import math

import pytest
from hypothesis import given, settings, strategies as st

from expvol.bessel import bessel_J_series
from expvol.core_types import ParameterError
from expvol.crown import (CrownChart, crown_moment_halfline, crown_potential,
                          crown_signed_moment, crown_volume, crown_volume_n2_closed,
                          operator_signed_moment, v2_bound)
from expvol.quadrature import QuadConfig

FAST = QuadConfig(rel_tol=1e-8)


def test_potential_minimum():
    K = (1.0, 4.0, 9.0)
    assert crown_potential(K, [math.sqrt(k) for k in K]) == pytest.approx(2 * (1 + 2 + 3))
    chart = CrownChart(K, (1.0, 2.0, 3.0))
    assert chart.Lambda == pytest.approx(1.0)


def test_one_cusp_closed_form():
    K, l = 2.0, 0.7
    assert crown_volume(1, [K], l=l) == pytest.approx(
        math.exp(-math.sqrt(K) * 2 * math.cosh(l / 2)), rel=1e-15)


def test_two_cusp_example():
    # K = (1, 1), l = 0 gives J_0(4) = 2 K_0(4)
    assert crown_volume(2, [1.0, 1.0], l=0.0) == pytest.approx(0.0223193522, rel=1e-8)


@given(st.floats(0.1, 4.0), st.floats(0.1, 4.0), st.floats(-3.0, 3.0))
@settings(max_examples=20, deadline=None)
def test_two_cusp_matches_closed_form(K1, K2, l):
    assert crown_volume(2, [K1, K2], l=l, check_closed_form=False) == pytest.approx(
        crown_volume_n2_closed([K1, K2], l), rel=1e-6)


def test_lambda_and_l_agree():
    assert crown_volume(3, [1, 2, 3], Lam=math.e) == pytest.approx(
        crown_volume(3, [1, 2, 3], l=1.0), rel=1e-12)


def test_length_symmetry():
    assert crown_volume(3, [0.5, 1, 2], l=1.2) == pytest.approx(
        crown_volume(3, [0.5, 1, 2], l=-1.2), rel=1e-8)


def test_cyclic_relabelling():
    a = crown_volume(3, [0.5, 1.0, 2.0], l=0.4)
    b = crown_volume(3, [1.0, 2.0, 0.5], l=0.4)
    assert a == pytest.approx(b, rel=1e-8)


def test_v2_bound_holds():
    K = [0.3, 1.1, 2.0]
    assert crown_volume(3, K, l=0.0) < v2_bound(K)


@pytest.mark.parametrize("n,k", [(1, 0), (1, 3), (2, 1), (2, 2), (3, 0)])
def test_signed_moment_operator(n, k):
    K = [0.7, 1.3, 2.1][:n]
    a = crown_signed_moment(n, K, 0.6, k, FAST).value
    assert a == pytest.approx(operator_signed_moment(K, 0.6, k), rel=1e-7)


def test_signed_moment_product_of_bessels():
    K = [1.0, 2.0]
    ref = 2 * bessel_J_series(0.4, 1.0) * bessel_J_series(0.4, 2.0)
    assert crown_signed_moment(2, K, 0.4, 0, FAST).value == pytest.approx(ref, rel=1e-8)


def test_halfline_moments_split_the_line():
    # full-line moment = M(s) + (-1)^k M(-s)
    K = [1.0, 2.0]
    for k in (0, 1):
        a = crown_moment_halfline(2, K, k, FAST, s=0.5).value
        b = crown_moment_halfline(2, K, k, FAST, s=-0.5).value
        full = crown_signed_moment(2, K, 0.5, k, FAST).value
        assert a + (-1) ** k * b == pytest.approx(full, rel=1e-7)


def test_hbar_rescales_K():
    a = crown_signed_moment(2, [1.0, 2.0], 0.3, 1, FAST, hbar=2.0).value
    b = crown_signed_moment(2, [0.25, 0.5], 0.3, 1, FAST).value
    assert a == pytest.approx(b, rel=1e-8)


def test_monotone_in_K():
    vals = [crown_volume(2, [K, 1.0], l=0.5) for K in (0.5, 1.0, 2.0, 4.0)]
    assert all(x > y for x, y in zip(vals, vals[1:]))


def test_bad_input():
    with pytest.raises(ParameterError):
        crown_volume(2, [1.0], l=0.0)
    with pytest.raises(ParameterError):
        crown_volume(2, [1.0, 0.0], l=0.0)
    with pytest.raises(ParameterError):
        crown_volume(2, [1.0, 1.0], l=0.0, Lam=1.0)
    with pytest.raises(ParameterError):
        crown_signed_moment(2, [1.0, 1.0], 0.0, -1)
