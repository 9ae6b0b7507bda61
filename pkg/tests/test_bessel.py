import math
import warnings

import pytest
from hypothesis import given, settings, strategies as st

from expvol.bessel import (SWITCH_ARGUMENT, bessel_J, bessel_J_logmoment, bessel_J_quad,
                           bessel_J_series, bessel_product, besselk, besselk_asymptotic,
                           besselk_series)
from expvol.core_types import ParameterError

# frozen: mpmath.besselk at 30 digits
BESSELK = {
    (0, 0.1): 2.42706902470201656,
    (0, 1): 0.421024438240708333,
    (0, 5): 0.00369109833404259427,
    (0, 7.9): 0.000162867667687653217,
    (0, 8.1): 0.000131734278649358369,
    (0, 20): 5.74123781533652429e-10,
    (0.3, 2): 0.116036974348119258,
    (0.5, 3): 0.0360259851317645926,
    (1, 1): 0.601907230197234575,
    (1.7, 4): 0.015399974601196745,
    (2.5, 9): 0.0000706523003626092845,
    (3, 0.5): 62.0579095299302564,
    (4.2, 12): 4.43634881081520335e-6,
    (7, 30): 4.74688164906261305e-14,
    (0.25, 50): 3.41227888757488559e-23,
}

# frozen: mpmath.diff of 2 K_s(2 sqrt z) in s
LOGMOMENTS = {
    (0.5, 1.0, 1): 0.0494972750088685513,
    (0.5, 2.0, 2): 0.0288711960431723146,
    (1.0, 0.5, 3): 0.562061773772185927,
    (0.0, 3.0, 2): 0.0104582721180752312,
}


@pytest.mark.parametrize("nu,x", sorted(BESSELK))
def test_besselk_golden(nu, x):
    assert besselk(nu, x) == pytest.approx(BESSELK[(nu, x)], rel=5e-8)


def test_branches_overlap_near_switch():
    # the series branch loses digits to cancellation past x = 10
    for x in (SWITCH_ARGUMENT, 9.0, 10.0):
        for nu in (0.0, 0.4, 1.0, 2.3):
            a, b = besselk_series(nu, x), besselk_asymptotic(nu, x)
            assert abs(a - b) <= 1e-6 * abs(a)


def test_kernel_examples():
    assert bessel_J(0.0, 1.0) == pytest.approx(0.22778774549906687131, rel=1e-12)
    # two-cusp crown at l = 0 with K = (1, 1) needs J_0(4) = 2 K_0(4)
    assert bessel_J(0.0, 4.0) == pytest.approx(0.0223193522, rel=1e-8)


def test_kernel_even_in_s():
    for s in (0.3, 1.0, 2.7):
        assert bessel_J(s, 1.3) == pytest.approx(bessel_J(-s, 1.3), rel=1e-14)


@given(st.floats(0.0, 3.0), st.floats(0.05, 30.0))
@settings(max_examples=40, deadline=None)
def test_series_matches_quadrature(s, z):
    a = bessel_J_series(s, z)
    b = bessel_J_quad(s, z).value
    assert abs(a - b) <= 1e-7 * a


@given(st.floats(0.0, 2.0), st.floats(0.1, 10.0))
@settings(max_examples=30, deadline=None)
def test_recurrence(nu, x):
    # K_{nu+1} = K_{nu-1} + 2 nu / x K_nu
    lhs = besselk(nu + 1, x)
    rhs = besselk(abs(nu - 1), x) + 2 * nu / x * besselk(nu, x)
    assert lhs == pytest.approx(rhs, rel=1e-9)


@pytest.mark.parametrize("key", sorted(LOGMOMENTS))
def test_logmoments_golden(key):
    s, z, k = key
    assert bessel_J_logmoment(s, z, k) == pytest.approx(LOGMOMENTS[key], rel=1e-9)


def test_odd_logmoment_vanishes_at_zero():
    assert abs(bessel_J_logmoment(0.0, 1.0, 1)) < 1e-15


def test_bad_arguments():
    with pytest.raises(ParameterError):
        bessel_J(0.0, 0.0)
    with pytest.raises(ParameterError):
        bessel_J(0.0, -1.0)
    with pytest.raises(ParameterError):
        bessel_J_logmoment(0.0, 1.0, -1)


def test_empty_product_warns():
    with warnings.catch_warnings(record=True) as w:
        warnings.simplefilter("always")
        assert bessel_product(0.5, []) == 1.0
    assert w


def test_product():
    assert bessel_product(0.5, [1.0, 2.0]) == pytest.approx(
        bessel_J(0.5, 1.0) * bessel_J(0.5, 2.0), rel=1e-15)
