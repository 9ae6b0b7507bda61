import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from expvol.core_types import DecoratedSurface, ParameterError
from expvol.tropical import (HPolytope, kontsevich_check_g1n1, polytope_volume_mc,
                             tropical_crown_moment, tropical_crown_polytope,
                             tropical_crown_volume, tropical_exp_volume,
                             tropical_length_polytope, tropical_limit_n2, tropical_slice,
                             v_star)

kappas = st.lists(st.floats(-3.0, -0.1), min_size=1, max_size=4)


def test_volume_examples():
    assert tropical_crown_volume([-1, -2, -3]) == 12.0
    assert tropical_crown_volume([-1, 0.5]) == 0.0
    assert tropical_crown_volume([0.0, -1.0]) == 0.0


@pytest.mark.parametrize("a,d", [(1.0, 0), (2.0, 1), (0.5, 3)])
def test_one_cusp_moment(a, d):
    # l is uniform on [-a, a] with total mass 2a
    assert tropical_crown_moment([-a], d) == pytest.approx(a ** (d + 1) / (d + 1), rel=1e-14)


def test_two_cusp_moment_by_hand():
    # kappa = (-1, -1): slice is the tent 1 - |l|/2 on [-2, 2]; int_0^2 (1 - l/2) l dl = 2/3
    assert tropical_crown_moment([-1, -1], 1) == pytest.approx(2 / 3, rel=1e-14)
    assert tropical_slice([-1, -1], 0.0) == pytest.approx(1.0)
    assert tropical_slice([-1, -1], 1.0) == pytest.approx(0.5)
    assert tropical_slice([-1, -1], 2.5) == 0.0


@given(kappas, st.integers(0, 4), st.floats(0.3, 3.0))
@settings(max_examples=40, deadline=None)
def test_homogeneity(kappa, d, lam):
    n = len(kappa)
    a = tropical_crown_moment([lam * k for k in kappa], d)
    b = lam ** (n + d) * tropical_crown_moment(kappa, d)
    assert a == pytest.approx(b, rel=1e-9)


@given(kappas)
@settings(max_examples=20, deadline=None)
def test_slice_integrates_to_volume(kappa):
    A = -sum(kappa)
    pts = sorted({A - 2 * sum(-kappa[j] for j in range(len(kappa)) if (m >> j) & 1)
                  for m in range(2 ** len(kappa))})
    total = integrate.quad(lambda l: tropical_slice(kappa, l), -A, A, points=pts[1:-1],
                           limit=200, epsabs=1e-12)[0]
    assert total == pytest.approx(tropical_crown_volume(kappa), rel=1e-8)


def test_half_of_mass_on_positive_lengths():
    kappa = [-0.4, -1.1, -2.0]
    assert tropical_crown_moment(kappa, 0) == pytest.approx(0.5 * tropical_crown_volume(kappa))


@pytest.mark.parametrize("kappa,d", [([-1.0, -2.0, -0.5], 1), ([-1.0, -1.0, -1.0, -1.0], 3)])
def test_mc_agrees_with_exact(kappa, d):
    r = tropical_crown_moment(kappa, d, method="mc", n_samples=200_000, seed=7)
    exact = tropical_crown_moment(kappa, d)
    assert abs(r.value - exact) < 4 * r.error_estimate


def test_moment_errors():
    with pytest.raises(ParameterError):
        tropical_crown_moment([1.0], 0)
    with pytest.raises(ParameterError):
        tropical_crown_moment([-1.0], -1)
    with pytest.raises(ParameterError):
        tropical_crown_moment([-1.0], 1, method="nope")


def test_polytope_mc_simplex_and_box():
    simplex = HPolytope([(-1, 0, 0), (0, -1, 0), (0, 0, -1), (1, 1, 1)], [0, 0, 0, 1])
    r = polytope_volume_mc(simplex, 400_000, seed=3)
    assert abs(r.value - 1 / 6) < 4 * r.error_estimate
    box = HPolytope.box([0, 0], [2, 3])
    assert polytope_volume_mc(box, 10_000).value == pytest.approx(6.0)


def test_length_polytope_volumes():
    kappa = [-1.0, -0.5, -2.0]
    full = polytope_volume_mc(tropical_length_polytope(kappa, False), 400_000, seed=5)
    half = polytope_volume_mc(tropical_length_polytope(kappa, True), 400_000, seed=5)
    assert abs(full.value - tropical_crown_volume(kappa)) < 4 * full.error_estimate
    assert abs(half.value - tropical_crown_moment(kappa, 0)) < 4 * half.error_estimate
    box = polytope_volume_mc(tropical_crown_polytope(kappa), 10_000)
    assert box.value == pytest.approx(1.0)


def test_unbounded_polytope_rejected():
    with pytest.raises(ParameterError):
        polytope_volume_mc(HPolytope([(1, 0), (0, 1)], [1, 1]))


def test_polytope_json_round_trip():
    p = tropical_length_polytope([-1.0, -2.0])
    assert HPolytope.from_json(p.to_json()) == p


def test_v_star_and_exp_volume():
    assert v_star(0, 3) == {(0, 0, 0): Fraction(1)}
    assert v_star(1, 1) == {(1,): Fraction(1, 12)}
    kap = [[-1.0], [-2.0], [-0.5]]
    ref = 0.5 ** 3 * math.prod(tropical_crown_moment(k, 1) for k in kap)
    assert tropical_exp_volume(DecoratedSurface(0, (1, 1, 1)), kap) == pytest.approx(ref)
    torus = tropical_exp_volume(DecoratedSurface(1, (2,)), [[-1.0, -1.0]])
    assert torus == pytest.approx(0.5 / 12 * tropical_crown_moment([-1.0, -1.0], 3))


def test_exp_volume_needs_all_crowns():
    with pytest.raises(ParameterError):
        tropical_exp_volume(DecoratedSurface(0, (1, 1, 0)), [[-1.0], [-1.0]])


def test_kontsevich_report():
    rep = kontsevich_check_g1n1()
    assert rep["V_star"] == Fraction(1, 12)
    assert rep["ratio"] == 2
    assert rep["ratio_is_power_of_two"]


def test_tropical_limit_interior_point():
    out = tropical_limit_n2([-1.0, -1.0], 1.0)
    assert out["tropical"] == pytest.approx(0.5)
    assert out["richardson"] == pytest.approx(0.5, rel=0.02)
    assert out["rescaled"][0] < out["rescaled"][1] < out["rescaled"][2]
