import math

import mpmath as mp
import pytest
from scipy import integrate

from expvol.bessel import bessel_J_series
from expvol.core_types import (ConsistencyError, DataError, DecoratedSurface, DivergenceError,
                               ParameterError)
from expvol.crown import crown_volume
from expvol.quadrature import QuadConfig
from expvol.recursion import (LaplaceArgs, a11_neck_unfold_ratio, b_function, b_function_sign_sum,
                              circle_laplace_factor, exp_volume, l_function, surface_kind,
                              trace_from_arcs, trace_from_cluster, uff1_lhs, uff1_rhs,
                              uff1_unfold, vol_A02, vol_A11_neck, vol_A11_unfold)

PANTS1 = DecoratedSurface(0, (1, 0, 0))
PANTS2 = DecoratedSurface(0, (1, 1, 0))
TORUS = DecoratedSurface(1, (1,))


def one_cusp(K, l):
    if l > 600:
        return 0.0
    return math.exp(-2 * math.sqrt(K) * math.cosh(l / 2))


def halfline(f):
    return integrate.quad(f, 0, math.inf, epsabs=0, epsrel=1e-12, limit=200)[0]


def test_kinds():
    assert surface_kind(DecoratedSurface.crown(3)) == "crown_disc"
    assert surface_kind(DecoratedSurface(0, (2, 1))) == "crowned_annulus"
    assert surface_kind(TORUS) == "general"
    with pytest.raises(ParameterError):
        surface_kind(DecoratedSurface(0, (1,)))


def test_pants_one_crown():
    K = 1.5
    ref = 0.5 * halfline(lambda l: one_cusp(K, l) * l)
    assert exp_volume(PANTS1, [[K]], [0.3, 0.7]) == pytest.approx(ref, rel=1e-9)


def test_pants_two_crowns():
    K1, K2 = 0.7, 2.0
    ref = 0.25 * halfline(lambda l: one_cusp(K1, l) * l) * halfline(lambda l: one_cusp(K2, l) * l)
    assert exp_volume(PANTS2, [[K1], [K2]], [1.0]) == pytest.approx(ref, rel=1e-9)


def test_torus_one_crown():
    K = 1.0
    m1 = halfline(lambda l: one_cusp(K, l) * l)
    m3 = halfline(lambda l: one_cusp(K, l) * l ** 3)
    ref = 0.5 * (math.pi ** 2 / 6 * m1 + m3 / 24)
    assert exp_volume(TORUS, [[K]]) == pytest.approx(ref, rel=1e-9)


def test_crown_disc_is_fixed_length_volume():
    surf = DecoratedSurface.crown(2)
    assert exp_volume(surf, [[1.0, 2.0]], [0.4]) == pytest.approx(
        crown_volume(2, [1.0, 2.0], l=0.4), rel=1e-12)


def test_exp_volume_decreasing_in_K():
    vals = [exp_volume(PANTS1, [[K]], [0.0, 0.0]) for K in (0.5, 1.0, 2.0)]
    assert vals[0] > vals[1] > vals[2]


def test_missing_volume_polynomial():
    with pytest.raises(DataError):
        exp_volume(DecoratedSurface(0, (1, 0, 0, 0)), [[1.0]], [0, 0, 0])


def test_wrong_length_counts():
    with pytest.raises(ParameterError):
        exp_volume(PANTS1, [[1.0]], [0.3])
    with pytest.raises(ParameterError):
        exp_volume(PANTS1, [[1.0, 2.0]], [0.3, 0.3])


def test_crowned_annulus_rejects_transforms():
    surf = DecoratedSurface(0, (1, 1))
    with pytest.raises(DataError):
        l_function(surf, [[1.0], [1.0]], LaplaceArgs((1.0,)))
    with pytest.raises(DataError):
        b_function(surf, [[1.0], [1.0]], LaplaceArgs((1.0,)))


def test_circle_factor():
    assert circle_laplace_factor(0, 2.0) == pytest.approx(1.0)
    assert circle_laplace_factor(1, 2.0) == pytest.approx(2.0)
    with pytest.raises(DivergenceError):
        circle_laplace_factor(0, 0.0)


def test_l_function_pants_against_direct_quadrature():
    K, s = 1.3, (0.5, 1.0, 2.0)
    crown = halfline(lambda l: one_cusp(K, l) * math.exp(-l * s[0] / 2) * l)
    # circle factors int_0^inf e^{-l s/2} dl = 2/s
    ref = 0.5 * crown * (2 / s[1]) * (2 / s[2])
    assert l_function(PANTS1, [[K]], LaplaceArgs(s)) == pytest.approx(ref, rel=1e-9)


def test_l_function_errors_and_monotonicity():
    with pytest.raises(ParameterError):
        l_function(PANTS1, [[1.0]], LaplaceArgs((-1.0, 1.0, 1.0)))
    with pytest.raises(DivergenceError):
        l_function(PANTS1, [[1.0]], LaplaceArgs((1.0, 0.0, 1.0)))
    vals = [l_function(TORUS, [[1.0]], LaplaceArgs((s,))) for s in (0.0, 0.5, 1.0)]
    assert vals[0] > vals[1] > vals[2]


def test_l_function_crown_disc():
    K, s = [1.0, 2.0], 0.6
    ref = halfline(lambda l: crown_volume(2, K, l=l, check_closed_form=False) * math.exp(-l * s / 2))
    assert l_function(DecoratedSurface.crown(2), [K], LaplaceArgs((s, 0.0))) == pytest.approx(ref, rel=1e-7)


def test_b_function_crown_disc_is_bessel_product():
    K, s = [1.0, 2.0, 0.5], 0.3
    r = b_function(DecoratedSurface.crown(3), [K], LaplaceArgs((s,)))
    ref = 2 * math.prod(bessel_J_series(s, k) for k in K)
    assert r.value == pytest.approx(ref, rel=1e-10)
    assert r.other_value == pytest.approx(ref, rel=1e-6)


def test_b_function_routes_agree_on_torus():
    r = b_function(DecoratedSurface(1, (2,)), [[1.0, 1.5]], LaplaceArgs((0.7,)))
    assert r.other_value == pytest.approx(r.value, rel=1e-6)


@pytest.mark.parametrize("surf,K", [(DecoratedSurface.crown(2), [[1.0, 2.0]]),
                                    (TORUS, [[1.0]])])
def test_hbar_equals_rescaled_K(surf, K):
    a = b_function(surf, K, LaplaceArgs((0.4,), hbar=2.0)).value
    b = b_function(surf, [[k / 4 for k in c] for c in K], LaplaceArgs((0.4,))).value
    assert a == pytest.approx(b, rel=1e-10)


def test_consistency_error_is_raised(monkeypatch):
    import expvol.recursion as rec
    true_op = rec.operator_signed_moment
    monkeypatch.setattr(rec, "operator_signed_moment", lambda K, s, k: 1.01 * true_op(K, s, k))
    with pytest.raises(ConsistencyError):
        b_function(DecoratedSurface.crown(2), [[1.0, 2.0]], LaplaceArgs((0.3,)))


def test_mc_route_error_bar_is_honoured():
    cfg = QuadConfig(nested_dim_cutoff=1, mc_samples=20000, seed=1)
    r = b_function(DecoratedSurface.crown(2), [[1.0, 2.0]], LaplaceArgs((0.3,)), cfg, rtol=0.0)
    assert abs(r.value - r.other_value) == r.error_estimate


def test_sign_sum_even():
    surf, K = TORUS, [[1.0]]
    a = b_function_sign_sum(surf, K, LaplaceArgs((0.8,)))
    b = b_function_sign_sum(surf, K, LaplaceArgs((-0.8,)))
    assert a == pytest.approx(b, rel=1e-12)


def test_torus_b_function_is_odd():
    surf, K = TORUS, [[1.0]]
    a = b_function(surf, K, LaplaceArgs((0.8,)), paths="operator").value
    b = b_function(surf, K, LaplaceArgs((-0.8,)), paths="operator").value
    assert a == pytest.approx(-b, rel=1e-10)


def test_vol_A02_anchor_and_symmetries():
    assert vol_A02(1.0, 1.0, 1.0) == pytest.approx(0.04463870434341209707, rel=1e-10)
    assert vol_A02(1.0, 2.5, 3.0) == pytest.approx(vol_A02(2.5, 1.0, 3.0), rel=1e-10)
    assert vol_A02(1.0, 2.5, 3.0) == pytest.approx(vol_A02(1.0, 2.5, 1 / 3.0), rel=1e-10)


def test_vol_A02_against_mpmath():
    K1, K2, Lam = 0.5, 2.0, 4.0
    c = 2.5
    r1, r2 = math.sqrt(K1), math.sqrt(K2)
    f = lambda u: mp.exp(-(r1 * r2 / mp.exp(u / 2) + mp.exp(u / 2) * (r2 / r1 + r1 / r2 + c)))
    ref = float(mp.quad(f, [-40, -10, 0, 10, 20]))
    assert vol_A02(K1, K2, Lam) == pytest.approx(ref, rel=1e-10)


def test_trace_formula_matches_cluster_trace():
    # chart X = A/s, Y = s/B with s = sqrt(K1 K2)
    K1, K2, A, B = 0.7, 1.9, 2.3, 0.4
    s = math.sqrt(K1 * K2)
    assert trace_from_arcs(A, B, K1, K2) == pytest.approx(trace_from_cluster(A / s, s / B), rel=1e-12)


@pytest.mark.parametrize("K1,K2", [(1.0, 1.0), (0.5, 2.0), (3.0, 0.2)])
def test_neck_equals_unfold(K1, K2):
    assert vol_A11_neck(K1, K2) == pytest.approx(vol_A11_unfold(K1, K2), rel=1e-7)


def test_ratio_report():
    out = a11_neck_unfold_ratio([(1.0, 1.0), (0.5, 2.0)])
    assert out["mean"] == pytest.approx(1.0, rel=1e-7)
    assert out["cv"] < 1e-7


@pytest.mark.parametrize("K1,K2", [(1.0, 1.0), (0.5, 2.0), (2.0, 0.3)])
def test_uff1(K1, K2):
    lhs = uff1_lhs(K1, K2)
    assert lhs == pytest.approx(uff1_rhs(K1, K2), rel=1e-8)
    assert lhs == pytest.approx(uff1_unfold(K1, K2), rel=1e-8)
