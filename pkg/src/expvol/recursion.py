"""Neck recursion: exponential volumes, L-functions and B-functions of
decorated surfaces assembled from crown moments and volume polynomials,
plus the worked identities on the annuli ``A_{0,2}`` and ``A_{1,1}``.

Surface kinds
-------------
* crown disc ``D_n^*`` = ``DecoratedSurface(0, (n, 0))``: the crown itself.
* crowned annulus ``(0, (p, q))`` with ``p, q > 0``: two crowns glued along a
  single neck; ``exp_volume = int_0^inf Vol_p Vol_q l dl``.
* everything else: neck cuts around every crown leave a bordered surface
  whose volume polynomial must be in the table.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .bessel import bessel_J_series
from .core_types import (BoundaryLengths, ConsistencyError, CrownParams, DataError,
                         DecoratedSurface, DivergenceError, ParameterError,
                         RecursionConstants, cutting_constant, surface_constant,
                         validate_surface, volume_polynomial)
from .crown import (crown_moment_halfline, crown_signed_moment, crown_volume_result,
                    operator_signed_moment)
from .quadrature import IntegralResult, QuadConfig, integrate_box, integrate_halfline, integrate_line

__all__ = [
    "LaplaceArgs", "BFunctionResult", "surface_kind", "exp_volume", "exp_volume_result",
    "l_function", "b_function", "b_function_sign_sum", "circle_laplace_factor",
    "vol_A02", "vol_A11_neck", "vol_A11_unfold", "a11_neck_unfold_ratio",
    "uff1_lhs", "uff1_rhs", "uff1_unfold", "trace_from_arcs", "trace_from_cluster",
]


@dataclass(frozen=True)
class LaplaceArgs:
    """Laplace variables, one per boundary component, and the scale ``hbar``.

    For a crown disc only the crown entry is used; a single value is
    broadcast to every boundary.
    """

    s: tuple[float, ...]
    hbar: float = 1.0

    def __post_init__(self):
        s = self.s
        if isinstance(s, (int, float)):
            s = (s,)
        object.__setattr__(self, "s", tuple(float(x) for x in s))
        if not self.hbar > 0:
            raise ParameterError("hbar must be positive")

    def for_surface(self, surf: DecoratedSurface) -> tuple[float, ...]:
        if len(self.s) == 1:
            return self.s * surf.m
        if len(self.s) != surf.m:
            raise ParameterError(f"need {surf.m} Laplace variables, got {len(self.s)}")
        return self.s


@dataclass(frozen=True)
class BFunctionResult:
    """B-function value with the route that produced it.

    ``other_value`` holds the second route when both were evaluated;
    ``error_estimate`` is then their absolute discrepancy.
    """

    value: float
    path_tag: str
    error_estimate: float
    other_value: float | None = None

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# helpers


def surface_kind(surf: DecoratedSurface) -> str:
    """``'crown_disc'``, ``'crowned_annulus'`` or ``'general'``."""
    if not validate_surface(surf):
        raise ParameterError(f"surface {surf.label()} is not hyperbolic")
    if surf.genus == 0 and surf.m == 2:
        if surf.r == 1:
            return "crown_disc"
        if surf.r == 2:
            return "crowned_annulus"
    return "general"


def _crown_K(surf: DecoratedSurface, K) -> list[tuple[float, ...]]:
    K = K if isinstance(K, CrownParams) else CrownParams(K)
    if len(K) != surf.r:
        raise ParameterError(f"need K-parameters for {surf.r} crowns, got {len(K)}")
    out = []
    for j, i in enumerate(surf.crowns):
        if len(K[j]) != surf.boundaries[i]:
            raise ParameterError(
                f"crown {i} has {surf.boundaries[i]} cusps but {len(K[j])} K-parameters")
        out.append(tuple(K[j]))
    return out


def _scaled(K, hbar):
    return tuple(k / hbar ** 2 for k in K)


def _volume_terms(surf: DecoratedSurface):
    """``(d, coefficient)`` pairs of the volume polynomial of ``surf``."""
    poly = volume_polynomial(surf.genus, surf.m)
    return [(tuple(d), float(c)) for d, c in poly.items()]


def circle_laplace_factor(k: int, s: float) -> float:
    """``int_0^inf e^{-ls/2} l^{2k} dl = (2k)! (2/s)^{2k+1}``."""
    if not s > 0:
        raise DivergenceError(f"Laplace factor of a circle boundary diverges at s={s}")
    return math.factorial(2 * k) * (2.0 / s) ** (2 * k + 1)


def _combine(terms):
    """Sum of products of IntegralResults/floats with first-order error propagation."""
    total, err = 0.0, 0.0
    for coef, factors in terms:
        vals = [f.value if isinstance(f, IntegralResult) else float(f) for f in factors]
        errs = [f.error_estimate if isinstance(f, IntegralResult) else 0.0 for f in factors]
        prod = coef * math.prod(vals)
        total += prod
        for i, e in enumerate(errs):
            if e:
                err += abs(coef) * e * abs(math.prod(v for j, v in enumerate(vals) if j != i))
    return total, err


# ---------------------------------------------------------------------------
# exponential volume


def _annulus_integrand(Kp, Kq):
    p, q = len(Kp), len(Kq)

    def vol_part(K, l, u):
        # fixed-length crown integrand; u holds log B_1..log B_{n-1}
        K = np.asarray(K)
        logc = 0.5 * np.log(K).sum() - 0.5 * l
        if u.shape[1] == 0:
            lb = logc
            return np.exp(-(np.exp(lb) + K[0] * np.exp(-lb)))
        lbn = logc - u.sum(axis=1)
        W = (np.exp(u) + K[:-1] * np.exp(-u)).sum(axis=1) + np.exp(lbn) + K[-1] * np.exp(-lbn)
        return np.exp(-W)

    def f(x):
        l = x[:, 0]
        return vol_part(Kp, l, x[:, 1:p]) * vol_part(Kq, l, x[:, p:p + q - 1]) * l

    return f, 1 + (p - 1) + (q - 1)


def exp_volume_result(surf: DecoratedSurface, K, lengths=None, cfg: QuadConfig | None = None,
                      constants: RecursionConstants | None = None) -> IntegralResult:
    """Exponential volume with its error estimate (see :func:`exp_volume`)."""
    cfg = cfg or QuadConfig()
    constants = constants or RecursionConstants.default()
    kind = surface_kind(surf)
    Ks = _crown_K(surf, K)
    lens = () if lengths is None else tuple(
        lengths.l if isinstance(lengths, BoundaryLengths) else lengths)

    if kind == "crown_disc":
        if len(lens) != 1:
            raise ParameterError("a crown disc needs exactly one neck length")
        return crown_volume_result(len(Ks[0]), Ks[0], l=lens[0], cfg=cfg)

    if kind == "crowned_annulus":
        if lens:
            raise ParameterError("a crowned annulus has no circle boundaries")
        # neck constant (1/2) times the connected-surface normalization 2
        C = float(cutting_constant(surf, surf.crowns[0], constants)) * 2.0
        f, dim = _annulus_integrand(*Ks)
        centres = [1.0] + [0.5 * math.log(k) for k in Ks[0][:-1]] + [0.5 * math.log(k) for k in Ks[1][:-1]]
        if dim == 1:
            res = integrate_halfline(lambda l: f(l[:, None]), cfg, center=1.0)
        else:
            res = integrate_box(f, dim, ["halfline"] + ["line"] * (dim - 1), cfg, centres)
        return IntegralResult(C * res.value, C * res.error_estimate, res.evaluations, res.method_tag)

    if len(lens) != len(surf.circles):
        raise ParameterError(f"need {len(surf.circles)} circle lengths, got {len(lens)}")
    C = float(surface_constant(surf, constants))
    circ_len = dict(zip(surf.circles, lens))
    crown_pos = {i: j for j, i in enumerate(surf.crowns)}
    cache = {}
    terms = []
    for d, coef in _volume_terms(surf):
        factors = []
        for i, di in enumerate(d):
            if i in crown_pos:
                key = (i, di)
                if key not in cache:
                    Kj = Ks[crown_pos[i]]
                    cache[key] = crown_moment_halfline(len(Kj), Kj, 2 * di + 1, cfg)
                factors.append(cache[key])
            else:
                factors.append(circ_len[i] ** (2 * di))
        terms.append((C * coef, factors))
    val, err = _combine(terms)
    return IntegralResult(val, err, sum(r.evaluations for r in cache.values()), "neck_recursion")


def exp_volume(surf: DecoratedSurface, K, lengths=None, cfg: QuadConfig | None = None,
               constants: RecursionConstants | None = None) -> float:
    """Exponential volume of the moduli space of ``surf``.

    Parameters
    ----------
    surf : DecoratedSurface
    K : CrownParams or nested sequence
        K-parameters, one tuple per crown in boundary order.
    lengths : BoundaryLengths or sequence, optional
        Lengths of the geodesic circle boundaries. For a crown disc, the
        single neck length at which the fixed-length volume is taken.
    cfg : QuadConfig, optional
    constants : RecursionConstants, optional

    Returns
    -------
    float
        ``C_S sum_d V_d prod_crowns int_0^inf Vol(D)(l) l^{2d+1} dl
        prod_circles l^{2d}``.

    Raises
    ------
    DataError
        If the volume polynomial of ``surf`` is not tabulated.
    """
    return exp_volume_result(surf, K, lengths, cfg, constants).value


# ---------------------------------------------------------------------------
# Laplace transforms


def _general_transform(surf, Ks, s, cfg, constants, crown_factor):
    C = float(surface_constant(surf, constants))
    crown_pos = {i: j for j, i in enumerate(surf.crowns)}
    terms = []
    for d, coef in _volume_terms(surf):
        factors = []
        for i, di in enumerate(d):
            if i in crown_pos:
                factors.append(crown_factor(Ks[crown_pos[i]], s[i], 2 * di + 1))
            else:
                factors.append(circle_laplace_factor(di, s[i]))
        terms.append((C * coef, factors))
    return _combine(terms)


def l_function(surf: DecoratedSurface, K, sargs: LaplaceArgs, cfg: QuadConfig | None = None,
               constants: RecursionConstants | None = None) -> float:
    """Laplace transform over the ordinary moduli space (lengths ``l >= 0``).

    Crowns contribute ``int_0^inf Vol(D)(l) e^{-ls/2} l^{2d+1} dl`` and
    circles ``(2d)! (2/s)^{2d+1}``. For a crown disc the value is
    ``int_0^inf Vol(D)(l) e^{-ls/2} dl``.

    Raises
    ------
    ParameterError
        If some ``s`` is negative.
    DivergenceError
        If ``s = 0`` at a circle boundary.
    DataError
        For a crowned annulus, whose bordered part has no volume polynomial.
    """
    cfg = cfg or QuadConfig()
    constants = constants or RecursionConstants.default()
    kind = surface_kind(surf)
    Ks = [_scaled(k, sargs.hbar) for k in _crown_K(surf, K)]
    s = sargs.for_surface(surf)
    if any(x < 0 for x in s):
        raise ParameterError("Laplace variables must be nonnegative")
    if kind == "crown_disc":
        i = surf.crowns[0]
        return crown_moment_halfline(len(Ks[0]), Ks[0], 0, cfg, s=s[i]).value
    if kind == "crowned_annulus":
        raise DataError("no volume polynomial for the cut annulus V_(0,2)")

    def crown_factor(Kj, sj, k):
        return crown_moment_halfline(len(Kj), Kj, k, cfg, s=sj)

    return _general_transform(surf, Ks, s, cfg, constants, crown_factor)[0]


def _b_paths(surf, Ks, s, cfg, constants, hbar):
    """Operator and recursion-integral values of the signed B-function."""
    if surface_kind(surf) == "crown_disc":
        i = surf.crowns[0]
        op = operator_signed_moment(_scaled(Ks[0], hbar), s[i], 0)
        rec = crown_signed_moment(len(Ks[0]), Ks[0], s[i], 0, cfg, hbar=hbar)
        return op, rec.value, rec.error_estimate

    def op_factor(Kj, sj, k):
        return operator_signed_moment(_scaled(Kj, hbar), sj, k)

    def rec_factor(Kj, sj, k):
        return crown_signed_moment(len(Kj), Kj, sj, k, cfg, hbar=hbar)

    op, _ = _general_transform(surf, Ks, s, cfg, constants, op_factor)
    rec, rec_err = _general_transform(surf, Ks, s, cfg, constants, rec_factor)
    return op, rec, rec_err


def b_function(surf: DecoratedSurface, K, sargs: LaplaceArgs, cfg: QuadConfig | None = None,
               constants: RecursionConstants | None = None, rtol: float = 1e-4,
               atol: float = 1e-10, paths: str = "both") -> BFunctionResult:
    """Laplace transform over the enhanced moduli space (signed lengths).

    Each crown contributes ``int_R Vol(D)(l) e^{-ls/2} l^{2d+1} dl``, which
    equals ``2 (-2 d/ds)^{2d+1} prod_cusps J_s(K)``. Both the operator
    route (Bessel log-moments) and the recursion-integral route (direct
    quadrature over the crown) are evaluated.

    Parameters
    ----------
    paths : {'both', 'operator', 'recursion_integral'}
        ``'both'`` checks the routes against each other and returns the
        operator value.

    Raises
    ------
    ConsistencyError
        If the routes differ by more than ``rtol * max|value| + atol``.
    """
    cfg = cfg or QuadConfig()
    constants = constants or RecursionConstants.default()
    kind = surface_kind(surf)
    if kind == "crowned_annulus":
        raise DataError("no volume polynomial for the cut annulus V_(0,2)")
    Ks = _crown_K(surf, K)
    s = sargs.for_surface(surf)
    hbar = sargs.hbar
    if paths == "operator":
        if kind == "crown_disc":
            return BFunctionResult(operator_signed_moment(_scaled(Ks[0], hbar), s[surf.crowns[0]], 0),
                                   "operator", 0.0)

        def op_factor(Kj, sj, k):
            return operator_signed_moment(_scaled(Kj, hbar), sj, k)
        return BFunctionResult(_general_transform(surf, Ks, s, cfg, constants, op_factor)[0],
                               "operator", 0.0)
    if paths == "recursion_integral":
        if kind == "crown_disc":
            r = crown_signed_moment(len(Ks[0]), Ks[0], s[surf.crowns[0]], 0, cfg, hbar=hbar)
            return BFunctionResult(r.value, "recursion_integral", r.error_estimate)

        def rec_factor(Kj, sj, k):
            return crown_signed_moment(len(Kj), Kj, sj, k, cfg, hbar=hbar)
        v, e = _general_transform(surf, Ks, s, cfg, constants, rec_factor)
        return BFunctionResult(v, "recursion_integral", e)
    if paths != "both":
        raise ParameterError(f"unknown path selection {paths!r}")
    op, rec, rec_err = _b_paths(surf, Ks, s, cfg, constants, hbar)
    diff = abs(op - rec)
    if diff > rtol * max(abs(op), abs(rec)) + atol + rec_err:
        raise ConsistencyError(f"B-function routes disagree: operator {op!r}, integral {rec!r}")
    return BFunctionResult(op, "operator", diff, rec)


def b_function_sign_sum(surf: DecoratedSurface, K, sargs: LaplaceArgs,
                        cfg: QuadConfig | None = None,
                        constants: RecursionConstants | None = None) -> float:
    """Sum of the L-function integrands over all sign choices of the crown variables.

    Each crown contributes ``M(s) + M(-s)`` with
    ``M(s) = int_0^inf Vol(D)(l) e^{-ls/2} l^{2d+1} dl``, i.e.
    ``int_R Vol(D)(l) e^{-ls/2} |l|^{2d+1} dl``. Even in every crown
    variable by construction.
    """
    cfg = cfg or QuadConfig()
    constants = constants or RecursionConstants.default()
    kind = surface_kind(surf)
    if kind == "crowned_annulus":
        raise DataError("no volume polynomial for the cut annulus V_(0,2)")
    Ks = [_scaled(k, sargs.hbar) for k in _crown_K(surf, K)]
    s = sargs.for_surface(surf)

    def both(Kj, sj, k):
        a = crown_moment_halfline(len(Kj), Kj, k, cfg, s=sj)
        b = crown_moment_halfline(len(Kj), Kj, k, cfg, s=-sj)
        return IntegralResult(a.value + b.value, a.error_estimate + b.error_estimate,
                              a.evaluations + b.evaluations, a.method_tag)

    if kind == "crown_disc":
        return both(Ks[0], s[surf.crowns[0]], 0).value

    def crown_factor(Kj, sj, k):
        return both(Kj, sj, k)

    # circle factors are not sign-summed; require s > 0 there
    return _general_transform(surf, Ks, s, cfg, constants, crown_factor)[0]


# ---------------------------------------------------------------------------
# annulus identities


def vol_A02(K1: float, K2: float, Lam: float, cfg: QuadConfig | None = None) -> float:
    """``int exp(-W_tau(K1, K2, K) - K^{1/2}(Lambda^{1/2} + Lambda^{-1/2})) dlogK`` over ``K > 0``."""
    if not (K1 > 0 and K2 > 0 and Lam > 0):
        raise ParameterError("inputs must be positive")
    cfg = cfg or QuadConfig()
    c = math.sqrt(Lam) + 1.0 / math.sqrt(Lam)
    r1, r2 = math.sqrt(K1), math.sqrt(K2)

    def f(u):
        rk = np.exp(0.5 * u)
        # total potential of the triangle with sides K1, K2, K
        W = r1 * r2 / rk + rk * r2 / r1 + r1 * rk / r2
        return np.exp(-W - rk * c)

    u0 = math.log(r1 * r2)
    return integrate_line(f, cfg, center=u0).value


def vol_A11_neck(K1: float, K2: float, cfg: QuadConfig | None = None) -> float:
    """Neck-recursion value ``(1/2) * 2 * int_0^inf exp(-(K1^{1/2}+K2^{1/2}) 2cosh(l/2)) l dl``."""
    if not (K1 > 0 and K2 > 0):
        raise ParameterError("inputs must be positive")
    return exp_volume(DecoratedSurface(0, (1, 1)), [[K1], [K2]], cfg=cfg)


def trace_from_arcs(A, B, K1, K2):
    """``Lambda^{1/2} + Lambda^{-1/2}`` of the neck from the arc K-coordinates.

    Uses the orientation in which the trace and the triangle potentials
    ``W_tau(A, B, K_i)`` come from the same chart:
    ``(AB/(K1K2))^{1/2} + (A/B)^{1/2} + (B/A)^{1/2}``.
    """
    return np.sqrt(A * B / (K1 * K2)) + np.sqrt(A / B) + np.sqrt(B / A)


def trace_from_cluster(X, Y):
    """``(XY)^{-1/2}(1 + X + XY)``."""
    return (1 + X + X * Y) / np.sqrt(X * Y)


def vol_A11_unfold(K1: float, K2: float, cfg: QuadConfig | None = None) -> float:
    """Unfolded integral over the arc coordinates ``(A, B)``.

    ``int (AB/(K1K2))^{1/2} exp(-W_tau(A,B,K1) - W_tau(A,B,K2))
    / (Lambda^{1/2} - Lambda^{-1/2}) dlogA dlogB``, evaluated in
    ``p = log (A/B)^{1/2}``, ``q = log (AB)^{1/2}`` so that the
    integrable singularity at ``Lambda = 1`` sits at ``p = 0, q -> -inf``.
    """
    if not (K1 > 0 and K2 > 0):
        raise ParameterError("inputs must be positive")
    cfg = cfg or QuadConfig()
    r1, r2 = math.sqrt(K1), math.sqrt(K2)
    rs = r1 * r2
    a = 1.0 / r1 + 1.0 / r2
    c = r1 + r2

    def f(x):
        q, p = x[:, 0], x[:, 1]
        Q = np.exp(q)
        pref = Q / rs
        W = Q * a + c * 2.0 * np.cosh(p)
        tm2 = pref + (2.0 * np.sinh(0.5 * p)) ** 2
        tp2 = tm2 + 4.0
        # Jacobian dlogA dlogB = 2 dp dq
        return 2.0 * pref * np.exp(-W) / np.sqrt(tm2 * tp2)

    return integrate_box(f, 2, "line", cfg, [math.log(rs / (r1 + r2)), 0.0]).value


def a11_neck_unfold_ratio(grid: Sequence[tuple[float, float]], cfg: QuadConfig | None = None) -> dict:
    """Neck/unfold ratios over ``grid`` with their mean and coefficient of variation."""
    ratios = [vol_A11_neck(a, b, cfg) / vol_A11_unfold(a, b, cfg) for a, b in grid]
    mean = float(np.mean(ratios))
    cv = float(np.std(ratios) / abs(mean))
    return {"ratios": ratios, "mean": mean, "cv": cv}


def uff1_lhs(K1: float, K2: float, cfg: QuadConfig | None = None) -> float:
    """``int_0^inf K1^{1/2} 2sinh(l/2) exp(-(K1^{1/2}+K2^{1/2}) 2cosh(l/2)) l dl``."""
    r1, c = math.sqrt(K1), math.sqrt(K1) + math.sqrt(K2)

    def f(l):
        e = -c * 2.0 * np.cosh(0.5 * l)
        return r1 * (np.exp(e + 0.5 * l) - np.exp(e - 0.5 * l)) * l

    return integrate_halfline(f, cfg, center=1.0).value


def uff1_rhs(K1: float, K2: float, cfg: QuadConfig | None = None) -> float:
    """``2 K1^{1/2}/(K1^{1/2}+K2^{1/2}) int_R exp(-(K1^{1/2}+K2^{1/2})(e^l+e^{-l})) dl``."""
    r1, c = math.sqrt(K1), math.sqrt(K1) + math.sqrt(K2)
    inner = integrate_line(lambda l: np.exp(-c * 2.0 * np.cosh(l)), cfg).value
    return 2.0 * r1 / c * inner


def uff1_unfold(K1: float, K2: float) -> float:
    """Closed form of the unfolded ``(P, Q)`` integral: ``2 K2^{-1/2} J_0(c^2) / (K1^{-1/2}+K2^{-1/2})``."""
    r1, r2 = math.sqrt(K1), math.sqrt(K2)
    c = r1 + r2
    return 2.0 / r2 * bessel_J_series(0.0, c * c) / (1.0 / r1 + 1.0 / r2)
