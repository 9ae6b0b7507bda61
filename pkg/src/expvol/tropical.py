"""Tropical limits of crown volumes: polytope volumes and length moments.

Tropicalizing ``B_i = e^{t b_i}``, ``K_i = e^{t kappa_i}`` turns ``exp(-W)``
into the indicator of the box ``kappa_i <= b_i <= 0`` and the length into
``l = sum(kappa_i - 2 b_i)``. Each summand is uniform on
``[-|kappa_i|, |kappa_i|]`` when ``b`` is uniform on the box, so every
moment is an exact piecewise-polynomial integral.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .core_types import (DecoratedSurface, ParameterError, RecursionConstants,
                         surface_constant, volume_polynomial)
from .quadrature import IntegralResult

__all__ = [
    "HPolytope", "TropicalCrownParams", "tropical_crown_volume", "tropical_crown_moment",
    "tropical_slice", "tropical_crown_polytope", "tropical_length_polytope",
    "polytope_volume_mc", "tropical_exp_volume", "v_star", "kontsevich_check_g1n1",
    "tropical_limit_n2",
]


@dataclass(frozen=True)
class HPolytope:
    """``{x in R^k : A x <= b}``.

    Attributes
    ----------
    A : tuple of tuples
        Constraint normals, each of length ``k``.
    b : tuple
        Offsets.
    """

    A: tuple
    b: tuple

    def __post_init__(self):
        A = tuple(tuple(float(v) for v in row) for row in self.A)
        b = tuple(float(v) for v in self.b)
        if not A or len(A) != len(b):
            raise ParameterError("need as many offsets as constraints")
        k = len(A[0])
        if k == 0 or any(len(row) != k for row in A):
            raise ParameterError("constraint arity must equal the dimension")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)

    @property
    def dimension(self) -> int:
        return len(self.A[0])

    def contains(self, x: np.ndarray, tol: float = 0.0) -> np.ndarray:
        x = np.atleast_2d(x)
        return np.all(x @ np.asarray(self.A).T <= np.asarray(self.b) + tol, axis=1)

    def to_json(self) -> dict:
        return {"A": [list(r) for r in self.A], "b": list(self.b)}

    @classmethod
    def from_json(cls, obj) -> "HPolytope":
        return cls(obj["A"], obj["b"])

    @classmethod
    def box(cls, lo: Sequence[float], hi: Sequence[float]) -> "HPolytope":
        k = len(lo)
        A, b = [], []
        for i in range(k):
            e = [0.0] * k
            e[i] = 1.0
            A.append(tuple(e)); b.append(hi[i])
            A.append(tuple(-v for v in e)); b.append(-lo[i])
        return cls(A, b)


@dataclass(frozen=True)
class TropicalCrownParams:
    kappa: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "kappa", tuple(float(k) for k in self.kappa))
        if not self.kappa:
            raise ParameterError("need at least one tropical K-parameter")

    @property
    def feasible(self) -> bool:
        return all(k <= 0 for k in self.kappa)


# ---------------------------------------------------------------------------
# crown volumes and moments


def tropical_crown_volume(kappa: Sequence[float]) -> float:
    """``2 prod |kappa_i|`` when every ``kappa_i <= 0``, else 0."""
    p = TropicalCrownParams(tuple(kappa))
    if not p.feasible:
        return 0.0
    return 2.0 * math.prod(-k for k in p.kappa)


def _poly_mul(p, q):
    out = [Fraction(0)] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        for j, b in enumerate(q):
            out[i + j] += a * b
    return out


def _binom_poly(shift: Fraction, deg: int):
    """Coefficients of ``(y - shift)^deg`` in ascending powers of ``y``."""
    return [Fraction(math.comb(deg, j)) * (-shift) ** (deg - j) for j in range(deg + 1)]


def _poly_integral(p, lo: Fraction, hi: Fraction) -> Fraction:
    return sum(c * (hi ** (j + 1) - lo ** (j + 1)) / (j + 1) for j, c in enumerate(p))


def _exact_moment(a: Sequence[Fraction], d: int) -> Fraction:
    """``prod(a) * E[S^d ; S >= 0]`` times 2, with ``S`` a sum of uniforms on ``[-a_i, a_i]``.

    Uses ``Y = S + sum(a)``, whose density is
    ``sum_J (-1)^|J| (y - 2 sum_J a)_+^{n-1} / ((n-1)! prod(2 a))``.
    """
    n = len(a)
    A = sum(a)
    total = Fraction(0)
    for r in range(n + 1):
        for J in itertools.combinations(range(n), r):
            sig = 2 * sum((a[j] for j in J), Fraction(0))
            lo = max(A, sig)
            hi = 2 * A
            if lo >= hi:
                continue
            poly = _poly_mul(_binom_poly(A, d), _binom_poly(sig, n - 1))
            total += (-1) ** r * _poly_integral(poly, lo, hi)
    # prod(a) * density normalisation 1/((n-1)! prod(2a)) = 1/((n-1)! 2^n)
    return 2 * total / (math.factorial(n - 1) * 2 ** n)


def tropical_crown_moment(kappa: Sequence[float], d: int, method: str = "exact",
                          n_samples: int = 200_000, seed: int = 12345):
    """``int_0^inf Vol^t(kappa, l) l^d dl``.

    Parameters
    ----------
    kappa : sequence of float
        Tropical K-parameters, all ``<= 0``.
    d : int
        Moment degree.
    method : {'exact', 'mc'}
        ``'exact'`` evaluates the piecewise-polynomial integral in rational
        arithmetic (floats convert to rationals exactly) and returns a float;
        ``'mc'`` returns an :class:`IntegralResult` from uniform sampling of
        the box.
    """
    p = TropicalCrownParams(tuple(kappa))
    if not p.feasible:
        raise ParameterError("tropical moments need all kappa <= 0")
    if d < 0 or int(d) != d:
        raise ParameterError("d must be a nonnegative integer")
    a = [-k for k in p.kappa]
    if method == "exact":
        if any(x == 0 for x in a):
            return 0.0
        return float(_exact_moment([Fraction(x) for x in a], int(d)))
    if method != "mc":
        raise ParameterError(f"unknown method {method!r}")
    rng = np.random.default_rng(seed)
    a_arr = np.asarray(a)
    x = rng.uniform(-1.0, 1.0, size=(n_samples, len(a))) * a_arr
    S = x.sum(axis=1)
    vals = np.where(S >= 0, S, 0.0) ** d * (S >= 0)
    scale = 2.0 * float(np.prod(a_arr))
    return IntegralResult(scale * float(vals.mean()),
                          scale * float(vals.std(ddof=1) / math.sqrt(n_samples)),
                          n_samples, "mc_box")


def tropical_slice(kappa: Sequence[float], l: float) -> float:
    """Fixed-length tropical volume ``Vol^t(kappa, l)``.

    The ``(n-1)``-dimensional measure of ``{kappa_i <= b_i <= 0,
    sum(kappa) - 2 sum(b) = l}`` in ``b_1..b_{n-1}``; integrates over ``l``
    to :func:`tropical_crown_volume`.
    """
    p = TropicalCrownParams(tuple(kappa))
    if not p.feasible:
        return 0.0
    a = [-k for k in p.kappa]
    n = len(a)
    if any(x == 0 for x in a):
        return 0.0
    A = sum(a)
    y = float(l) + A
    if not 0 <= y <= 2 * A:
        return 0.0
    dens = 0.0
    for r in range(n + 1):
        for J in itertools.combinations(range(n), r):
            sig = 2 * sum(a[j] for j in J)
            if y > sig:
                dens += (-1) ** r * (y - sig) ** (n - 1)
    dens /= math.factorial(n - 1) * 2 ** n
    return 2.0 * dens


# ---------------------------------------------------------------------------
# polytopes and Monte Carlo volumes


def tropical_crown_polytope(kappa: Sequence[float]) -> HPolytope:
    """The box ``kappa_i <= b_i <= 0`` in ``R^n``."""
    kap = [float(k) for k in kappa]
    return HPolytope.box(kap, [0.0] * len(kap))


def tropical_length_polytope(kappa: Sequence[float], nonnegative_length: bool = True) -> HPolytope:
    """Crown region in the coordinates ``(l, b_1..b_{n-1})``.

    ``kappa_i <= b_i <= 0`` for ``i < n`` and
    ``sum(kappa) <= l + 2 sum(b_{<n}) <= sum(kappa) - 2 kappa_n``, plus
    ``l >= 0`` when ``nonnegative_length``. Without the sign condition its
    volume is :func:`tropical_crown_volume`; with it, the ``d = 0`` moment.
    """
    kap = [float(k) for k in kappa]
    n = len(kap)
    A, b = [], []
    if nonnegative_length:
        row = [0.0] * n
        row[0] = -1.0
        A.append(tuple(row)); b.append(0.0)
    for i in range(1, n):
        e = [0.0] * n
        e[i] = 1.0
        A.append(tuple(e)); b.append(0.0)
        A.append(tuple(-v for v in e)); b.append(-kap[i - 1])
    tot = sum(kap)
    s = [1.0] + [2.0] * (n - 1)
    A.append(tuple(s)); b.append(tot - 2 * kap[-1])
    A.append(tuple(-v for v in s)); b.append(-tot)
    return HPolytope(A, b)


def _vertices(A: np.ndarray, b: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    m, k = A.shape
    out = []
    for idx in itertools.combinations(range(m), k):
        M = A[list(idx)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        v = np.linalg.solve(M, b[list(idx)])
        if np.all(A @ v <= b + tol * (1 + np.abs(b))):
            out.append(v)
    return np.array(out).reshape(-1, k)


def polytope_bounds(p: HPolytope) -> tuple[np.ndarray, np.ndarray]:
    """Bounding box of ``p`` from its vertices.

    Boundedness is checked first: the recession cone ``{A d <= 0}`` cut by
    the unit cube must have only the zero vertex.

    Raises
    ------
    ParameterError
        If the polytope is unbounded or empty.
    """
    A = np.asarray(p.A)
    b = np.asarray(p.b)
    k = p.dimension
    eye = np.eye(k)
    cone_A = np.vstack([A, eye, -eye])
    cone_b = np.concatenate([np.zeros(len(A)), np.ones(k), np.ones(k)])
    cone_v = _vertices(cone_A, cone_b)
    if cone_v.size and np.max(np.abs(cone_v)) > 1e-9:
        raise ParameterError("polytope is unbounded")
    V = _vertices(A, b)
    if not V.size:
        raise ParameterError("polytope is empty or lower-dimensional")
    return V.min(axis=0), V.max(axis=0)


def polytope_volume_mc(p: HPolytope, n: int = 200_000, seed: int = 12345) -> IntegralResult:
    """Lebesgue volume of ``p`` by rejection sampling from its bounding box."""
    lo, hi = polytope_bounds(p)
    width = hi - lo
    box = float(np.prod(width))
    if box == 0.0:
        return IntegralResult(0.0, 0.0, 0, "mc_rejection")
    rng = np.random.default_rng(seed)
    hits = 0
    done = 0
    chunk = 100_000
    while done < n:
        m = min(chunk, n - done)
        x = lo + rng.random((m, p.dimension)) * width
        hits += int(p.contains(x).sum())
        done += m
    frac = hits / n
    se = box * math.sqrt(max(frac * (1 - frac), 1.0 / n) / n)
    return IntegralResult(box * frac, se, n, "mc_rejection")


# ---------------------------------------------------------------------------
# tropical neck recursion


def v_star(g: int, m: int) -> dict[tuple[int, ...], Fraction]:
    """Top-degree coefficients ``2^|d| |d|! / prod(d_i!) * V_d``.

    Only rational coefficients (no power of pi) occur in top degree.
    """
    poly = volume_polynomial(g, m)
    top = poly.top_degree
    out = {}
    for d, (frac, pi_pow) in poly.terms.items():
        if sum(d) != top:
            continue
        if pi_pow:
            raise ParameterError("top-degree coefficient carries a power of pi")
        out[tuple(d)] = Fraction(2 ** top * math.factorial(top),
                                 math.prod(math.factorial(x) for x in d)) * frac
    return out


def tropical_exp_volume(surf: DecoratedSurface, kappa: Sequence[Sequence[float]],
                        constants: RecursionConstants | None = None) -> float:
    """``C_S sum_{|d| top} V*_d prod_j tropical_crown_moment(kappa_j, 2 d_j + 1)``.

    Every boundary component must be a crown.
    """
    if surf.r != surf.m:
        raise ParameterError("tropical exponential volumes need every boundary to be a crown")
    if surf.genus == 0 and surf.m <= 2:
        raise ParameterError("crown discs and annuli have no tropical volume polynomial")
    kap = [tuple(k) for k in kappa]
    if len(kap) != surf.m or any(len(k) != n for k, n in zip(kap, surf.boundaries)):
        raise ParameterError("kappa must give one parameter per cusp of every crown")
    C = surface_constant(surf, constants)
    total = 0.0
    for d, coef in v_star(surf.genus, surf.m).items():
        term = float(C * coef)
        for kj, dj in zip(kap, d):
            term *= tropical_crown_moment(kj, 2 * dj + 1)
        total += term
    return total


def kontsevich_check_g1n1(constants: RecursionConstants | None = None) -> dict:
    """Compare the one-holed torus top coefficient with ``int psi_1 = 1/24``.

    Report only; the relative power of two is left for the caller to inspect.
    """
    constants = constants or RecursionConstants.default()
    surf = DecoratedSurface(1, (0,))
    g, d = 1, 1
    vs = v_star(1, 1)[(1,)]
    rho = Fraction(4) ** d * Fraction(1, 2 ** g)
    d_S = constants.d_S(surf)
    recovered = d_S * vs
    target = Fraction(1, 24)
    ratio = recovered / target
    log2 = math.log2(ratio) if ratio > 0 else float("nan")
    return {
        "psi_target": target, "V_star": vs, "rho_S": rho, "d_S": d_S,
        "recovered": recovered, "ratio": ratio,
        "ratio_is_power_of_two": float(log2).is_integer(),
    }


def tropical_limit_n2(kappa: Sequence[float], l: float, ts: Sequence[float] = (5.0, 10.0, 20.0),
                      cfg=None) -> dict:
    """Rescaled classical ``n = 2`` crown volumes approaching the tropical slice.

    ``Vol(D_2^*)(e^{kappa t}; Lambda = e^{l t}) / t`` for each ``t``; the last
    two are combined by Richardson extrapolation assuming an ``O(1/t)`` error.
    """
    from .crown import crown_volume

    k1, k2 = (float(k) for k in kappa)
    vals = []
    for t in ts:
        K = [math.exp(k1 * t), math.exp(k2 * t)]
        vals.append(crown_volume(2, K, l=l * t, cfg=cfg) / t)
    t1, t2 = ts[-2], ts[-1]
    rich = (t2 * vals[-1] - t1 * vals[-2]) / (t2 - t1)
    return {"t": list(ts), "rescaled": vals, "richardson": rich,
            "tropical": tropical_slice(kappa, l)}
