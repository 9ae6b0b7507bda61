"""Cluster Poisson seeds and mutations, the Dehn twist on the annulus A_{1,1},
triangle and trouser-leg potentials, and McShane partial sums.

Variables may be floats or :class:`fractions.Fraction`; mutations use only
field operations and integer powers, so exact arithmetic is preserved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Sequence

from .core_types import ConvergenceError, ParameterError

__all__ = [
    "Seed", "mutate", "a11_seed", "a11_seed_from_length", "a11_invariants",
    "dehn_twist_A11", "dehn_twist_A11_inverse", "triangle_potential",
    "trouser_leg_potential", "TrianglePotentials", "TrouserLeg",
    "mcshane_terms_A11", "mcshane_partial_sum_A11",
]


@dataclass(frozen=True)
class Seed:
    """A cluster Poisson chart.

    Attributes
    ----------
    epsilon : tuple of tuples of int
        Skew-symmetric exchange matrix indexed by ``x`` followed by the
        frozen variables in ``frozen_names`` order.
    x : tuple
        Unfrozen variables.
    frozen_names : tuple of str
    frozen_values : tuple
    """

    epsilon: tuple[tuple[int, ...], ...]
    x: tuple
    frozen_names: tuple[str, ...] = ()
    frozen_values: tuple = ()

    def __post_init__(self):
        eps = tuple(tuple(int(v) for v in row) for row in self.epsilon)
        object.__setattr__(self, "epsilon", eps)
        object.__setattr__(self, "x", tuple(self.x))
        object.__setattr__(self, "frozen_names", tuple(self.frozen_names))
        object.__setattr__(self, "frozen_values", tuple(self.frozen_values))
        n = len(self.x) + len(self.frozen_values)
        if len(self.frozen_names) != len(self.frozen_values):
            raise ParameterError("frozen names and values differ in length")
        if len(eps) != n or any(len(row) != n for row in eps):
            raise ParameterError(f"exchange matrix must be {n}x{n}")
        for i in range(n):
            for j in range(n):
                if eps[i][j] != -eps[j][i]:
                    raise ParameterError("exchange matrix must be skew-symmetric")
        if any(not v > 0 for v in self.x + self.frozen_values):
            raise ParameterError("cluster variables must be positive")

    @property
    def rank(self) -> int:
        return len(self.x)

    @property
    def values(self) -> tuple:
        return self.x + self.frozen_values

    @property
    def frozen(self) -> dict:
        return dict(zip(self.frozen_names, self.frozen_values))

    def _rebuild(self, values, eps):
        r = self.rank
        return Seed(eps, values[:r], self.frozen_names, values[r:])

    def swap(self, i: int, j: int) -> "Seed":
        """Relabel unfrozen variables ``i`` and ``j``."""
        perm = list(range(len(self.values)))
        perm[i], perm[j] = perm[j], perm[i]
        vals = [self.values[p] for p in perm]
        eps = [[self.epsilon[perm[a]][perm[b]] for b in range(len(perm))] for a in range(len(perm))]
        return self._rebuild(tuple(vals), eps)


def _mutate_matrix(eps, k):
    n = len(eps)
    out = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i == k or j == k:
                out[i][j] = -eps[i][j]
            else:
                out[i][j] = eps[i][j] + (abs(eps[i][k]) * eps[k][j] + eps[i][k] * abs(eps[k][j])) // 2
    return out


def mutate(seed: Seed, k: int) -> Seed:
    """X-mutation at unfrozen index ``k``.

    ``X_k -> 1/X_k``; for ``j != k``, ``X_j -> X_j (1 + X_k)^e`` when
    ``e = eps[j][k] >= 0`` and ``X_j -> X_j (1 + 1/X_k)^e`` when ``e < 0``.
    Frozen variables transform by the same rule but are never mutated.
    """
    if not 0 <= k < seed.rank:
        raise ParameterError(f"index {k} is frozen or out of range")
    vals = list(seed.values)
    xk = vals[k]
    new = []
    for j, xj in enumerate(vals):
        if j == k:
            new.append(1 / xk)
            continue
        e = seed.epsilon[j][k]
        if e >= 0:
            new.append(xj * (1 + xk) ** e)
        else:
            new.append(xj * (1 + 1 / xk) ** e)
    return seed._rebuild(tuple(new), _mutate_matrix(seed.epsilon, k))


# ---------------------------------------------------------------------------
# Annulus A_{1,1}

_A11_EPS = ((0, 2, -1, -1),
            (-2, 0, 1, 1),
            (1, -1, 0, 0),
            (1, -1, 0, 0))


def a11_seed(X, Y, B1, B2) -> Seed:
    """A_{1,1} chart with variables ``(X, Y)`` and frozen ``B1, B2``.

    Signs are chosen so that ``K_i = B_i^2 X Y`` are Casimirs.
    """
    return Seed(_A11_EPS, (X, Y), ("B1", "B2"), (B1, B2))


def a11_seed_from_length(K1: float, K2: float, Lam: float) -> Seed:
    """Chart with ``sqrt(XY) = 1`` realizing neck length ``log(Lam)``."""
    if not (K1 > 0 and K2 > 0 and Lam >= 1):
        raise ParameterError("need K1, K2 > 0 and Lambda >= 1")
    t = math.sqrt(Lam) + 1.0 / math.sqrt(Lam)
    X = t - 2.0
    if X <= 0:
        raise ParameterError("Lambda = 1 is degenerate (zero neck length)")
    return a11_seed(X, 1.0 / X, math.sqrt(K1), math.sqrt(K2))


def _check_a11(seed: Seed):
    if seed.rank != 2 or seed.frozen_names != ("B1", "B2") or seed.epsilon != _A11_EPS:
        raise ParameterError("seed is not an A_{1,1} chart")


def a11_invariants(seed: Seed) -> dict:
    """``K1, K2``, the trace ``(XY)^{-1/2}(1+X+XY)`` and ``W1 = B1(1+X+XY)``."""
    _check_a11(seed)
    X, Y = seed.x
    B1, B2 = seed.frozen_values
    return {
        "K1": B1 * B1 * X * Y,
        "K2": B2 * B2 * X * Y,
        "trace": (1 + X + X * Y) / math.sqrt(X * Y),
        "W1": B1 * (1 + X + X * Y),
    }


def dehn_twist_A11(seed: Seed) -> Seed:
    """Flip at ``Y`` followed by exchanging ``X`` and ``Y``."""
    _check_a11(seed)
    return mutate(seed, 1).swap(0, 1)


def dehn_twist_A11_inverse(seed: Seed) -> Seed:
    _check_a11(seed)
    return mutate(seed.swap(0, 1), 1)


# ---------------------------------------------------------------------------
# Potentials


@dataclass(frozen=True)
class TrianglePotentials:
    K_a: float
    K_b: float
    K_p: float

    def __post_init__(self):
        if not (self.K_a > 0 and self.K_b > 0 and self.K_p > 0):
            raise ParameterError("triangle K-parameters must be positive")


@dataclass(frozen=True)
class TrouserLeg:
    K: float
    l: float

    def __post_init__(self):
        if not self.K > 0:
            raise ParameterError("K must be positive")


def triangle_potential(Ka, Kb=None, Kp=None):
    """Potential at vertex ``p`` and total potential of an ideal triangle.

    Accepts a :class:`TrianglePotentials` or three numbers (sides opposite
    vertices ``a``, ``b``, ``p``). Returns ``(W_p, W_total)``.
    """
    tp = Ka if isinstance(Ka, TrianglePotentials) else TrianglePotentials(Ka, Kb, Kp)
    a, b, p = tp.K_a, tp.K_b, tp.K_p
    wp = math.sqrt(a * b / p)
    return wp, wp + math.sqrt(p * b / a) + math.sqrt(a * p / b)


def trouser_leg_potential(K, l=None):
    """``(W, Q, R, R')`` for a trouser leg.

    ``W = K^{1/2}(Lambda^{1/2} + Lambda^{-1/2})``, ``Q = K^{1/2} Lambda^{-1/2}``,
    ``R = W`` and ``R' = K^{1/2}(Lambda^{1/2} - Lambda^{-1/2}) = R - 2Q``.
    """
    tl = K if isinstance(K, TrouserLeg) else TrouserLeg(K, l)
    rk = math.sqrt(tl.K)
    up, down = math.exp(tl.l / 2.0), math.exp(-tl.l / 2.0)
    W = rk * (up + down)
    Q = rk * down
    return W, Q, W, rk * (up - down)


# ---------------------------------------------------------------------------
# McShane sums on A_{1,1}


def mcshane_terms_A11(K1: float, K2: float, Lam: float, N: int) -> dict[int, float]:
    """Triangle terms ``W_{p,n}`` for ``|n| <= N``.

    Chart ``n`` (reached by ``n`` twists, negative ``n`` by inverse twists)
    has arcs with K-coordinates ``a_n = sqrt(K1 K2) X_n`` and
    ``a_{n+1} = sqrt(K1 K2) / Y_n``; the triangle cut out with its third side
    on the second boundary contributes ``sqrt(a_n a_{n+1} / K2)``.
    Iteration in a direction stops once its terms drop below double
    precision relative to the running total.
    """
    if int(N) != N or N < 0:
        raise ParameterError("N must be a nonnegative integer")
    seed0 = a11_seed_from_length(K1, K2, Lam)
    s = math.sqrt(K1 * K2)

    def term(seed):
        X, Y = seed.x
        if not (X > 0 and Y > 0 and math.isfinite(X) and math.isfinite(Y)):
            raise ConvergenceError("twist iteration left the positive chart")
        return triangle_potential(s * X, s / Y, K2)[0]

    terms = {0: term(seed0)}
    for step, sign in ((dehn_twist_A11, 1), (dehn_twist_A11_inverse, -1)):
        seed = seed0
        for n in range(1, N + 1):
            seed = step(seed)
            t = term(seed)
            terms[sign * n] = t
            if t < 1e-18 * terms[0]:
                for m in range(n + 1, N + 1):
                    terms[sign * m] = 0.0
                break
    return terms


def mcshane_partial_sum_A11(K1: float, K2: float, Lam: float, N: int) -> tuple[float, float]:
    """Partial McShane sum over ``|n| <= N`` and its target ``K1^{1/2}(Lambda^{1/2} - Lambda^{-1/2})``.

    ``Lambda = 1`` gives ``(0, 0)``.
    """
    if not (K1 > 0 and K2 > 0 and Lam >= 1):
        raise ParameterError("need K1, K2 > 0 and Lambda >= 1")
    target = math.sqrt(K1) * (math.sqrt(Lam) - 1.0 / math.sqrt(Lam))
    if Lam == 1:
        return 0.0, 0.0
    terms = mcshane_terms_A11(K1, K2, Lam, N)
    return math.fsum(terms.values()), target
