"""Exponential volumes and length moments of the crown ``D_n^*``.

Chart: cusps carry K-parameters ``K_1..K_n`` and the integration
coordinates are ``B_1..B_n > 0`` with potential ``W = sum(B_i + K_i/B_i)``.
The boundary length satisfies ``Lambda = e^l = prod(K) / prod(B)^2``.

At fixed ``l`` the volume integrates ``exp(-W)`` against
``dlogB_1 ... dlogB_{n-1}`` with ``B_n`` eliminated by the length relation.
Integrating over ``l`` as well turns ``dl`` into ``2 dlogB_n``, which is
where the factor 2 in the signed moments comes from.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Sequence

import numpy as np

from .bessel import bessel_J_logmoment, bessel_J_series
from .core_types import ConsistencyError, ParameterError
from .quadrature import (IntegralResult, ProductProposal, QuadConfig, integrate_box,
                         integrate_halfline, integrate_line, integrate_mc)

__all__ = [
    "CrownChart", "crown_potential", "crown_volume", "crown_volume_result",
    "crown_volume_n2_closed", "crown_moment_halfline", "crown_signed_moment",
    "operator_signed_moment", "bessel_product_derivative", "v2_bound",
]


@dataclass(frozen=True)
class CrownChart:
    """K-parameters of a crown together with integration coordinates ``B``."""

    K: tuple[float, ...]
    B: tuple[float, ...]

    def __post_init__(self):
        if len(self.K) != len(self.B) or not self.K:
            raise ParameterError("K and B must be nonempty and of equal length")
        if any(not x > 0 for x in self.K + self.B):
            raise ParameterError("K and B must be positive")

    @property
    def n(self) -> int:
        return len(self.K)

    @property
    def Lambda(self) -> float:
        return math.prod(self.K) / math.prod(self.B) ** 2

    def potential(self) -> float:
        return crown_potential(self.K, self.B)


def crown_potential(K: Sequence[float], B: Sequence[float]) -> float:
    """``W = sum(B_i + K_i / B_i)``; minimal value ``2 sum sqrt(K_i)`` at ``B = sqrt(K)``."""
    return float(sum(b + k / b for k, b in zip(K, B)))


def _check(n, K):
    K = tuple(float(k) for k in K)
    if n < 1 or len(K) != n:
        raise ParameterError(f"need n >= 1 and exactly n K-parameters, got n={n}, K={K}")
    if any(not (k > 0) or not math.isfinite(k) for k in K):
        raise ParameterError("K-parameters must be positive and finite")
    return K


def _length(l=None, Lam=None) -> float:
    if (l is None) == (Lam is None):
        raise ParameterError("give exactly one of l and Lambda")
    if Lam is not None:
        if not Lam > 0:
            raise ParameterError("Lambda must be positive")
        return math.log(Lam)
    return float(l)


def crown_volume_n2_closed(K: Sequence[float], l: float) -> float:
    """Closed form ``J_0(K1 + K2 + sqrt(K1 K2)(Lambda^{1/2} + Lambda^{-1/2}))`` for ``n = 2``."""
    K1, K2 = K
    z = K1 + K2 + math.sqrt(K1 * K2) * 2.0 * math.cosh(l / 2.0)
    return bessel_J_series(0.0, z)


def _fixed_length_integrand(K, l):
    K = np.asarray(K)
    logc = 0.5 * np.log(K).sum() - 0.5 * l
    Kh, Kn = K[:-1], K[-1]

    def f(u):
        lbn = logc - u.sum(axis=1)
        W = (np.exp(u) + Kh * np.exp(-u)).sum(axis=1) + np.exp(lbn) + Kn * np.exp(-lbn)
        return np.exp(-W)

    return f


def crown_volume_result(n: int, K: Sequence[float], l: float | None = None,
                        Lam: float | None = None, cfg: QuadConfig | None = None) -> IntegralResult:
    """Fixed-length crown volume as an :class:`IntegralResult` (see :func:`crown_volume`)."""
    K = _check(n, K)
    l = _length(l, Lam)
    cfg = cfg or QuadConfig()
    if n == 1:
        v = math.exp(-math.sqrt(K[0]) * 2.0 * math.cosh(l / 2.0))
        return IntegralResult(v, 0.0, 1, "closed_form")
    f = _fixed_length_integrand(K, l)
    centres = [0.5 * math.log(k) for k in K[:-1]]
    if n - 1 <= cfg.nested_dim_cutoff:
        return integrate_box(f, n - 1, "line", cfg, centres)
    prop = ProductProposal(tuple(centres), ("line",) * (n - 1), 1.0)
    return integrate_mc(f, prop, cfg.mc_samples, cfg=cfg)


def crown_volume(n: int, K: Sequence[float], l: float | None = None, Lam: float | None = None,
                 cfg: QuadConfig | None = None, check_closed_form: bool = True,
                 rtol: float = 1e-6) -> float:
    """Exponential volume of ``D_n^*`` at fixed boundary length.

    Parameters
    ----------
    n : int
        Number of cusps.
    K : sequence of float
        Positive K-parameters, one per cusp.
    l, Lam : float
        Boundary length or ``Lambda = e^l`` (exactly one).
    check_closed_form : bool
        For ``n = 2`` compare the quadrature against the Bessel closed form.

    Returns
    -------
    float
        ``int exp(-W) dlogB_1 ... dlogB_{n-1}``; for ``n = 1`` the closed form
        ``exp(-K^{1/2}(Lambda^{1/2} + Lambda^{-1/2}))``.
    """
    res = crown_volume_result(n, K, l, Lam, cfg)
    if n == 2 and check_closed_form:
        ll = _length(l, Lam)
        ref = crown_volume_n2_closed(K, ll)
        if abs(res.value - ref) > rtol * abs(ref) + res.error_estimate:
            raise ConsistencyError(f"n=2 crown volume {res.value!r} vs closed form {ref!r}")
    return res.value


def v2_bound(K: Sequence[float]) -> float:
    """Upper bound ``2 prod_{i<n} J_0(K_i)`` for the fixed-length crown volume."""
    return 2.0 * math.prod(bessel_J_series(0.0, k) for k in K[:-1])


def _moment_integrand(K, k, s=0.0, signed=False, hbar=1.0):
    K = np.asarray(K)
    logP = np.log(K).sum()
    ih = 1.0 / hbar

    if signed:
        # unconstrained B-space: l = log prod K - 2 sum u
        def f(u):
            L = logP - 2.0 * u.sum(axis=1)
            W = (np.exp(u) + K * np.exp(-u)).sum(axis=1) * ih
            return 2.0 * np.exp(-W - 0.5 * s * L) * L ** k
        return f

    logc0 = 0.5 * logP
    Kh, Kn = K[:-1], K[-1]

    def f(x):
        # x[:, 0] = l > 0, x[:, 1:] = log B_1 .. log B_{n-1}
        L = x[:, 0]
        u = x[:, 1:]
        lbn = logc0 - 0.5 * L - u.sum(axis=1)
        W = ((np.exp(u) + Kh * np.exp(-u)).sum(axis=1) + np.exp(lbn) + Kn * np.exp(-lbn)) * ih
        return np.exp(-W - 0.5 * s * L) * L ** k

    return f


def _check_k_hbar(k, hbar):
    if k < 0 or int(k) != k:
        raise ParameterError("k must be a nonnegative integer")
    if not hbar > 0:
        raise ParameterError("hbar must be positive")


def crown_moment_halfline(n: int, K: Sequence[float], k: int,
                          cfg: QuadConfig | None = None, s: float = 0.0,
                          hbar: float = 1.0) -> IntegralResult:
    """``int_0^inf Vol(D_n^*)(K, l) e^{-ls/2} l^k dl``.

    The integration runs over ``{B > 0 : prod(B) <= sqrt(prod(K))}``,
    parametrized by ``l > 0`` and ``log B_1 .. log B_{n-1}``. Negative ``s``
    is allowed since the volume decays faster than any exponential in ``l``.
    With ``hbar != 1`` the potential is replaced by ``W / hbar``.
    """
    K = _check(n, K)
    _check_k_hbar(k, hbar)
    cfg = cfg or QuadConfig()
    s = float(s)
    if n == 1:
        rk = math.sqrt(K[0]) / hbar
        return integrate_halfline(
            lambda L: np.exp(-rk * 2.0 * np.cosh(L / 2.0) - 0.5 * s * L) * L ** k, cfg,
            center=max(1.0, float(k)))
    f = _moment_integrand(K, int(k), s, hbar=hbar)
    centres = [max(1.0, float(k))] + [0.5 * math.log(x) for x in K[:-1]]
    doms = ["halfline"] + ["line"] * (n - 1)
    if n <= cfg.nested_dim_cutoff:
        return integrate_box(f, n, doms, cfg, centres)
    prop = ProductProposal(tuple(centres), tuple(doms), 1.0)
    return integrate_mc(f, prop, cfg.mc_samples, cfg=cfg)


def crown_signed_moment(n: int, K: Sequence[float], s: float, k: int,
                        cfg: QuadConfig | None = None, hbar: float = 1.0) -> IntegralResult:
    """``int_R Vol(D_n^*)(K, l) e^{-ls/2} l^k dl`` as an unconstrained B-space integral.

    ``hbar`` rescales the potential to ``W / hbar``.
    """
    K = _check(n, K)
    _check_k_hbar(k, hbar)
    cfg = cfg or QuadConfig()
    s = float(s)
    f = _moment_integrand(K, int(k), s, signed=True, hbar=hbar)
    # saddle of (B + K/B)/hbar - s log B, in log B
    centres = [math.log(hbar * (s + math.sqrt(s * s + 4 * x / hbar ** 2)) / 2.0) for x in K]
    if n <= cfg.nested_dim_cutoff:
        if n == 1:
            return integrate_line(lambda u: f(u[:, None]), cfg, center=centres[0])
        return integrate_box(f, n, "line", cfg, centres)
    prop = ProductProposal(tuple(centres), ("line",) * n, 1.0)
    return integrate_mc(f, prop, cfg.mc_samples, cfg=cfg)


@lru_cache(maxsize=4096)
def _logmoment(s: float, z: float, j: int) -> float:
    return bessel_J_logmoment(s, z, j)


def _compositions(k: int, parts: int):
    if parts == 1:
        yield (k,)
        return
    for first in range(k + 1):
        for rest in _compositions(k - first, parts - 1):
            yield (first,) + rest


def bessel_product_derivative(s: float, K: Sequence[float], k: int) -> float:
    """``(d/ds)^k prod_i J_s(K_i)`` by the multinomial rule over log-moments."""
    K = [float(x) for x in K]
    total = 0.0
    for alpha in _compositions(k, len(K)):
        coef = math.factorial(k)
        term = 1.0
        for a, z in zip(alpha, K):
            coef //= math.factorial(a)
            term *= _logmoment(float(s), z, a)
        total += coef * term
    return total


def operator_signed_moment(K: Sequence[float], s: float, k: int) -> float:
    """``2 (-2 d/ds)^k prod_i J_s(K_i)``."""
    return 2.0 * (-2.0) ** k * bessel_product_derivative(s, K, k)
