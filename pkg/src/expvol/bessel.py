"""Bessel kernel ``J_s(z) = int_0^inf exp(-sqrt(z)(t + 1/t)) t^s dt/t``.

``J_s(z) = 2 K_s(2 sqrt(z))`` where ``K`` is the modified Bessel function of
the second kind, implemented here from its power series (small argument) and
asymptotic expansion (large argument). The kernel is also computed by direct
quadrature; the public function evaluates both routes and checks them
against each other.
"""
from __future__ import annotations

import math
import warnings
from typing import Sequence

import numpy as np

from .core_types import ConsistencyError, ParameterError
from .quadrature import QuadConfig, integrate_line

__all__ = [
    "besselk", "besselk_series", "besselk_asymptotic", "bessel_J",
    "bessel_J_series", "bessel_J_quad", "bessel_J_logmoment", "bessel_product",
    "SWITCH_ARGUMENT",
]

SWITCH_ARGUMENT = 8.0   # measured crossover of the two branches' accuracy
_EULER_GAMMA = 0.57721566490153286061
_EPS = 2.0 ** -53


# ---------------------------------------------------------------------------
# 1/Gamma(1+x) near x = 0


def _zeta(k: int) -> float:
    """Riemann zeta at an integer ``k >= 2`` (Euler-Maclaurin, N = 16)."""
    N = 16
    s = math.fsum(n ** -float(k) for n in range(1, N))
    s += N ** (1.0 - k) / (k - 1) + 0.5 * N ** -float(k)
    # Bernoulli corrections B2, B4, B6, B8
    bern = (1 / 6, -1 / 30, 1 / 42, -1 / 30)
    rising = float(k)
    power = N ** (-k - 1.0)
    for j, b in enumerate(bern, start=1):
        s += b / math.factorial(2 * j) * rising * power
        rising *= (k + 2 * j - 1) * (k + 2 * j)
        power /= N * N
    return s


def _rgamma_coeffs(n: int = 30) -> list[float]:
    """Taylor coefficients of ``1/Gamma(1+x)`` at 0.

    ``log Gamma(1+x) = -gamma x + sum_{k>=2} (-1)^k zeta(k) x^k / k``, so
    ``1/Gamma(1+x) = exp(phi)`` with ``phi`` the negative of that series.
    """
    p = [0.0, _EULER_GAMMA] + [-((-1) ** k) * _zeta(k) / k for k in range(2, n + 1)]
    h = [1.0] + [0.0] * n
    for m in range(1, n + 1):
        h[m] = math.fsum(k * p[k] * h[m - k] for k in range(1, m + 1)) / m
    return h


_RG = _rgamma_coeffs()
_RG_EVEN = _RG[0::2]
_RG_ODD = _RG[1::2]


def _gam12(mu: float):
    """Return ``gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)`` for ``|mu| <= 1/2``.

    gam1 = (1/Gamma(1-mu) - 1/Gamma(1+mu)) / (2 mu)
    gam2 = (1/Gamma(1-mu) + 1/Gamma(1+mu)) / 2
    """
    m2 = mu * mu
    even = 0.0
    for c in reversed(_RG_EVEN):
        even = even * m2 + c
    odd = 0.0
    for c in reversed(_RG_ODD):
        odd = odd * m2 + c
    # 1/Gamma(1+mu) = even + mu*odd ; 1/Gamma(1-mu) = even - mu*odd
    return -odd, even, even + mu * odd, even - mu * odd


# ---------------------------------------------------------------------------
# K_nu


def _k_pair_series(mu: float, x: float):
    """``K_mu(x)`` and ``K_{mu+1}(x)`` for ``|mu| <= 1/2`` from the power series.

    This is the reflection form ``pi/(2 sin(mu pi)) (I_{-mu} - I_mu)``
    expanded term by term with the ``mu -> 0`` limit taken analytically, so
    integer orders reduce to the digamma series without cancellation in
    ``1/sin``.
    """
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _gam12(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    ee = math.exp(e)
    p = 0.5 * ee / gampl
    q = 0.5 / (ee * gammi)
    c = 1.0
    dd = x2 * x2
    total1 = p
    i = 0
    while True:
        i += 1
        ff = (i * ff + p + q) / (i * i - mu * mu)
        c *= dd / i
        p /= i - mu
        q /= i + mu
        term = c * ff
        total += term
        term1 = c * (p - i * ff)
        total1 += term1
        if abs(term) < abs(total) * _EPS * 0.5 and abs(term1) < abs(total1) * _EPS * 0.5:
            break
        if i > 500:
            raise ConsistencyError("K series failed to converge")
    return total, total1 * 2.0 / x


def _k_asymptotic(nu: float, x: float) -> float:
    """``K_nu(x)`` from the large-argument expansion, stopped at its smallest term."""
    mu4 = 4.0 * nu * nu
    total = 1.0
    term = 1.0
    k = 0
    while True:
        k += 1
        nxt = term * (mu4 - (2 * k - 1) ** 2) / (k * 8.0 * x)
        if abs(nxt) >= abs(term) or nxt == 0.0:
            if nxt == 0.0:
                total += nxt
            break
        term = nxt
        total += term
        if abs(term) < _EPS * 0.5 * abs(total):
            break
    return math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * total


def _recur_up(k0: float, k1: float, mu: float, x: float, n: int) -> float:
    """Apply ``K_{v+1} = K_{v-1} + 2v/x K_v`` starting from orders mu, mu+1."""
    if n == 0:
        return k0
    for j in range(1, n):
        k0, k1 = k1, k0 + 2.0 * (mu + j) / x * k1
    return k1


def _split_order(nu: float):
    nu = abs(float(nu))
    n = int(math.floor(nu + 0.5))
    return nu - n, n


def besselk_series(nu: float, x: float) -> float:
    """``K_nu(x)`` using the power series for the base orders."""
    if not x > 0:
        raise ParameterError("argument must be positive")
    mu, n = _split_order(nu)
    k0, k1 = _k_pair_series(mu, x)
    return _recur_up(k0, k1, mu, x, n)


def besselk_asymptotic(nu: float, x: float) -> float:
    """``K_nu(x)`` using the asymptotic expansion for the base orders."""
    if not x > 0:
        raise ParameterError("argument must be positive")
    mu, n = _split_order(nu)
    k0 = _k_asymptotic(mu, x)
    if n == 0:
        return k0
    return _recur_up(k0, _k_asymptotic(mu + 1.0, x), mu, x, n)


def besselk(nu: float, x: float) -> float:
    """Modified Bessel function of the second kind ``K_nu(x)`` for real ``nu``, ``x > 0``."""
    if not x > 0 or not math.isfinite(x):
        raise ParameterError("argument must be positive and finite")
    if x < SWITCH_ARGUMENT:
        return besselk_series(nu, x)
    return besselk_asymptotic(nu, x)


# ---------------------------------------------------------------------------
# J_s


def _check_z(z):
    if not (z > 0) or not math.isfinite(z):
        raise ParameterError(f"z must be positive and finite, got {z}")


def bessel_J_series(s: float, z: float) -> float:
    """``J_s(z)`` as ``2 K_s(2 sqrt(z))``."""
    _check_z(z)
    return 2.0 * besselk(s, 2.0 * math.sqrt(z))


def _kernel_cfg(cfg: QuadConfig | None) -> QuadConfig:
    cfg = cfg or QuadConfig()
    # values can be astronomically small; rely on the relative tolerance
    return QuadConfig(abs_tol=min(cfg.abs_tol, 1e-300), rel_tol=cfg.rel_tol,
                      max_subdivisions=cfg.max_subdivisions,
                      truncation_drop=cfg.truncation_drop,
                      nested_dim_cutoff=cfg.nested_dim_cutoff, seed=cfg.seed,
                      mc_samples=cfg.mc_samples)


def _saddle(s: float, z: float) -> float:
    # maximizer of s*u - 2 sqrt(z) cosh(u)
    return math.asinh(s / (2.0 * math.sqrt(z)))


def bessel_J_quad(s: float, z: float, cfg: QuadConfig | None = None, k: int = 0):
    """``int exp(-sqrt(z) 2 cosh u) e^{s u} u^k du`` by quadrature; returns an IntegralResult."""
    _check_z(z)
    rz = math.sqrt(z)
    s = float(s)

    def f(u):
        return np.exp(s * u - 2.0 * rz * np.cosh(u)) * u ** k

    return integrate_line(f, _kernel_cfg(cfg), center=_saddle(s, z))


def bessel_J(s: float, z: float, cfg: QuadConfig | None = None, check: bool = True,
             rtol: float = 1e-8) -> float:
    """Bessel kernel ``J_s(z)``.

    Parameters
    ----------
    s : float
        Order; the kernel is even in ``s``.
    z : float
        Positive argument.
    check : bool
        If true, also evaluate the defining integral by quadrature and
        require relative agreement ``rtol`` with the series route.

    Returns
    -------
    float
        The series/asymptotic value.

    Raises
    ------
    ParameterError
        If ``z <= 0``.
    ConsistencyError
        If the two routes disagree.
    """
    val = bessel_J_series(s, z)
    if check:
        q = bessel_J_quad(s, z, cfg).value
        if abs(q - val) > rtol * abs(val):
            raise ConsistencyError(
                f"J_{s}({z}): series {val!r} vs quadrature {q!r} differ beyond {rtol}")
    return val


def bessel_J_logmoment(s: float, z: float, k: int, cfg: QuadConfig | None = None) -> float:
    """``(d/ds)^k J_s(z)``, the k-th logarithmic moment of the kernel.

    Computed as ``int exp(-sqrt(z)(t + 1/t)) t^s (log t)^k dt/t``.
    """
    if k < 0 or int(k) != k:
        raise ParameterError("k must be a nonnegative integer")
    _check_z(z)
    if k == 0:
        return bessel_J(s, z, cfg, check=False)
    return bessel_J_quad(s, z, cfg, int(k)).value


def bessel_product(s: float, ks: Sequence[float], cfg: QuadConfig | None = None,
                   check: bool = False) -> float:
    """``prod_i J_s(ks[i])``. An empty sequence returns 1 with a warning."""
    ks = list(ks)
    if not ks:
        warnings.warn("empty K sequence; returning 1", RuntimeWarning, stacklevel=2)
        return 1.0
    out = 1.0
    for z in ks:
        out *= bessel_J(s, z, cfg, check=check)
    return out
