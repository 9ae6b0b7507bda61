"""Adaptive integration on half-lines, lines and boxes, plus importance-sampled
Monte Carlo.

All semi-infinite integrals are mapped to the real line by ``t = exp(u)``.
The real line is truncated by scanning outward from a centre on a doubling
grid until the integrand falls below ``truncation_drop`` times its peak; the
truncated interval is then integrated by a vectorized adaptive
Gauss-Kronrod (7/15) rule. Box integrals nest the 1-D solver, treating every
outer node as an independent member of a batched inner problem.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

import numpy as np
from numpy.polynomial import legendre as _leg

from .core_types import ConvergenceError, EvaluationError, ParameterError

__all__ = [
    "QuadConfig", "IntegralResult", "integrate_halfline", "integrate_line",
    "integrate_box", "integrate_mc", "integrate_auto", "ProductProposal",
]


@dataclass(frozen=True)
class QuadConfig:
    """Tolerances and limits for the integrators.

    Attributes
    ----------
    abs_tol, rel_tol : float
        A result is accepted once its error estimate is below
        ``max(abs_tol, rel_tol * |value|)``.
    max_subdivisions : int
        Bisections allowed per member integral before giving up.
    truncation_drop : float
        Tails where the integrand is below ``truncation_drop * peak`` are cut.
    nested_dim_cutoff : int
        Largest dimension handled by nested quadrature.
    seed : int
        Seed for Monte Carlo.
    mc_samples : int
        Default Monte Carlo sample count.
    """

    abs_tol: float = 1e-14
    rel_tol: float = 1e-10
    max_subdivisions: int = 2000
    truncation_drop: float = 1e-18
    nested_dim_cutoff: int = 4
    seed: int = 12345
    mc_samples: int = 200_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ParameterError("tolerances must be positive")
        if not (0 < self.truncation_drop < 1):
            raise ParameterError("truncation_drop must lie in (0, 1)")
        if self.nested_dim_cutoff < 1 or self.max_subdivisions < 1:
            raise ParameterError("nested_dim_cutoff and max_subdivisions must be >= 1")

    def tightened(self, factor: float) -> "QuadConfig":
        return replace(self, abs_tol=self.abs_tol / factor, rel_tol=self.rel_tol / factor)


@dataclass(frozen=True)
class IntegralResult:
    value: float
    error_estimate: float
    evaluations: int
    method_tag: str = "nested"

    def __float__(self):
        return float(self.value)


# ---------------------------------------------------------------------------
# Gauss-Kronrod rule


def _kronrod(n: int):
    """Nodes and weights of the (n, 2n+1) Gauss-Kronrod pair on [-1, 1].

    The Kronrod nodes are the roots of the Stieltjes polynomial, found by
    imposing orthogonality against P_n * P_k in the Legendre basis; weights
    follow from exactness on P_0..P_2n.
    """
    xg, wg = _leg.leggauss(n)
    X, W = _leg.leggauss(3 * n + 5)
    basis = [_leg.legval(X, [0] * j + [1]) for j in range(n + 2)]
    A = np.array([[np.sum(W * basis[n] * basis[j] * basis[k]) for j in range(n + 1)]
                  for k in range(n + 1)])
    rhs = -np.array([np.sum(W * basis[n] * basis[n + 1] * basis[k]) for k in range(n + 1)])
    c = np.linalg.lstsq(A, rhs, rcond=None)[0]
    roots = np.real(_leg.legroots(np.append(c, 1.0)))
    x = np.sort(np.concatenate([xg, roots]))
    V = np.array([_leg.legval(x, [0] * k + [1]) for k in range(2 * n + 1)])
    rhs = np.zeros(2 * n + 1)
    rhs[0] = 2.0
    wk = np.linalg.solve(V, rhs)
    wg_full = np.zeros_like(x)
    for xi, wi in zip(xg, wg):
        wg_full[np.argmin(np.abs(x - xi))] = wi
    return x, wk, wg_full


_XK, _WK, _WG = _kronrod(7)
_NPTS = _XK.size
_EPS = np.finfo(float).eps
_N_INIT = 8
_CHUNK = 2_000_000
_SCAN_BASE = 0.25 * 2.0 ** np.arange(9)          # 0.25 .. 64
_SCAN_EXTRA = 0.25 * 2.0 ** np.arange(9, 13)     # 128 .. 1024


def _check_finite(v, where):
    if not np.all(np.isfinite(v)):
        raise EvaluationError(f"non-finite integrand value {where}")


def _eval_intervals(g, mem, a, b):
    """Apply G7K15 to intervals ``[a, b]`` of members ``mem``."""
    c = 0.5 * (a + b)
    h = 0.5 * (b - a)
    x = c[:, None] + h[:, None] * _XK[None, :]
    fv, fe = g(np.repeat(mem, _NPTS), x.ravel())
    fv = fv.reshape(x.shape)
    _check_finite(fv, "during adaptive refinement")
    K = h * (fv @ _WK)
    G = h * (fv @ _WG)
    resabs = h * (np.abs(fv) @ _WK)
    resasc = h * (np.abs(fv - (K / np.where(h > 0, 2 * h, 1.0))[:, None]) @ _WK)
    err = np.abs(K - G)
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = resasc * np.minimum(1.0, (200.0 * err / resasc) ** 1.5)
    err = np.where((resasc > 0) & (err > 0), scaled, err)
    floor = 50 * _EPS * resabs
    limited = err <= floor
    err = np.maximum(err, floor)
    inner = h * (fe.reshape(x.shape) @ _WK) if fe is not None else np.zeros_like(K)
    return K, err, inner, limited


def _scan_bounds(g, centre, drop):
    """Choose per-member truncation intervals.

    Returns ``(lo, hi, tail, evals)``. The grid is rescanned once around the
    largest sampled value so that off-centre peaks are bracketed.
    """
    M = centre.size
    offs = np.concatenate([-_SCAN_BASE[::-1], [0.0], _SCAN_BASE])
    evals = 0
    for _ in range(2):
        u = centre[:, None] + offs[None, :]
        v, _e = g(np.repeat(np.arange(M), offs.size), u.ravel())
        evals += u.size
        v = np.abs(v.reshape(u.shape))
        _check_finite(v, "during truncation scan")
        best = np.argmax(v, axis=1)
        centre = u[np.arange(M), best]
    peak = v.max(axis=1)
    thr = drop * peak
    mid = _SCAN_BASE.size
    lo = np.empty(M)
    hi = np.empty(M)
    tail = np.zeros(M)
    for side, sign in ((slice(mid + 1, None), 1.0), (slice(mid - 1, None, -1), -1.0)):
        vs = v[:, side]                                     # increasing distance
        sig = vs > thr[:, None]
        any_sig = sig.any(axis=1)
        last = np.where(any_sig, vs.shape[1] - 1 - np.argmax(sig[:, ::-1], axis=1), -1)
        bound_idx = last + 1
        far = bound_idx >= _SCAN_BASE.size
        dist = np.where(bound_idx < _SCAN_BASE.size,
                        _SCAN_BASE[np.minimum(bound_idx, _SCAN_BASE.size - 1)], np.nan)
        bval = np.where(far, 0.0, vs[np.arange(M), np.minimum(bound_idx, vs.shape[1] - 1)])
        if far.any():
            idx = np.nonzero(far)[0]
            dist_far = np.full(idx.size, np.nan)
            bval_far = np.zeros(idx.size)
            active = np.ones(idx.size, bool)
            for step in _SCAN_EXTRA:
                if not active.any():
                    break
                ia = idx[active]
                uu = centre[ia] + sign * step
                vv, _e = g(ia, uu)
                evals += ia.size
                vv = np.abs(vv)
                _check_finite(vv, "during truncation scan")
                done = vv <= thr[ia]
                pos = np.nonzero(active)[0]
                dist_far[pos[done]] = step
                bval_far[pos[done]] = vv[done]
                active[pos[done]] = False
            if active.any():
                raise ConvergenceError("integrand does not decay within the scan range")
            dist[idx] = dist_far
            bval[idx] = bval_far
        if sign > 0:
            hi = centre + dist
        else:
            lo = centre - dist
        tail += bval * dist
    zero = peak == 0
    lo[zero] = centre[zero] - 0.25
    hi[zero] = centre[zero] + 0.25
    return lo, hi, tail, evals


def _solve_members(g, lo, hi, cfg: QuadConfig, axis: int = 0):
    """Adaptive integration of every member over its own interval.

    ``g(mem, u)`` returns ``(values, inner_errors_or_None)``.
    Returns ``(values, quad_errors, inner_errors, evaluations)``.
    """
    M = lo.size
    width = hi - lo
    grid = np.linspace(0.0, 1.0, _N_INIT + 1)
    edges = lo[:, None] + width[:, None] * grid[None, :]
    mem = np.repeat(np.arange(M), _N_INIT)
    a = edges[:, :-1].ravel()
    b = edges[:, 1:].ravel()
    val, err, inn, lim = _eval_intervals(g, mem, a, b)
    evals = a.size * _NPTS
    nsub = np.zeros(M, dtype=int)
    while True:
        tot = np.bincount(mem, val, M)
        etot = np.bincount(mem, err, M)
        tol = np.maximum(cfg.abs_tol, cfg.rel_tol * np.abs(tot))
        # rounding floors cannot be reduced by bisection; only the rest counts
        reducible = np.bincount(mem, np.where(lim, 0.0, err), M)
        bad = (etot > tol) & (reducible > 0.5 * tol)
        if not bad.any():
            break
        tiny = (b - a) <= 1e-13 * (np.abs(a) + np.abs(b) + 1.0)
        can = ~(tiny | lim)
        share = tol[mem] * (b - a) / np.where(width[mem] > 0, width[mem], 1.0)
        split = bad[mem] & can & (err > 0.5 * share)
        # always split the worst splittable interval of each failing member
        order = np.lexsort((-np.where(can, err, -1.0), mem))
        first = np.ones(order.size, bool)
        first[1:] = mem[order][1:] != mem[order][:-1]
        worst = order[first]
        split[worst[bad[mem[worst]] & can[worst]]] = True
        stuck = bad & (np.bincount(mem, split, M) == 0)
        counts = nsub + np.bincount(mem, split, M).astype(int)
        over = bad & (counts > cfg.max_subdivisions)
        if stuck.any() or over.any():
            i = int(np.nonzero(stuck | over)[0][0])
            raise ConvergenceError(
                f"axis {axis}: tolerance not met within {cfg.max_subdivisions} subdivisions",
                estimate=float(tot[i]), error_estimate=float(etot[i]))
        nsub = counts
        keep = ~split
        sm, sa, sb = mem[split], a[split], b[split]
        mid = 0.5 * (sa + sb)
        nm = np.concatenate([sm, sm])
        na = np.concatenate([sa, mid])
        nb = np.concatenate([mid, sb])
        nv, ne, ni, nl = _eval_intervals(g, nm, na, nb)
        evals += na.size * _NPTS
        mem = np.concatenate([mem[keep], nm])
        a = np.concatenate([a[keep], na])
        b = np.concatenate([b[keep], nb])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        inn = np.concatenate([inn[keep], ni])
        lim = np.concatenate([lim[keep], nl])
    return (np.bincount(mem, val, M), np.bincount(mem, err, M),
            np.bincount(mem, np.abs(inn), M), evals)


# ---------------------------------------------------------------------------
# Public 1-D integrators


def _vectorize_scalar(f: Callable) -> Callable:
    state = {}

    def F(x):
        if state.get("loop"):
            return np.array([float(f(v)) for v in x])
        try:
            y = np.asarray(f(x), dtype=float)
            if y.shape == x.shape:
                return y
        except (TypeError, ValueError):
            pass
        state["loop"] = True
        return np.array([float(f(v)) for v in x])

    return F


def _integrate_1d(g_u, centre: float, cfg: QuadConfig) -> IntegralResult:
    def g(mem, u):
        with np.errstate(over="ignore", under="ignore"):
            return g_u(u), None

    lo, hi, tail, ev0 = _scan_bounds(g, np.array([float(centre)]), cfg.truncation_drop)
    val, err, _inn, ev1 = _solve_members(g, lo, hi, cfg)
    return IntegralResult(float(val[0]), float(err[0] + tail[0]), int(ev0 + ev1), "nested")


def integrate_halfline(f: Callable, cfg: QuadConfig | None = None, center: float = 1.0) -> IntegralResult:
    """Integrate ``f`` over ``(0, inf)``.

    Parameters
    ----------
    f : callable
        Integrand; vectorized callables are used directly, scalar ones are
        looped.
    cfg : QuadConfig, optional
    center : float
        A point near the bulk of the integrand (in ``t``), used to start the
        truncation scan.

    Raises
    ------
    EvaluationError
        If ``f`` returns a non-finite value.
    ConvergenceError
        If the tolerance is not met; carries the best estimate.
    """
    cfg = cfg or QuadConfig()
    if not center > 0:
        raise ParameterError("center must be positive for a half-line integral")
    F = _vectorize_scalar(f)

    def g_u(u):
        t = np.exp(u)
        return F(t) * t

    return _integrate_1d(g_u, math.log(center), cfg)


def integrate_line(f: Callable, cfg: QuadConfig | None = None, center: float = 0.0) -> IntegralResult:
    """Integrate ``f`` over the whole real line (see :func:`integrate_halfline`)."""
    cfg = cfg or QuadConfig()
    F = _vectorize_scalar(f)
    return _integrate_1d(F, center, cfg)


# ---------------------------------------------------------------------------
# Box integrals


def _vectorize_rows(f: Callable, k: int) -> Callable:
    state = {}

    def F(x):
        if not state.get("loop"):
            try:
                y = np.asarray(f(x), dtype=float)
                if y.shape == (x.shape[0],):
                    return y
            except (TypeError, ValueError, IndexError):
                pass
            state["loop"] = True
        return np.array([float(f(row)) for row in x])

    return F


def _nested_level(F, prefix, j, k, centres, cfgs, evals):
    """Integrate axes ``j..k-1`` for each row of ``prefix``."""
    M = prefix.shape[0]
    cfg = cfgs[j]
    per_member = (2 * _NPTS * _N_INIT) ** (k - j)
    step = max(1, int(_CHUNK // per_member))
    if M > step:
        parts = [_nested_level(F, prefix[i:i + step], j, k, centres, cfgs, evals)
                 for i in range(0, M, step)]
        return tuple(np.concatenate(p) for p in zip(*parts))

    if j == k - 1:
        def g(mem, u):
            pts = np.column_stack([prefix[mem], u])
            out = np.empty(u.size)
            for s in range(0, u.size, _CHUNK):
                with np.errstate(over="ignore", under="ignore"):
                    out[s:s + _CHUNK] = F(pts[s:s + _CHUNK])
            evals[0] += u.size
            return out, None
    else:
        def g(mem, u):
            pts = np.column_stack([prefix[mem], u])
            v, e = _nested_level(F, pts, j + 1, k, centres, cfgs, evals)
            return v, e

    try:
        lo, hi, tail, _ = _scan_bounds(g, np.full(M, centres[j]), cfg.truncation_drop)
        val, err, inner, _ = _solve_members(g, lo, hi, cfg, axis=j)
    except ConvergenceError as exc:
        if str(exc).startswith("axis"):
            raise
        raise ConvergenceError(f"axis {j}: {exc}", exc.estimate, exc.error_estimate) from exc
    except EvaluationError as exc:
        raise EvaluationError(f"axis {j}: {exc}") from exc
    return val, err + inner + tail


def integrate_box(f: Callable, dims: int, domains: Sequence[str] | str = "halfline",
                  cfg: QuadConfig | None = None,
                  centers: Sequence[float] | None = None) -> IntegralResult:
    """Nested integration of ``f`` over a product of half-lines and lines.

    Parameters
    ----------
    f : callable
        Takes an ``(N, dims)`` array and returns ``N`` values.
    dims : int
        Number of axes; must not exceed ``cfg.nested_dim_cutoff``.
    domains : str or sequence of str
        ``"halfline"`` for ``(0, inf)`` or ``"line"`` per axis.
    centers : sequence of float, optional
        Scan centres per axis, in the original coordinates.

    Notes
    -----
    Inner integrals run with tolerances divided by ``dims``. The returned
    error estimate adds the integrated inner error to the outer one.
    """
    cfg = cfg or QuadConfig()
    k = int(dims)
    if k < 1:
        raise ParameterError("dims must be >= 1")
    if k > cfg.nested_dim_cutoff:
        raise ParameterError(f"{k} dimensions exceed nested_dim_cutoff={cfg.nested_dim_cutoff}")
    doms = [domains] * k if isinstance(domains, str) else list(domains)
    if len(doms) != k or any(d not in ("halfline", "line") for d in doms):
        raise ParameterError("domains must be 'halfline' or 'line' per axis")
    if centers is None:
        centers = [1.0 if d == "halfline" else 0.0 for d in doms]
    half = np.array([d == "halfline" for d in doms])
    cu = []
    for c, h in zip(centers, half):
        if h and not c > 0:
            raise ParameterError("half-line centres must be positive")
        cu.append(math.log(c) if h else float(c))
    Fr = _vectorize_rows(f, k)

    def F(u):
        x = np.where(half[None, :], np.exp(u), u)
        jac = np.exp(u[:, half].sum(axis=1)) if half.any() else 1.0
        return Fr(x) * jac

    cfgs = [cfg] + [cfg.tightened(k)] * (k - 1)
    evals = [0]
    val, err = _nested_level(F, np.empty((1, 0)), 0, k, cu, cfgs, evals)
    return IntegralResult(float(val[0]), float(err[0]), int(evals[0]), "nested")


# ---------------------------------------------------------------------------
# Monte Carlo


@dataclass(frozen=True)
class ProductProposal:
    """Independent per-axis logistic proposal.

    Line axes are logistic with location ``centers[i]``; half-line axes are
    logistic in ``log x`` with median ``centers[i]``. ``sigma`` is the scale.
    Logistic tails keep the weights' variance finite for any integrand
    decaying faster than ``exp(-|u| / sigma)``, which includes ``x f(x)``
    near ``x = 0`` for bounded ``f`` when ``sigma >= 1``.
    """

    centers: tuple[float, ...]
    domains: tuple[str, ...]
    sigma: float = 1.0

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        k = len(self.centers)
        z = rng.logistic(0.0, self.sigma, (n, k))
        out = np.empty((n, k))
        for i, (c, d) in enumerate(zip(self.centers, self.domains)):
            out[:, i] = c * np.exp(z[:, i]) if d == "halfline" else c + z[:, i]
        return out

    def _logistic(self, z):
        e = np.exp(-np.abs(z) / self.sigma)
        return e / (self.sigma * (1.0 + e) ** 2)

    def density(self, x: np.ndarray) -> np.ndarray:
        x = np.atleast_2d(x)
        dens = np.ones(x.shape[0])
        for i, (c, d) in enumerate(zip(self.centers, self.domains)):
            if d == "halfline":
                with np.errstate(divide="ignore", invalid="ignore"):
                    y = np.log(x[:, i] / c)
                    dens *= np.where(x[:, i] > 0, self._logistic(y) / x[:, i], 0.0)
            else:
                dens *= self._logistic(x[:, i] - c)
        return dens


def integrate_mc(f: Callable, proposal, n: int, seed: int | None = None,
                 cfg: QuadConfig | None = None) -> IntegralResult:
    """Importance-sampling estimate of ``integral f`` with standard error.

    ``proposal`` needs ``sample(rng, n)`` and ``density(x)`` methods.

    Raises
    ------
    EvaluationError
        If the proposal density is not positive at a sampled point or ``f``
        is not finite there.
    """
    cfg = cfg or QuadConfig()
    n = int(n)
    if n < 2:
        raise ParameterError("need at least two samples")
    rng = np.random.default_rng(cfg.seed if seed is None else seed)
    x = proposal.sample(rng, n)
    q = np.asarray(proposal.density(x), dtype=float)
    if np.any(~(q > 0)) or not np.all(np.isfinite(q)):
        raise EvaluationError("proposal density is not positive at a sampled point")
    k = x.shape[1]
    with np.errstate(over="ignore", under="ignore"):
        fx = _vectorize_rows(f, k)(x)
    _check_finite(fx, "in Monte Carlo sample")
    w = fx / q
    mean = float(np.mean(w))
    se = float(np.std(w, ddof=1) / math.sqrt(n))
    return IntegralResult(mean, se, n, "monte_carlo")


def integrate_auto(f: Callable, dims: int, domains: Sequence[str] | str = "halfline",
                   cfg: QuadConfig | None = None, centers: Sequence[float] | None = None,
                   sigma: float = 1.0) -> IntegralResult:
    """Nested quadrature up to ``nested_dim_cutoff`` dimensions, Monte Carlo beyond."""
    cfg = cfg or QuadConfig()
    if dims <= cfg.nested_dim_cutoff:
        return integrate_box(f, dims, domains, cfg, centers)
    doms = (domains,) * dims if isinstance(domains, str) else tuple(domains)
    if centers is None:
        centers = [1.0 if d == "halfline" else 0.0 for d in doms]
    prop = ProductProposal(tuple(float(c) for c in centers), doms, sigma)
    return integrate_mc(f, prop, cfg.mc_samples, cfg=cfg)
