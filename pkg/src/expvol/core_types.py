"""Surface combinatorics, parameter containers, volume polynomials and
recursion constants.

Everything here is immutable. Exact rationals (``fractions.Fraction``) are
kept for polynomial coefficients until a float is requested.
"""
from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Iterable, Mapping, Sequence


class ExpVolError(Exception):
    """Base class for library errors."""


class ParameterError(ExpVolError, ValueError):
    """Invalid input parameters."""


class DataError(ExpVolError):
    """Missing or malformed data table entry."""


class EvaluationError(ExpVolError, ArithmeticError):
    """An integrand or proposal returned a non-finite or invalid value."""


class ConvergenceError(ExpVolError):
    """A numerical procedure failed to reach its tolerance.

    Attributes
    ----------
    estimate : float or None
        Best available estimate at the time of failure.
    error_estimate : float or None
        Error estimate attached to ``estimate``.
    """

    def __init__(self, message: str, estimate: float | None = None,
                 error_estimate: float | None = None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate


class DivergenceError(ExpVolError):
    """The requested integral diverges (e.g. a pole of a Laplace factor)."""


class ConsistencyError(ExpVolError):
    """Two independent computation routes disagree beyond tolerance."""


# ---------------------------------------------------------------------------
# Surfaces and parameters


@dataclass(frozen=True)
class DecoratedSurface:
    """Oriented surface with boundary components carrying marked points.

    Parameters
    ----------
    genus : int
    boundaries : tuple of int
        Marked points per boundary component. ``0`` means a geodesic
        circle (or puncture); a positive count means a crown.
    """

    genus: int
    boundaries: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "boundaries", tuple(int(b) for b in self.boundaries))
        if self.genus < 0 or any(b < 0 for b in self.boundaries):
            raise ParameterError("genus and marked-point counts must be nonnegative")

    @property
    def m(self) -> int:
        return len(self.boundaries)

    @property
    def crowns(self) -> tuple[int, ...]:
        """Indices of boundary components that carry marked points."""
        return tuple(i for i, n in enumerate(self.boundaries) if n > 0)

    @property
    def circles(self) -> tuple[int, ...]:
        return tuple(i for i, n in enumerate(self.boundaries) if n == 0)

    @property
    def r(self) -> int:
        return len(self.crowns)

    @property
    def n_marked(self) -> int:
        return sum(self.boundaries)

    def internal_arcs(self) -> int:
        """Number of internal arcs of an ideal triangulation."""
        return 6 * self.genus - 6 + 3 * self.m + self.n_marked

    def moduli_dimension(self) -> int:
        """Dimension of the moduli space with every K and every circle length fixed.

        Internal arcs carry the free coordinates; each geodesic circle
        removes one through its fixed length.
        """
        return self.internal_arcs() - len(self.circles)

    def label(self) -> str:
        return f"g={self.genus};b={','.join(map(str, self.boundaries))}"

    @classmethod
    def crown(cls, n: int) -> "DecoratedSurface":
        """The punctured disc with ``n`` cusps on its outer boundary."""
        return cls(0, (n, 0))


def validate_surface(s: DecoratedSurface) -> bool:
    """Return True iff ``s`` admits an ideal hyperbolic structure.

    Excludes the closed sphere, discs with fewer than three marked points,
    and the annulus with two unmarked boundaries.
    """
    if not isinstance(s, DecoratedSurface) or s.m < 1:
        return False
    if s.internal_arcs() < 0:
        return False
    if s.genus == 0 and s.m == 2 and s.n_marked == 0:
        return False
    return True


@dataclass(frozen=True)
class CrownParams:
    """Positive K-parameters, one tuple per crown."""

    K: tuple[tuple[float, ...], ...]

    def __post_init__(self):
        K = tuple(tuple(float(k) for k in ks) for ks in self.K)
        for ks in K:
            if not ks or any(not (k > 0) or not math.isfinite(k) for k in ks):
                raise ParameterError(f"K-parameters must be positive and finite, got {ks}")
        object.__setattr__(self, "K", K)

    def __len__(self):
        return len(self.K)

    def __getitem__(self, i):
        return self.K[i]


@dataclass(frozen=True)
class BoundaryLengths:
    """Boundary lengths ``l_j``; ``Lambda_j = exp(l_j)``."""

    l: tuple[float, ...]

    def __post_init__(self):
        l = tuple(float(x) for x in self.l)
        if any(not math.isfinite(x) for x in l):
            raise ParameterError("lengths must be finite")
        object.__setattr__(self, "l", l)

    @classmethod
    def from_Lambda(cls, Lam: Iterable[float]) -> "BoundaryLengths":
        Lam = tuple(Lam)
        if any(not (x > 0) for x in Lam):
            raise ParameterError("Lambda must be positive")
        return cls(tuple(math.log(x) for x in Lam))

    @property
    def Lambda(self) -> tuple[float, ...]:
        return tuple(math.exp(x) for x in self.l)

    def __len__(self):
        return len(self.l)


# ---------------------------------------------------------------------------
# Volume polynomials


@dataclass(frozen=True)
class VolumePolynomial:
    """Even polynomial in boundary lengths with pi-graded rational coefficients.

    ``terms`` maps an exponent tuple ``d`` to ``(rational, pi_power)``; the
    monomial is ``rational * pi**pi_power * prod(l_j**(2 d_j))``.
    """

    g: int
    m: int
    terms: Mapping[tuple[int, ...], tuple[Fraction, int]] = field(default_factory=dict)

    def __post_init__(self):
        top = 3 * self.g - 3 + self.m
        if top < 0:
            raise DataError(f"no volume polynomial for (g, m) = ({self.g}, {self.m})")
        for d, (q, p) in self.terms.items():
            if len(d) != self.m:
                raise DataError(f"exponent {d} has wrong arity for m={self.m}")
            if any(x < 0 for x in d) or sum(d) > top:
                raise DataError(f"exponent {d} out of range (total degree <= {top})")
            if p != 2 * (top - sum(d)):
                raise DataError(f"coefficient of {d} has pi power {p}, expected {2 * (top - sum(d))}")
            if not isinstance(q, Fraction):
                raise DataError("coefficients must be exact rationals")

    @property
    def top_degree(self) -> int:
        """Largest ``|d|``, equal to ``3g - 3 + m``."""
        return 3 * self.g - 3 + self.m

    def coefficient(self, d: Sequence[int]) -> float:
        q, p = self.terms.get(tuple(d), (Fraction(0), 0))
        return float(q) * math.pi ** p

    def items(self):
        """Yield ``(d, float coefficient)`` pairs."""
        for d, (q, p) in sorted(self.terms.items()):
            yield d, float(q) * math.pi ** p

    @classmethod
    def from_json(cls, obj: Mapping) -> "VolumePolynomial":
        try:
            g, m = int(obj["g"]), int(obj["m"])
            terms = {}
            for t in obj["terms"]:
                d = tuple(int(x) for x in t["d"])
                if d in terms:
                    raise DataError(f"duplicate exponent {d}")
                terms[d] = (Fraction(t["rational"]), int(t["pi_power"]))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise DataError(f"malformed volume polynomial entry: {exc}") from exc
        return cls(g, m, terms)


def eval_volume_polynomial(p: VolumePolynomial, lengths: BoundaryLengths | Sequence[float]) -> float:
    """Evaluate ``p`` at the given boundary lengths."""
    l = lengths.l if isinstance(lengths, BoundaryLengths) else tuple(lengths)
    if len(l) != p.m:
        raise ParameterError(f"expected {p.m} lengths, got {len(l)}")
    total = 0.0
    for d, c in p.items():
        total += c * math.prod(x ** (2 * k) for x, k in zip(l, d))
    return total


def _data_text(name: str) -> str:
    root = os.environ.get("EXPVOL_DATA")
    if root:
        path = root if os.path.isfile(root) and name == "volume_polynomials.json" else os.path.join(root, name)
        if os.path.isfile(path):
            with open(path, encoding="utf-8") as fh:
                return fh.read()
    return resources.files("expvol").joinpath("data").joinpath(name).read_text(encoding="utf-8")


def load_volume_table() -> dict[tuple[int, int], VolumePolynomial]:
    """Load the volume-polynomial table.

    The environment variable ``EXPVOL_DATA`` may point at a replacement JSON
    file or at a directory containing ``volume_polynomials.json``. Entries
    failing the grading checks raise :class:`DataError`.
    """
    raw = json.loads(_data_text("volume_polynomials.json"))
    table = {}
    for entry in raw:
        vp = VolumePolynomial.from_json(entry)
        if (vp.g, vp.m) in table:
            raise DataError(f"duplicate table entry ({vp.g}, {vp.m})")
        table[(vp.g, vp.m)] = vp
    return table


def volume_polynomial(g: int, m: int) -> VolumePolynomial:
    try:
        return load_volume_table()[(g, m)]
    except KeyError:
        raise DataError(f"volume polynomial V_({g},{m}) is not in the table") from None


# ---------------------------------------------------------------------------
# Recursion constants


@dataclass(frozen=True)
class RecursionConstants:
    """Normalization constants of the neck recursion.

    Parameters
    ----------
    c_overrides : mapping
        ``(g, m) -> c`` for the per-cut constant of a surface with genus
        ``g`` and ``m`` boundary components. Surfaces absent from the table
        use ``2 ** (#components after cut - #components before)``.
    d_overrides : mapping
        ``(g, m) -> d_S``. Spheres with only circle boundaries default to
        ``2 ** -(m - 3)``; everything else defaults to 1.
    """

    c_overrides: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)
    d_overrides: Mapping[tuple[int, int], Fraction] = field(default_factory=dict)

    @classmethod
    def default(cls) -> "RecursionConstants":
        raw = json.loads(_data_text("constants.json"))

        def parse(block):
            out = {}
            for key, val in block.items():
                g, m = (int(x) for x in key.split(","))
                out[(g, m)] = Fraction(val)
            return out

        return cls(parse(raw.get("c_overrides", {})), parse(raw.get("d_overrides", {})))

    def with_c(self, g: int, m: int, value) -> "RecursionConstants":
        c = dict(self.c_overrides)
        c[(g, m)] = Fraction(value)
        return RecursionConstants(c, self.d_overrides)

    def conjectured_c(self, s: DecoratedSurface) -> Fraction:
        # cutting one crown off along its neck leaves two components
        return Fraction(2) ** (2 - 1)

    def c(self, s: DecoratedSurface) -> Fraction:
        return self.c_overrides.get((s.genus, s.m), self.conjectured_c(s))

    def d_S(self, s: DecoratedSurface) -> Fraction:
        if (s.genus, s.m) in self.d_overrides:
            return self.d_overrides[(s.genus, s.m)]
        if s.genus == 0 and s.n_marked == 0 and s.m >= 3:
            return Fraction(1, 2 ** (s.m - 3))
        return Fraction(1)


def tori_cut_off(s: DecoratedSurface, cut: int) -> int:
    """Number of one-holed tori produced by cutting the neck of crown ``cut``."""
    return 1 if (s.genus, s.m) == (1, 1) else 0


def cutting_constant(s: DecoratedSurface, cut: int,
                     constants: RecursionConstants | None = None) -> Fraction:
    """Constant ``2**-mu * c`` attached to the neck cut of crown ``cut``.

    Parameters
    ----------
    s : DecoratedSurface
    cut : int
        Boundary index of the crown whose neck is cut.
    constants : RecursionConstants, optional
        Defaults to :meth:`RecursionConstants.default`.

    Raises
    ------
    ParameterError
        If ``cut`` is not a crown of ``s``.
    """
    if not validate_surface(s):
        raise ParameterError(f"surface {s.label()} is not hyperbolic")
    if cut not in s.crowns:
        raise ParameterError(f"boundary {cut} of {s.label()} is not a crown")
    constants = constants or RecursionConstants.default()
    mu = tori_cut_off(s, cut)
    return Fraction(1, 2 ** mu) * constants.c(s)


def surface_constant(s: DecoratedSurface, constants: RecursionConstants | None = None) -> Fraction:
    """Product of the cutting constants over all crowns."""
    constants = constants or RecursionConstants.default()
    out = Fraction(1)
    for i in s.crowns:
        out *= cutting_constant(s, i, constants)
    return out
