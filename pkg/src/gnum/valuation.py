"""The sharp valuation, norm and ultrametric.

On the oscillator-free fragment everything is exact: a norm is carried as
its exponent (``||x|| = exp(-V(x))``), so products, maxima and comparisons
never touch floating point.  Other germs fall back to the sampled
regression of :mod:`gnum.oracle` and carry a confidence band.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import total_ordering

import mpmath

from .errors import Inconclusive, NotNormalizable, PreconditionError
from .germ import Germ
from .normal import INF, NormalForm, exact_valuation, normalize


def as_normal(x) -> NormalForm:
    if isinstance(x, NormalForm):
        return x
    if isinstance(x, Germ):
        return normalize(x)
    return NormalForm.const(x)


def _sub(x, y):
    if isinstance(x, NormalForm) or isinstance(y, NormalForm):
        return as_normal(x) - as_normal(y)
    return x - y


@dataclass(frozen=True)
class Valuation:
    value: object                  # Fraction or math.inf
    mode: str = "exact"
    band: float = 0.0
    grid: dict | None = field(default=None, compare=False)

    @property
    def is_infinite(self):
        return self.value == INF

    def to_json(self):
        out = {"valuation": "inf" if self.is_infinite else str(self.value), "mode": self.mode}
        if self.mode == "sampled":
            out["band"] = self.band
        return out


def valuation(x) -> Valuation:
    """``V(x)``: exact for normalizable germs, otherwise a sampled estimate."""
    try:
        nf = as_normal(x)
    except NotNormalizable:
        from .oracle import SampleGrid, sampled_valuation
        grid = SampleGrid.default()
        est, band = sampled_valuation(x, grid)
        return Valuation(est, "sampled", band, grid.to_json())
    return Valuation(exact_valuation(nf))


@total_ordering
@dataclass(frozen=True)
class SharpNorm:
    """``exp(-exponent)``, compared exactly through the exponent."""

    exponent: object               # Fraction or math.inf
    mode: str = "exact"
    band: float = 0.0

    @property
    def value(self) -> float:
        return 0.0 if self.exponent == INF else math.exp(-self.exponent)

    @property
    def interval(self):
        if self.exponent == INF:
            return 0.0, 0.0
        return math.exp(-(self.exponent + self.band)), math.exp(-(self.exponent - self.band))

    def __float__(self):
        return self.value

    def __mul__(self, other):
        if isinstance(other, SharpNorm):
            return SharpNorm(self.exponent + other.exponent, _mode(self, other),
                             self.band + other.band)
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, SharpNorm):
            return self.exponent == other.exponent
        return _cmp_number(self.exponent, other) == 0

    def __lt__(self, other):
        if isinstance(other, SharpNorm):
            return self.exponent > other.exponent
        return _cmp_number(self.exponent, other) < 0

    def __hash__(self):
        return hash(self.exponent)

    def to_json(self, key="norm"):
        out = {key: self.value, "exponent": "inf" if self.exponent == INF else str(self.exponent),
               "mode": self.mode}
        if self.mode == "sampled":
            out["interval"] = list(self.interval)
        return out


def _mode(*norms):
    return "sampled" if any(n.mode == "sampled" for n in norms) else "exact"


def _cmp_number(exponent, number) -> int:
    """Sign of ``exp(-exponent) - number`` for a real ``number``.

    For rational ``exponent != 0`` the power of e is transcendental, so a
    rational ``number`` can never tie with it and a high-precision
    comparison settles the sign.
    """
    number = Fraction(number)
    if exponent == INF:
        return (number < 0) - (number > 0)
    if exponent == 0:
        return (1 > number) - (1 < number)
    if number <= 0:
        return 1
    with mpmath.workdps(60):
        lhs = -mpmath.mpf(exponent.numerator) / exponent.denominator
        rhs = mpmath.log(mpmath.mpf(number.numerator) / number.denominator)
        return (lhs > rhs) - (lhs < rhs)


def e_pow(k) -> SharpNorm:
    """The constant ``exp(-k)`` as an exact norm value."""
    return SharpNorm(INF if k == INF else Fraction(k))


def norm(x) -> SharpNorm:
    v = valuation(x)
    return SharpNorm(v.value, v.mode, v.band)


def dist(x, y) -> SharpNorm:
    return norm(_sub(x, y))


def a_set_contains(x, r) -> bool:
    """Whether ``r`` lies in A(x), i.e. ``eps**-r * x(phi_eps) -> 0``."""
    r = Fraction(r)
    v = valuation(x)
    if v.mode == "exact":
        return r < v.value
    if v.is_infinite or r < v.value - v.band:
        return True
    if r > v.value + v.band:
        return False
    raise Inconclusive(f"r={r} lies inside the sampled band {v.value}±{v.band:.3g}")


def ball_contains(center, radius, x, closed=False):
    """``D(center, x) < radius`` (``<=`` when ``closed``); None if undecided."""
    if (isinstance(radius, SharpNorm) and radius.exponent == INF) or (
            not isinstance(radius, SharpNorm) and radius <= 0):
        raise PreconditionError("radius must be positive")
    d = dist(center, x)
    if d.mode == "exact":
        return d <= radius if closed else d < radius
    lo, hi = d.interval
    r = float(radius)
    if (hi <= r) if closed else (hi < r):
        return True
    if (lo > r) if closed else (lo >= r):
        return False
    return None


@dataclass(frozen=True)
class GeometricInverse:
    y: NormalForm
    bound: SharpNorm        # exp(-N * V(x))
    residual: SharpNorm     # ||(1 - x) * y - 1||, computed exactly


def geometric_inverse(x, n_terms: int) -> GeometricInverse:
    """Partial sum ``y_N = sum_{n<N} x**n`` of the inverse of ``1 - x``."""
    try:
        nf = as_normal(x)
    except NotNormalizable:
        raise PreconditionError("geometric inversion needs an exact norm") from None
    v = exact_valuation(nf)
    if v <= 0:
        raise PreconditionError("geometric inversion needs ||x|| < 1")
    if n_terms < 1:
        raise PreconditionError("need at least one term")
    y, power = NormalForm.const(0), NormalForm.const(1)
    for _ in range(n_terms):
        y = y + power
        power = power * nf
    residual = norm((1 - nf) * y - 1)
    return GeometricInverse(y, SharpNorm(INF if v == INF else n_terms * v), residual)
