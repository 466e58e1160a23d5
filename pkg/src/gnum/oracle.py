"""Brute-force numerical cross-checks of the exact machinery.

Samples are taken along *tracks*: a fixed level ``q``, base diameter
``iota``, offset ``o`` and residue class ``j`` of ``k`` modulo the track
period, with ``eps = o * 2**-k``.  Dyadic classes whose modulus divides the
period, and the geometric sequences with ratio ``2**-s`` (for offset 1),
have constant membership along a track, so each track sees a single
generalized polynomial and the least-squares slope of ``log|x|`` against
``log eps`` estimates its leading exponent.  The valuation estimate is the
smallest slope over all tracks.
"""
from __future__ import annotations

import json
import math
import statistics
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

from . import scalars as S
from .germ import MAX_BITS, Germ, _ev
from .normal import INF, NormalForm
from .testpoint import TestPoint

TOLERANCE = 0.05
_REL_WIDTH = 1e-9


@dataclass(frozen=True)
class SampleGrid:
    levels: tuple = (0, 3, 6)
    iotas: tuple = (Fraction(1), Fraction(1, 2))
    k_min: int = 4
    k_max: int = 24
    offsets: tuple = (Fraction(1), Fraction(3, 4))
    period: int = 6
    max_bits: int = MAX_BITS

    def __post_init__(self):
        object.__setattr__(self, "iotas", tuple(Fraction(i) for i in self.iotas))
        object.__setattr__(self, "offsets", tuple(Fraction(o) for o in self.offsets))
        if not (self.levels and self.iotas and self.offsets):
            raise ValueError("sample grid must be nonempty")
        if not self.k_min < self.k_max:
            raise ValueError("k range must be strictly increasing")
        if self.period < 1 or self.k_max - self.k_min + 1 < 2 * self.period:
            raise ValueError("each track needs at least two samples")
        if any(not 0 < o <= 1 for o in self.offsets):
            raise ValueError("offsets must lie in (0, 1]")

    @classmethod
    def default(cls):
        return cls()

    @classmethod
    def from_json(cls, data):
        if isinstance(data, (str, Path)):
            data = json.loads(Path(data).read_text())
        kw = dict(data)
        for key in ("levels", "iotas", "offsets"):
            if key in kw:
                kw[key] = tuple(kw[key])
        return cls(**kw)

    def to_json(self):
        return {"levels": list(self.levels), "iotas": [str(i) for i in self.iotas],
                "k_min": self.k_min, "k_max": self.k_max,
                "offsets": [str(o) for o in self.offsets], "period": self.period,
                "max_bits": self.max_bits}

    def tracks(self):
        """Yield lists of TestPoints, each ordered by decreasing eps."""
        for q in self.levels:
            for iota in self.iotas:
                for off in self.offsets:
                    for j in range(self.period):
                        ks = [k for k in range(self.k_min, self.k_max + 1)
                              if k % self.period == j]
                        yield [TestPoint(q, iota, off / 2**k) for k in ks]


def _log(q: Fraction) -> float:
    return math.log(q.numerator) - math.log(q.denominator)


def log_abs(x, t: TestPoint, max_bits=MAX_BITS):
    """``log|x(t)|`` as a float, or None when the value is zero."""
    if isinstance(x, NormalForm):
        value = x.evaluate(t, prec=Fraction(1, 2**60))
        if not isinstance(value, S.Enclosure):
            m = S.exact_abs(value)
            if m is not None:
                return None if m == 0 else _log(m)
            return 0.5 * _log(value.norm2())
        return _enc_log(value)
    bits = 96
    while True:
        value = _ev(x, t, bits)
        if not isinstance(value, S.Enclosure):
            if S.is_zero(value):
                return None
            re, im = S.to_complex_parts(value)
            return 0.5 * _log(re * re + im * im)
        out = _enc_log(value)
        if out is not _UNSETTLED or bits >= max_bits:
            return None if out is _UNSETTLED else out
        bits *= 2


_UNSETTLED = object()


def _enc_log(e: S.Enclosure):
    import mpmath
    from mpmath import iv
    with S.ivprec(e.bits):
        mag = iv.sqrt(e.re * e.re + e.im * e.im) if (e.im.a != 0 or e.im.b != 0) else abs(e.re)
        lo, hi = mpmath.mpf(mag.a), mpmath.mpf(mag.b)
    if hi == 0:
        return None
    if lo <= 0 or (hi - lo) > _REL_WIDTH * hi:
        return _UNSETTLED
    return float(mpmath.log(hi))


def _fit(xs, ys):
    """Least-squares slope and residual standard deviation."""
    mx, my = statistics.fmean(xs), statistics.fmean(ys)
    sxx = sum((a - mx) ** 2 for a in xs)
    slope = sum((a - mx) * (b - my) for a, b in zip(xs, ys)) / sxx
    resid = [b - (my + slope * (a - mx)) for a, b in zip(xs, ys)]
    sigma = math.sqrt(sum(r * r for r in resid) / len(resid))
    return slope, sigma


def track_slopes(x, grid: SampleGrid):
    """``[(slope, sigma, track_points)]`` for every track where ``x`` is eventually nonzero."""
    out = []
    for track in grid.tracks():
        logs = [log_abs(x, t, grid.max_bits) for t in track]
        # keep the run of nonzero samples that reaches the smallest eps
        run = []
        for t, v in zip(reversed(track), reversed(logs)):
            if v is None:
                break
            run.append((_log(t.eps), v))
        if len(run) < 2:
            continue
        slope, sigma = _fit([a for a, _ in run], [b for _, b in run])
        out.append((slope, sigma, track))
    return out


def sampled_valuation(x, grid: SampleGrid | None = None):
    """``(estimate, band)``; ``(inf, 0.0)`` when every track vanishes."""
    grid = grid or SampleGrid.default()
    fits = track_slopes(x, grid)
    if not fits:
        return INF, 0.0
    estimate = min(s for s, _, _ in fits)
    band = 3 * max(sig for _, sig, _ in fits)
    return estimate, band


# -- cross checks --------------------------------------------------------------


@dataclass(frozen=True)
class Report:
    entries: tuple
    germ: str = ""

    @property
    def status(self):
        return "FAIL" if any(e["status"] == "FAIL" for e in self.entries) else "PASS"

    @property
    def ok(self):
        return self.status == "PASS"

    def to_json(self):
        return {"germ": self.germ, "status": self.status, "entries": list(self.entries)}


def _fmt_v(v):
    return "inf" if v == INF else str(v)


def cross_check(x, grid: SampleGrid | None = None, exact_valuation=None) -> Report:
    """Compare exact valuation, nullity and unit verdicts with sampling.

    ``exact_valuation`` overrides the exact value (used for fault injection).
    """
    from .normal import exact_valuation as exact_v, normalize
    from .units import is_unit
    grid = grid or SampleGrid.default()
    nf = x if isinstance(x, NormalForm) else normalize(x)
    exact = exact_v(nf) if exact_valuation is None else exact_valuation
    est, band = sampled_valuation(nf, grid)
    entries = []

    tol = max(TOLERANCE, band)
    if exact == INF or est == INF:
        agree = exact == est
    else:
        agree = abs(float(exact) - est) <= tol
    entries.append({"check": "valuation", "exact": _fmt_v(exact),
                    "sampled": _fmt_v(est), "band": band,
                    "status": "PASS" if agree else "FAIL"})

    sampled_null = est == INF
    entries.append({"check": "null", "exact": exact == INF, "sampled": sampled_null,
                    "status": "PASS" if (exact == INF) == sampled_null else "FAIL"})

    if exact_v(nf) != INF:
        unit = bool(is_unit(nf))
        sampled_unit = _sampled_unit(nf, grid)
        entries.append({"check": "unit", "exact": unit, "sampled": sampled_unit,
                        "status": "PASS" if unit == sampled_unit else "FAIL"})
    text = str(x) if isinstance(x, (Germ, NormalForm)) else repr(x)
    return Report(tuple(entries), text)


def _sampled_unit(x, grid):
    """Every track eventually nonzero with a bounded slope."""
    n_tracks = sum(1 for _ in grid.tracks())
    fits = track_slopes(x, grid)
    if len(fits) < n_tracks:
        return False
    for _, _, track in fits:
        if log_abs(x, track[-1], grid.max_bits) is None:
            return False
    return True
