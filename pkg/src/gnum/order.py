"""The partial order of the real ring, sign decompositions and the quotient order.

Signs are read per minterm from the leading coefficient, i.e. from the
eventual sign as ``eps -> 0``.  When a minterm's polynomial keeps one sign
on the whole unit interval this is the pointwise sign; otherwise the
pointwise and eventual decompositions differ only above a fixed diameter,
by a null germ.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction

from . import scalars as S
from .errors import ContractViolation, NotNormalizable, PreconditionError
from .germ import AbsVal, ImPart, RePart, _ev, is_oscillator_free, lift
from .normal import INF, NormalForm, exact_valuation, normalize, sign_on_unit_interval
from .oracle import SampleGrid
from .sets import SetDescriptor
from .testpoint import TestPoint
from .units import Family, ideal_member, null_on
from .valuation import as_normal


def _require_real(nf: NormalForm):
    if not nf.is_real():
        raise PreconditionError("x must be real-valued (use abs_complex for complex germs)")


@dataclass(frozen=True)
class SignDecomposition:
    pos: NormalForm
    neg: NormalForm
    theta: NormalForm
    support_set: SetDescriptor      # minterms where x is eventually >= 0
    pointwise: bool                 # the eventual signs are the pointwise signs

    @property
    def abs(self) -> NormalForm:
        return self.pos - self.neg


def eventual_sign(p) -> int:
    if not p:
        return 0
    return 1 if p[0][1] > 0 else -1


def decompose(x) -> SignDecomposition:
    nf = as_normal(x)
    _require_real(nf)
    nonneg = {b for b in nf.analysis.nonempty if eventual_sign(nf.poly(b)) >= 0}
    pointwise = all(sign_on_unit_interval(p) is not None for p in nf.pieces.values())
    pos = nf.on(nonneg)
    neg = nf - pos
    A = nf.describe(nonneg)
    theta = NormalForm.chi(A) * 2 - 1
    return SignDecomposition(pos, neg, theta, A, pointwise)


class Tri(enum.Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True)
class PositivityVerdict:
    verdict: Tri
    mode: str
    evidence: dict | None = None


def is_qpositive(x) -> PositivityVerdict:
    """q-positivity: exact for normal forms, refutation by sampling otherwise."""
    try:
        nf = normalize(lift(x)) if not isinstance(x, NormalForm) else x
    except NotNormalizable:
        return _sampled_qpositive(x)
    _require_real(nf)
    neg = decompose(nf).neg
    if exact_valuation(neg) == INF:
        return PositivityVerdict(Tri.YES, "exact")
    return PositivityVerdict(Tri.NO, "exact")


REFUTATION_B = (Fraction(1, 2), Fraction(1), Fraction(2))
WINDOW = 4


def _violates(x, t: TestPoint, b: Fraction, grid) -> bool:
    """``x(phi_eps) < -eps**b`` at ``t`` (False when precision runs out)."""
    thr = -float(t.eps) ** float(b)
    bits = 96
    while True:
        v = _ev(x, t, bits)
        if S.is_exact(v):
            if not S.is_real(v):
                raise PreconditionError("x must be real-valued")
            return float(v) < thr
        lo, hi = float(v.re.a), float(v.re.b)
        if hi < thr:
            return True
        if lo >= thr or bits >= grid.max_bits:
            return False
        bits *= 2


def _sampled_qpositive(x, grid: SampleGrid | None = None) -> PositivityVerdict:
    """Refute condition (*) by persistent violations, else inconclusive.

    For some b the violation ``x < -eps**b`` must recur in every window of
    ``WINDOW`` consecutive k among the finest samples, on every sampled
    level (for at least one base diameter).
    """
    grid = grid or SampleGrid.default()
    ks = list(range(grid.k_min, grid.k_max + 1))
    upper = ks[len(ks) - 3 * WINDOW:]
    windows = [upper[i:i + WINDOW] for i in range(0, len(upper), WINDOW)]
    evidence = {}
    for b in REFUTATION_B:
        per_level = {}
        for q in grid.levels:
            found = None
            for iota in grid.iotas:
                hits = []
                for win in windows:
                    pts = [TestPoint(q, iota, off / 2**k) for k in win for off in grid.offsets]
                    hit = next((t for t in pts if _violates(x, t, b, grid)), None)
                    if hit is None:
                        break
                    hits.append(str(hit.eps))
                else:
                    found = {"iota": str(iota), "eps": hits}
                    break
            per_level[q] = found
        if all(per_level.values()):
            evidence = {"b": str(b), "levels": {str(q): v for q, v in per_level.items()}}
            return PositivityVerdict(Tri.NO, "sampled", evidence)
    return PositivityVerdict(Tri.INCONCLUSIVE, "sampled")


def is_qnegative(x) -> PositivityVerdict:
    return is_qpositive(-x)


# -- quotient order --------------------------------------------------------------


class QuotientSign(enum.Enum):
    NON_NEGATIVE = "NonNegative"
    NON_POSITIVE = "NonPositive"
    ZERO = "Zero"


def _measurable(nf: NormalForm, F: Family) -> bool:
    """x has one eventual sign on each relevant atom of F's algebra."""
    d = decompose(nf)
    for i in F.relevant:
        A = F.atoms[i]
        if not null_on(d.pos, A) and not null_on(d.neg, A):
            return False
    return True


def quotient_sign(x, F: Family) -> QuotientSign:
    nf = as_normal(x)
    _require_real(nf)
    if not _measurable(nf, F):
        raise PreconditionError("x changes sign inside an atom of the family's algebra")
    d = decompose(nf)
    nonneg = bool(ideal_member(d.neg, F))
    nonpos = bool(ideal_member(d.pos, F))
    if nonneg and nonpos:
        return QuotientSign.ZERO
    if nonneg:
        return QuotientSign.NON_NEGATIVE
    if nonpos:
        return QuotientSign.NON_POSITIVE
    raise ContractViolation(f"neither x^+ nor x^- lies in g_f(F) for x = {nf}")


def convexity_check(x, y, F: Family) -> bool:
    """For x in g_f(F) and |y| <= |x|, whether y is in g_f(F) (it must be)."""
    nx, ny = as_normal(x), as_normal(y)
    if not ideal_member(nx, F):
        raise PreconditionError("x is not in g_f(F)")
    gap = decompose(nx).abs - decompose(ny).abs
    if is_qpositive(gap).verdict is not Tri.YES:
        raise PreconditionError("|y| <= |x| does not hold")
    member = bool(ideal_member(ny, F))
    if not member:
        raise ContractViolation("an ideal g_f(F) failed to be convex")
    return member


# -- complex germs -------------------------------------------------------------------


def complex_parts(z):
    """``(Re z, Im z)``; normal forms when possible, germs otherwise."""
    if isinstance(z, NormalForm):
        return z.real(), z.imag()
    z = lift(z)
    if is_oscillator_free(z):
        try:
            nf = normalize(z)
            return nf.real(), nf.imag()
        except NotNormalizable:
            pass
    return RePart(z), ImPart(z)


def abs_complex(z):
    """``|z|`` as a real germ (exact normal form when the modulus is representable)."""
    if isinstance(z, NormalForm):
        return z.abs()
    z = lift(z)
    try:
        return normalize(AbsVal(z))
    except NotNormalizable:
        return AbsVal(z)
