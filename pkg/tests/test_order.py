import random
from fractions import Fraction

import pytest

from gnum import scalars as S
from gnum.corpus import algebra, generators, random_nf
from gnum.errors import PreconditionError
from gnum.germ import Const, Mul, Neg, Osc, alpha, chi, evaluate
from gnum.normal import INF, NormalForm, exact_valuation, normalize
from gnum.order import (QuotientSign, Tri, abs_complex, complex_parts, convexity_check, decompose,
                        is_qnegative, is_qpositive, quotient_sign)
from gnum.sets import GeomSeq, complement, equivalent
from gnum.testpoint import TestPoint
from gnum.units import enumerate_families

A = GeomSeq(Fraction(1, 2))
AC = complement(A)
OSC = Mul((alpha(1), Osc("sin", Fraction(1))))
INT_EXPS = [Fraction(k) for k in range(-5, 6)]       # exact point values


def null(x):
    return exact_valuation(x) == INF


def random_points(rng, n, tiny=False):
    for _ in range(n):
        den = rng.randint(2**40, 2**50) if tiny else rng.randint(2, 10**5)
        yield TestPoint(rng.randint(0, 7), Fraction(1, rng.randint(1, 3)), Fraction(1, den))


def test_decompose_examples():
    d = decompose(alpha(1))
    assert d.pos == normalize(alpha(1)) and d.neg.is_zero() and d.theta == NormalForm.const(1)
    d = decompose(Neg(alpha(1)))
    assert d.pos.is_zero() and d.neg == normalize(Neg(alpha(1)))
    d = decompose(chi(A) - chi(AC))
    assert d.pos == NormalForm.chi(A) and d.neg == -NormalForm.chi(AC)
    assert equivalent(d.support_set, A)
    with pytest.raises(PreconditionError):
        decompose(Const(S.make_complex(0, 1)) * alpha(1))


def test_decomposition_identities_on_random_forms():
    rng = random.Random(0)
    for _ in range(200):
        x = random_nf(rng, generators(4))
        d = decompose(x)
        assert d.pos + d.neg == x
        assert decompose(-x).abs == d.abs                  # |-x| = |x|
        assert is_qpositive(d.abs - x).verdict is Tri.YES  # |x| >= x
        assert d.pos * d.neg == NormalForm.const(0)


def test_decomposition_signs_pointwise():
    """Independent route: read the signs off exact point values."""
    rng = random.Random(1)
    for _ in range(60):
        x = random_nf(rng, generators(4), exps=INT_EXPS)
        d = decompose(x)
        for t in random_points(rng, 20, tiny=not d.pointwise):
            v, p, n = x.evaluate(t), d.pos.evaluate(t), d.neg.evaluate(t)
            assert p >= 0 >= n and p + n == v and p - n == abs(v)
            assert d.theta.evaluate(t) in (-1, 1)


def test_product_negative_part_identity():
    rng = random.Random(2)
    for _ in range(200):
        a, b = random_nf(rng, generators(4)), random_nf(rng, generators(4))
        da, db = decompose(a), decompose(b)
        assert decompose(a * b).neg == da.pos * db.neg + da.neg * db.pos


def test_qpositive_examples():
    assert is_qpositive(alpha(2)).verdict is Tri.YES
    assert is_qpositive(Neg(chi(A))).verdict is Tri.NO
    assert is_qnegative(Neg(chi(A))).verdict is Tri.YES


def test_oscillator_is_neither_qpositive_nor_qnegative():
    pos, neg = is_qpositive(OSC), is_qnegative(OSC)
    assert pos.verdict is Tri.NO and neg.verdict is Tri.NO
    assert pos.mode == "sampled" and pos.evidence["levels"]
    # the recorded witnesses really violate x >= -eps^b
    b = Fraction(pos.evidence["b"])
    for level, found in pos.evidence["levels"].items():
        for eps in found["eps"]:
            t = TestPoint(int(level), Fraction(found["iota"]), Fraction(eps))
            v = evaluate(OSC, t, prec=Fraction(1, 10**30))
            assert float(v.re.b) < -float(t.eps) ** float(b)


def test_oscillating_germs_are_never_confirmed_qpositive():
    x = Mul((alpha(1), Osc("sin", Fraction(1)))) * Osc("sin", Fraction(1)) + alpha(3)
    assert is_qpositive(x).verdict is not Tri.YES


def test_quotient_sign_examples():
    fams = enumerate_families([A, AC])
    F = next(f for f in fams if f.pivot == 1)          # A in F
    assert quotient_sign(chi(A), F) is QuotientSign.ZERO
    assert quotient_sign(chi(A) - chi(AC), F) is QuotientSign.NON_POSITIVE
    assert quotient_sign(1, F) is QuotientSign.NON_NEGATIVE
    G = next(f for f in fams if f.pivot == 0)
    assert quotient_sign(chi(A) - chi(AC), G) is QuotientSign.NON_NEGATIVE


def test_quotient_sign_is_always_definite():
    parts = algebra(6)
    rng = random.Random(3)
    for F in enumerate_families(parts):
        for _ in range(20):
            x = random_nf(rng, generators(6), signs="same")
            s = quotient_sign(x, F)
            # Zero in the quotient means x itself lies in g_f(F): null on the pivot atom
            assert (s is QuotientSign.ZERO) == null(x * NormalForm.chi(parts[F.pivot]))


def test_convexity_examples():
    F = next(f for f in enumerate_families([A, AC]) if f.pivot == 1)
    for y in (alpha(1) * chi(A), chi(A), Const(Fraction(1, 2)) * chi(A)):
        assert convexity_check(chi(A), y, F)
    with pytest.raises(PreconditionError):
        convexity_check(chi(A), 2 * chi(A), F)
    with pytest.raises(PreconditionError):
        convexity_check(chi(AC), chi(AC), F)


def test_complex_parts_and_modulus():
    assert abs_complex(Const(S.make_complex(3, 4))) == NormalForm.const(5)
    re, im = complex_parts(Const(S.make_complex(0, 1)) * alpha(1))
    assert re.is_zero() and im == NormalForm.alpha(1)


def test_modulus_is_multiplicative_pointwise():
    rng = random.Random(4)
    z = normalize(Const(S.make_complex(1, 2)) * alpha(1) + Const(S.make_complex(0, 3)) * chi(A))
    w = normalize(Const(S.make_complex(2, -1)) + alpha(2))
    zw = z * w
    for t in random_points(rng, 100):
        a = S.magnitude(zw.evaluate(t))
        b = S.magnitude(z.evaluate(t)) * S.magnitude(w.evaluate(t))
        assert a == pytest.approx(b, rel=1e-12)


def test_triangle_inequalities_pointwise():
    rng = random.Random(5)
    for _ in range(50):
        x, y = (random_nf(rng, generators(4), exps=INT_EXPS) for _ in range(2))
        for t in random_points(rng, 10):
            vx, vy = x.evaluate(t), y.evaluate(t)
            assert abs(vx + vy) <= abs(vx) + abs(vy)
            assert abs(abs(vx) - abs(vy)) <= abs(vx - vy)
