import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gnum import scalars as S
from gnum.errors import NotNormalizable, PrecisionError
from gnum.germ import (AbsVal, Add, Alpha, Chi, Const, Mul, Neg, Osc, PrimeScale, alpha, arith,
                       chi, evaluate, moderate_bound)
from gnum.normal import NormalForm, exact_valuation, is_null, normalize
from gnum.sets import DyadicClass, GeomSeq, TailInterval, complement
from gnum.testpoint import TestPoint

G2 = GeomSeq(Fraction(1, 2))
D20 = DyadicClass(2, 0)


def tp(q, iota, eps):
    return TestPoint(q, Fraction(iota), Fraction(eps))


# -- test points -----------------------------------------------------------------


def test_testpoint_diameter_and_parse():
    t = TestPoint.parse("3, 1/2, 1/4")
    assert (t.level, t.iota, t.eps) == (3, Fraction(1, 2), Fraction(1, 4))
    assert t.diameter == Fraction(1, 8)


@pytest.mark.parametrize("args", [(-1, 1, 1), (0, 0, 1), (0, 1, 0), (0, Fraction(3, 2), 1), (0, 1, 2)])
def test_testpoint_rejects_out_of_range(args):
    with pytest.raises(ValueError):
        TestPoint(*args)


# -- evaluation --------------------------------------------------------------------


def test_alpha_uses_the_effective_diameter():
    assert evaluate(Alpha(Fraction(2)), tp(3, "1/2", "1/4")) == Fraction(1, 64)


def test_zero_is_zero_everywhere():
    for t in (tp(0, 1, 1), tp(5, "1/3", "1/1000")):
        assert evaluate(Const(Fraction(0)), t) == 0


def test_oscillator_matches_independent_high_precision_value():
    x = Mul((alpha(1), Osc("sin", Fraction(1))))
    eps = Fraction(318310, 10**6)             # a grid point near 1/pi
    t = tp(0, 1, eps)
    value = evaluate(x, t, prec=Fraction(1, 10**40))
    with mpmath.workdps(80):
        e = mpmath.mpf(eps.numerator) / eps.denominator
        ref = e * mpmath.sin(1 / e)
        assert value.re.a <= ref <= value.re.b
    assert value.width <= 1e-40


def test_irrational_power_is_certified():
    v = evaluate(alpha("1/3"), tp(0, 1, "1/4"), prec=Fraction(1, 10**20))
    assert isinstance(v, S.Enclosure) and v.width <= 1e-20
    with mpmath.workdps(50):
        assert v.re.a <= mpmath.cbrt(mpmath.mpf(1) / 4) <= v.re.b


def test_rational_power_that_is_exact_stays_exact():
    assert evaluate(alpha("1/3"), tp(0, 1, "1/27")) == Fraction(1, 3)
    assert evaluate(alpha("-3/2"), tp(0, 1, "1/4")) == 8


def test_precision_budget_is_enforced():
    deep = Osc("sin", Fraction(40))
    with pytest.raises(PrecisionError):
        evaluate(deep, tp(0, 1, "1/1024"), prec=Fraction(1, 10**5000))


def test_chi_follows_membership():
    assert evaluate(chi(G2), tp(0, 1, "1/8")) == 1
    assert evaluate(chi(G2), tp(0, 1, "3/16")) == 0


def test_prime_scale_examples():
    assert evaluate(PrimeScale(), tp(0, 1, "1/8")) == Fraction(1, 64)
    assert evaluate(PrimeScale(), tp(0, 1, "2/3")) == 0        # 1/u = 3/2 is not an integer
    assert evaluate(PrimeScale(), tp(0, 1, "1/15")) == Fraction(1, 15**3)
    assert evaluate(PrimeScale(), tp(0, 1, 1)) == 0


# -- arith -------------------------------------------------------------------------------


def test_arith_examples():
    t = tp(2, "1/2", "1/3")
    assert evaluate(arith("add", alpha(1), Neg(alpha(1))), t) == 0
    assert evaluate(arith("abs", Const(Fraction(-3))), t) == 3
    assert evaluate(arith("re", Const(S.make_complex(2, 5))), t) == 2
    assert evaluate(arith("im", Const(S.make_complex(2, 5))), t) == 5
    assert evaluate(arith("conj", Const(S.make_complex(2, 5))), t) == S.make_complex(2, -5)


def test_arith_arity_is_checked():
    with pytest.raises(ValueError):
        arith("abs", alpha(1), alpha(2))
    with pytest.raises(ValueError):
        arith("pow", alpha(1))


# -- ring axioms at random points (hypothesis) ----------------------------------------------

rationals = st.fractions(min_value=-5, max_value=5, max_denominator=6)
exps = st.integers(min_value=-4, max_value=4).map(Fraction)
descs = st.sampled_from([G2, D20, complement(G2), TailInterval(Fraction(1, 8))])
leaves = st.one_of(rationals.map(Const), exps.map(Alpha), descs.map(Chi))
germs = st.recursive(
    leaves,
    lambda kids: st.one_of(st.lists(kids, min_size=2, max_size=3).map(lambda a: Add(tuple(a))),
                           st.lists(kids, min_size=2, max_size=3).map(lambda a: Mul(tuple(a))),
                           kids.map(Neg)),
    max_leaves=6)
points = st.builds(lambda q, i, k: TestPoint(q, Fraction(1, i), Fraction(1, k)),
                   st.integers(0, 6), st.integers(1, 4), st.integers(1, 400))


@settings(max_examples=150, deadline=None)
@given(germs, germs, germs, points)
def test_ring_axioms_hold_pointwise(x, y, z, t):
    ev = lambda g: evaluate(g, t)
    assert ev(Add((x, y))) == ev(Add((y, x)))
    assert ev(Mul((x, y))) == ev(Mul((y, x)))
    assert ev(Add((Add((x, y)), z))) == ev(Add((x, Add((y, z)))))
    assert ev(Mul((Mul((x, y)), z))) == ev(Mul((x, Mul((y, z)))))
    assert ev(Mul((x, Add((y, z))))) == ev(Add((Mul((x, y)), Mul((x, z)))))


@settings(max_examples=150, deadline=None)
@given(germs, points)
def test_structural_moderateness_bound(x, t):
    c, p = moderate_bound(x)
    value = evaluate(x, t)
    assert abs(value) <= c * t.diameter ** -p


@settings(max_examples=100, deadline=None)
@given(germs)
def test_normalize_is_sound(x):
    nf = normalize(x)
    rng = random.Random(hash(str(x)) & 0xFFFF)
    for _ in range(40):
        t = TestPoint(rng.randint(0, 8), Fraction(1, rng.randint(1, 5)),
                      Fraction(rng.randint(1, 9), rng.randint(9, 5000)))
        assert evaluate(nf.to_germ(), t) == evaluate(x, t) == nf.evaluate(t)


def test_normalize_soundness_on_a_thousand_points():
    x = (alpha(1) - chi(G2) * 3) * (chi(D20) + alpha(-2)) + Neg(chi(complement(D20)))
    nf = normalize(x)
    rng = random.Random(5)
    for _ in range(1000):
        t = TestPoint(rng.randint(0, 8), Fraction(1, rng.randint(1, 7)),
                      Fraction(1, rng.randint(1, 10**6)))
        assert nf.evaluate(t) == evaluate(x, t)


# -- normal forms ---------------------------------------------------------------------------


def test_normalize_examples():
    assert normalize(alpha(1) * alpha(2)) == NormalForm.alpha(3)
    assert normalize(chi(G2) + chi(complement(G2))) == NormalForm.const(1)
    assert normalize(chi(G2) * chi(G2)) == NormalForm.chi(G2)
    assert normalize(chi(G2) * chi(complement(G2))).is_zero()
    terms = normalize(alpha(1) * alpha(2)).terms()
    assert [(t.c, t.r) for t in terms] == [(1, 3)]


def test_normal_forms_are_canonical():
    a = normalize((chi(G2) + 1) * (chi(G2) - 1))
    b = normalize(Neg(chi(complement(G2))))
    assert a == b and str(a) == str(b) and hash(a) == hash(b)


def test_abs_over_definite_and_mixed_polynomials():
    # 1 - alpha(1) is positive on (0, 1): exact
    nf = normalize(AbsVal(1 - alpha(1)))
    assert nf == normalize(1 - alpha(1))
    # 3 u^(1/2) - 2 u^(1/3) changes sign inside (0, 1)
    with pytest.raises(NotNormalizable):
        normalize(AbsVal(3 * alpha("1/2") - 2 * alpha("1/3")))


def test_oscillators_do_not_normalize():
    with pytest.raises(NotNormalizable):
        normalize(Osc("sin", Fraction(1)))


def test_json_export():
    nf = normalize(Const(Fraction(3, 4)) * alpha(2) * chi(G2))
    data = nf.to_json()
    assert data["terms"] == [{"c": "3/4", "r": "2", "atom": "A1"}]
    assert data["atoms"]["A1"] == G2.key()


# -- null germs ---------------------------------------------------------------------------------


def test_is_null_examples():
    assert is_null(Const(Fraction(0))).null
    assert is_null(chi(complement(TailInterval(Fraction(1, 16))))).null
    v = is_null(alpha(5))
    assert not v.null and v.mode == "exact" and v.a == 6
    for t in v.witness:
        assert evaluate(alpha(5), t) >= t.diameter ** 6


def test_is_null_samples_oscillating_germs():
    v = is_null(Mul((alpha(1), Osc("sin", Fraction(1)))))
    assert v.mode == "sampled" and not v.null


def test_no_nonzero_nilpotents():
    from gnum.corpus import generators, random_nf
    rng = random.Random(11)
    for _ in range(100):
        x = random_nf(rng, generators(4))
        assert (exact_valuation(x * x) == exact_valuation(x) * 2) or exact_valuation(x) == float("inf")
