"""Batch property suites, one per theorem-level statement of the theory.

Each suite returns a :class:`SuiteReport` listing every property checked,
how many cases it covered and the first counterexample (if any).
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from . import corpus as C
from .errors import ContractViolation
from .germ import Mul, Osc, alpha, evaluate
from .normal import INF, NormalForm, exact_valuation
from .oracle import cross_check
from .order import Tri, convexity_check, decompose, is_qnegative, is_qpositive, quotient_sign
from .sets import TailClass, complement, in_Sf, intersect, sample_points, tail_class, union
from .testpoint import TestPoint
from .units import (approx_decompose, below_scale, enumerate_families, idempotent_to_chi, ideal_member,
                    is_unit, least_scale, n_a_set, prime_scale_witness, unit_approx_seq,
                    unitize)
from .valuation import ball_contains, dist, e_pow, geometric_inverse, norm

INT_EXPS = [Fraction(k) for k in range(-5, 6)]


@dataclass
class Property:
    name: str
    checked: int = 0
    failures: int = 0
    counterexample: object = None

    def record(self, ok: bool, example=None):
        self.checked += 1
        if not ok:
            self.failures += 1
            if self.counterexample is None:
                self.counterexample = example

    @property
    def passed(self):
        return self.failures == 0

    def to_json(self):
        out = {"property": self.name, "passed": self.passed, "checked": self.checked}
        if self.counterexample is not None:
            out["counterexample"] = self.counterexample
        return out


@dataclass
class SuiteReport:
    suite: str
    statement: str
    properties: list
    tables: dict = field(default_factory=dict)

    @property
    def passed(self):
        return all(p.passed for p in self.properties)

    def to_json(self):
        out = {"suite": self.suite, "statement": self.statement,
               "status": "PASS" if self.passed else "FAIL",
               "properties": [p.to_json() for p in self.properties]}
        if self.tables:
            out["tables"] = self.tables
        return out


def _s(x):
    return str(x)


def _null(x) -> bool:
    return exact_valuation(x) == INF


def _rand(rng, n_atoms=4, **kw):
    return C.random_nf(rng, C.generators(n_atoms), **kw)


def _rand_real_definite(rng, n_atoms=4):
    return C.random_nf(rng, C.generators(n_atoms), signs="same")


# -- valuation and metric --------------------------------------------------------------


def suite_prop_valor(rng, size):
    props = {k: Property(k) for k in ("V(xy) >= V(x)+V(y)", "V(x+y) >= min(V(x),V(y))",
                                      "V(alpha_r x) = r + V(x)", "V(x+n) = V(x) for null n",
                                      "V(x) = inf iff x null")}
    nulls = [NormalForm.chi(intersect(C.G2, C.G3)), NormalForm.chi(intersect(C.G4, C.D21)) * 5]
    for _ in range(size):
        x, y = _rand(rng), _rand(rng)
        vx, vy = exact_valuation(x), exact_valuation(y)
        props["V(xy) >= V(x)+V(y)"].record(exact_valuation(x * y) >= vx + vy, [_s(x), _s(y)])
        props["V(x+y) >= min(V(x),V(y))"].record(exact_valuation(x + y) >= min(vx, vy), [_s(x), _s(y)])
        r = rng.choice(C.HALF_GRID)
        props["V(alpha_r x) = r + V(x)"].record(exact_valuation(x.shift(r)) == r + vx, [_s(x), _s(r)])
        n = rng.choice(nulls)
        props["V(x+n) = V(x) for null n"].record(exact_valuation(x + n) == vx, [_s(x), _s(n)])
        props["V(x) = inf iff x null"].record((vx == INF) == all(not p for _, p in x.near_pieces()),
                                               _s(x))
    return list(props.values())


def suite_cor_norma(rng, size):
    ultra, sub, scal = (Property("||x+y|| <= max(||x||,||y||)"), Property("||xy|| <= ||x|| ||y||"),
                        Property("||a x|| = ||x|| for rational a != 0"))
    for _ in range(size):
        x, y = _rand(rng), _rand(rng)
        nx, ny = norm(x), norm(y)
        ultra.record(norm(x + y) <= max(nx, ny), [_s(x), _s(y)])
        sub.record(norm(x * y) <= nx * ny, [_s(x), _s(y)])
        a = rng.choice(C.COEFFS) * rng.choice((1, -1))
        scal.record(norm(x * a) == nx, [_s(x), _s(a)])
    return [ultra, sub, scal]


def suite_lemma_fato(rng, size):
    p = Property("||alpha_{-V(x)} x|| = 1")
    for _ in range(size):
        x = C.random_nonzero(rng, C.generators(4))
        p.record(norm(x.shift(-exact_valuation(x))) == 1, _s(x))
    return [p]


def suite_lemma_novo(rng, size):
    p = Property("sampled valuation agrees with exact")
    for _ in range(max(1, size // 10)):
        x = C.random_visible(rng)
        rep = cross_check(x)
        p.record(rep.ok, rep.to_json())
    return [p]


def suite_lemma_boll(rng, size):
    same = Property("every point of a ball is a center")
    inner = Property("ball of radius e^-r around x contains x + alpha_s y for s > r + ||y|| exponent")
    for _ in range(size):
        x, y = _rand(rng), C.random_nonzero(rng, C.generators(4))
        r = rng.choice(INT_EXPS)
        radius = e_pow(r)
        shift = r - exact_valuation(y) + 1
        z = x + y.shift(shift)
        inner.record(ball_contains(x, radius, z) is True, [_s(x), _s(z), _s(r)])
        w = _rand(rng)
        same.record(ball_contains(x, radius, w) == ball_contains(z, radius, w),
                    [_s(x), _s(z), _s(w)])
    return [same, inner]


def suite_prop_inv(rng, size):
    p = Property("||(1-x) y_N - 1|| <= e^(-N V(x))")
    for _ in range(size):
        x = _rand(rng, exps=[e for e in C.HALF_GRID if e > 0])
        if _null(x):
            continue
        g = geometric_inverse(x, 8)
        p.record(g.residual <= g.bound, _s(x))
    return [p]


# -- index sets and characteristic functions ----------------------------------------------


def _zoo():
    base = [C.G2, C.G3, C.G4, C.D20, C.D21, C.D30, C.D31]
    out = list(base)
    for a in base:
        for b in base:
            if a != b:
                out += [intersect(a, b), union(a, complement(b))]
    return out


def suite_prop_caos(rng, size):
    sym = Property("A in S_f iff A^c in S_f")
    pts = Property("A in S_f has sample points in A and A^c at every level")
    swap = Property("tail class of A^c is the swap of A's")
    swapped = {TailClass.FULL: TailClass.NULL, TailClass.NULL: TailClass.FULL,
               TailClass.PROPER: TailClass.PROPER}
    for A in _zoo():
        sym.record(in_Sf(A) == in_Sf(complement(A)), _s(A))
        swap.record(tail_class(complement(A)) is swapped[tail_class(A)], _s(A))
        if in_Sf(A):
            for q in (0, 3, 6):
                ok = bool(sample_points(A, q, True, 2)) and bool(sample_points(A, q, False, 2))
                pts.record(ok, [_s(A), q])
    return [sym, pts, swap]


def suite_prop_direta(rng, size):
    split = Property("X_A + X_{A^c} = 1")
    ann = Property("x X_A and x X_{A^c} null imply x null")
    for A in C.algebra(8):
        split.record(NormalForm.chi(A) + NormalForm.chi(complement(A)) == NormalForm.const(1), _s(A))
    for _ in range(size):
        x = _rand(rng, n_atoms=8)
        A = rng.choice(C.algebra(8))
        both = _null(x * NormalForm.chi(A)) and _null(x * NormalForm.chi(complement(A)))
        ann.record(not both or _null(x), [_s(x), _s(A)])
    return [split, ann]


def suite_prop_cara(rng, size):
    idem, unit_norm, sep, orth = (Property("X_A^2 = X_A"), Property("||X_A|| = 1"),
                                  Property("||X_A - X_B|| = 1"), Property("X_A X_{A^c} = 0"))
    atoms = C.algebra(8)
    for A in atoms:
        X = NormalForm.chi(A)
        idem.record(X * X == X, _s(A))
        unit_norm.record(norm(X) == 1, _s(A))
        orth.record((X * NormalForm.chi(complement(A))).is_zero(), _s(A))
        for B in atoms:
            if B != A:
                sep.record(dist(X, NormalForm.chi(B)) == 1, [_s(A), _s(B)])
    return [idem, unit_norm, sep, orth]


# -- units and approximation -----------------------------------------------------------------


def suite_lemma_vert(rng, size):
    null_p = Property("x null iff X_{N_a(x)} = 1 for all a <= 8")
    unit_p = Property("x unit iff X_{N_a(x)} = 0 for all a <= 8 beyond the unit exponent")
    for _ in range(size):
        x = _rand(rng, exps=INT_EXPS)
        full = all(n_a_set(x, a).tail_class is TailClass.FULL for a in range(1, 9))
        null_p.record(full == _null(x), _s(x))
        if _null(x):
            continue
        # a unit has |x| >= alpha_r; N_a(x) is NullTail for every a >= r
        r = max(int(p[0][0]) for _, p in x.near_pieces() if p) + 1
        empty = all(n_a_set(x, a).tail_class is TailClass.NULL for a in range(max(r, 1), max(r, 1) + 8))
        unit_p.record(empty == bool(is_unit(x)), _s(x))
    return [null_p, unit_p]


def suite_prop_creio(rng, size):
    p = Property("some N_a(x) is in S_f with |x X_S| < alpha_a")
    for name, x in C.nonunit_fixtures():
        n = least_scale(x)
        ok = n.in_Sf() and all(below_scale(x.poly(b), n.a) or not x.poly(b)
                               for b in n.members & x.analysis.near)
        p.record(ok, name)
    return [p]


def check_approx(x, case) -> list:
    """The clauses of the approximation theorem for one output; returns failed clause names."""
    bad = []
    if case.kind == "A":
        S_ = NormalForm.chi(case.S)
        if not _null(x * S_):
            bad.append("x X_S null")
        rest = x * (1 - S_)
        for b in x.analysis.near - case.members:
            p = rest.poly(b)
            if not p or p[0][0] > case.a:
                bad.append("|x X_{S^c}| >= alpha_a")
                break
        return bad
    chain = case.members
    if any(not later <= earlier for earlier, later in zip(chain, chain[1:])):
        bad.append("nested")
    a_s = [a for a, _ in case.pairs]
    if any(b <= a for a, b in zip(a_s, a_s[1:])):
        bad.append("a_n increasing")
    for (a, S_), members in zip(case.pairs, chain):
        for m in members & x.analysis.near:
            p = x.poly(m)
            if p and not below_scale(p, a):
                bad.append("|x X_{S_n}| < alpha_{a_n}")
        if norm(x * NormalForm.chi(S_)) > e_pow(a):
            bad.append("||x X_{S_n}|| <= e^-a_n")
    return sorted(set(bad))


def suite_thm_aproxim(rng, size):
    p = Property("approximation theorem clauses")
    for name, x in C.nonunit_fixtures():
        for max_n in (3, 8):
            case = approx_decompose(x, max_n=max_n)
            bad = check_approx(x, case)
            p.record(not bad, {"fixture": name, "max_n": max_n, "failed": bad})
    return [p]


def suite_thm_mosca(rng, size):
    p = Property("unit witness |x| >= alpha_r below eta")
    for _ in range(size):
        x = C.random_nf(rng, C.generators(4), p_zero=0, exps=INT_EXPS)
        v = is_unit(x)
        if not v:
            continue
        w = v.witness
        for k in range(4):
            t = TestPoint(w.level, Fraction(1, rng.choice((1, 2, 3))),
                          w.eta / rng.choice((2, 3, 5, 7)) ** k)
            p.record(w.check(x, t), [_s(x), str(t.eps)])
    return [p]


def suite_lemma_rep(rng, size):
    p = Property("y = x(1-e) + e is a unit with e = X_{N_a(x)}")
    for name, x in C.nonunit_fixtures():
        u = unitize(x)
        p.record(bool(is_unit(u.y)), name)
    return [p]


def suite_thm_rad(rng, size):
    p = Property("x (1 - e) is not null for the unitizing idempotent")
    for name, x in C.nonunit_fixtures():
        u = unitize(x)
        p.record(not _null(x * (1 - u.e)), name)
    return [p]


def suite_thm_impor_density(rng, size):
    unit_p = Property("x_n is a unit")
    bound_p = Property("dist(x_n, x) <= max(e^-a_n, ||x X_{S_n}||)")
    exact_p = Property("CaseA: dist(x_n, x) = e^-n")
    small_p = Property("dist(x_8, x) < e^-6")
    tables = {}
    for name, x in C.nonunit_fixtures():
        row = []
        for n in range(1, 9):
            xn = unit_approx_seq(x, n)
            d = dist(xn, x)
            row.append(d.to_json("dist"))
            unit_p.record(bool(is_unit(xn)), [name, n])
            case = approx_decompose(x, max_n=n)
            if case.kind == "A":
                exact_p.record(d == e_pow(n), [name, n])
            else:
                a_n, s_n = case.pairs[min(n, case.length) - 1]
                bound_p.record(d <= max(e_pow(a_n), norm(x * NormalForm.chi(s_n))), [name, n])
        small_p.record(dist(unit_approx_seq(x, 8), x) < e_pow(6), name)
        tables[name] = row
    return [unit_p, bound_p, exact_p, small_p], tables


def suite_thm_zero_divisor(rng, size):
    p = Property("nonzero non-unit x has e not in {0,1} with x e null")
    for _ in range(size):
        x = C.random_nonunit(rng, C.generators(4))
        v = is_unit(x)
        e = NormalForm.chi(v.obstruction)
        ok = not v and not _null(e) and not _null(e - 1) and _null(x * e)
        p.record(ok, _s(x))
    return [p]


def suite_thm_idemp(rng, size):
    p = Property("e - X_S null for the recovered S")
    for e, S_ in C.idempotent_fixtures():
        S2 = idempotent_to_chi(e)
        p.record(_null(e - NormalForm.chi(S2)) and _null(NormalForm.chi(S_) - NormalForm.chi(S2)),
                 _s(e))
    return [p]


# -- ideals and order ---------------------------------------------------------------------------


def _member_of(rng, F, n_atoms, **kw):
    """A random element of g_f(F): a random form times X_A for A in F."""
    A = F.union_of(rng.choice(F.members()))
    return _rand(rng, n_atoms, **kw) * NormalForm.chi(A)


def suite_thm_ole_1(rng, size):
    far = Property("dist(1, x) >= 1 for x in g_f(F)")
    proper = Property("1 is not in g_f(F)")
    atoms = C.algebra(6)
    for F in enumerate_families(atoms):
        proper.record(not ideal_member(NormalForm.const(1), F), F.pivot)
        for _ in range(size):
            x = _member_of(rng, F, 6)
            far.record(dist(1, x) >= 1, [F.pivot, _s(x)])
    return [far, proper]


def suite_lemma_idpro(rng, size):
    p = Property("g_f(F) is a proper ideal closed under sums and products")
    atoms = C.algebra(4)
    for F in enumerate_families(atoms):
        for _ in range(size):
            x, y = _member_of(rng, F, 4), _member_of(rng, F, 4)
            z = _rand(rng)
            ok = ideal_member(x + y, F) and ideal_member(x * z, F) and not ideal_member(NormalForm.const(1), F)
            p.record(bool(ok), [F.pivot, _s(x), _s(y)])
    return [p]


def suite_prop_facil(rng, size):
    sum_p = Property("x = x+ + x-")
    abs_p = Property("|x| = x+ - x-")
    parts = Property("x+ = x X_A and x- = x X_{A^c}")
    pos_p = Property("x = x+ iff x = |x| iff q-positive")
    sym = Property("|-x| = |x| and |x| - x q-positive")
    tri = Property("pointwise |x+y| <= |x|+|y| and ||x|-|y|| <= |x-y|")
    for _ in range(size):
        x = _rand_real_definite(rng)
        d = decompose(x)
        sum_p.record(d.pos + d.neg == x, _s(x))
        abs_p.record(d.abs == x.abs(), _s(x))
        A = NormalForm.chi(d.support_set)
        parts.record(_null(d.pos - x * A) and _null(d.neg - x * (1 - A)), _s(x))
        qp = is_qpositive(x).verdict is Tri.YES
        pos_p.record(_null(x - d.pos) == _null(x - x.abs()) == qp, _s(x))
        sym.record((-x).abs() == x.abs() and is_qpositive(x.abs() - x).verdict is Tri.YES, _s(x))
        y = C.random_nf(rng, C.generators(4), exps=INT_EXPS)
        xi = C.random_nf(rng, C.generators(4), exps=INT_EXPS)
        for k in (3, 7, 11):
            t = TestPoint(rng.choice((0, 3, 6)), Fraction(1, rng.choice((1, 2))), Fraction(1, 2**k))
            a, b = xi.evaluate(t), y.evaluate(t)
            ok = abs(a + b) <= abs(a) + abs(b) and abs(abs(a) - abs(b)) <= abs(a - b)
            tri.record(ok, [_s(xi), _s(y), str(t.eps)])
    return [sum_p, abs_p, parts, pos_p, sym, tri]


def suite_thm_prime_ideal(rng, size):
    p = Property("(ab)- = a+ b- + a- b+")
    for _ in range(size):
        a, b = _rand_real_definite(rng), _rand_real_definite(rng)
        da, db = decompose(a), decompose(b)
        lhs = decompose(a * b).neg
        rhs = da.pos * db.neg + da.neg * db.pos
        p.record(_null(lhs - rhs), [_s(a), _s(b)])
    return [p]


def suite_prop_convex(rng, size):
    p = Property("x in g_f(F) and |y| <= |x| imply y in g_f(F)")
    atoms = C.algebra(4)
    for F in enumerate_families(atoms):
        for _ in range(size):
            x = _member_of(rng, F, 4, signs="same")
            if _null(x):
                continue
            # y = x * (c alpha_s) with |c| <= 1, s >= 0 satisfies |y| <= |x| pointwise
            c = Fraction(rng.randint(1, 4), 4) * rng.choice((1, -1))
            y = x * NormalForm.alpha(rng.choice((0, 1, 2))) * c
            try:
                ok = convexity_check(x.abs(), y, F)
            except ContractViolation:
                ok = False
            p.record(ok, [F.pivot, _s(x), _s(y)])
    return [p]


def suite_lemma_val(rng, size):
    p = Property("x - y and x- in g_f(F) imply y- in g_f(F)")
    atoms = C.algebra(4)
    for F in enumerate_families(atoms):
        for _ in range(size):
            x = _rand_real_definite(rng)
            # force x- into the ideal by zeroing the negative part on the pivot atom
            d = decompose(x)
            x = d.pos + d.neg * (1 - NormalForm.chi(F.atoms[F.pivot]))
            y = x - _member_of(rng, F, 4)
            if not (ideal_member(decompose(x).neg, F) and ideal_member(x - y, F)):
                p.record(False, ["fixture construction", F.pivot, _s(x)])
                continue
            p.record(bool(ideal_member(decompose(y).neg, F)), [F.pivot, _s(x), _s(y)])
    return [p]


def suite_thm_motor(rng, size):
    p = Property("quotient_sign is definite")
    for n_atoms in (4, 6):
        atoms = C.algebra(n_atoms)
        for F in enumerate_families(atoms):
            for _ in range(size):
                x = _rand_real_definite(rng, n_atoms)
                try:
                    quotient_sign(x, F)
                    ok = True
                except ContractViolation:
                    ok = False
                p.record(ok, [F.pivot, _s(x)])
    return [p]


def suite_rem_oscillator(rng, size):
    pos, neg = Property("alpha_1 sin(alpha_-1) is not q-positive"), Property(
        "alpha_1 sin(alpha_-1) is not q-negative")
    x = Mul((alpha(1), Osc("sin", Fraction(1))))
    pos.record(is_qpositive(x).verdict is Tri.NO, _s(x))
    neg.record(is_qnegative(x).verdict is Tri.NO, _s(x))
    return [pos, neg]


def suite_lemma_fator(rng, size):
    value = Property("witness germ matches its definition")
    const = Property("exponent constant along eps = p^-n")
    div = Property("exponent unbounded along eps = 1/p_n")
    from .germ import PrimeScale, smallest_prime_exponent
    for k in range(1, 11):
        eps = Fraction(1, rng.randint(2, 200)) if k % 3 else Fraction(2, rng.randint(3, 50) * 2 + 1)
        t = TestPoint(rng.choice((0, 3)), Fraction(1), eps)
        u = t.diameter
        p_ = smallest_prime_exponent(u)
        expect = Fraction(0) if p_ is None else u ** p_
        value.record(evaluate(PrimeScale(), t) == expect, str(eps))
    w = prime_scale_witness()
    for p_, track in w.constant_tracks.items():
        const.record(all(e == p_ for e in track), p_)
    exps = [e for _, e in w.divergent_track]
    div.record(all(b > a for a, b in zip(exps, exps[1:])), [str(e) for e in exps])
    return [value, const, div]


SUITES = {
    "prop-valor": ("properties of the sharp valuation", suite_prop_valor, 200),
    "cor-norma": ("the sharp norm is an ultrametric norm", suite_cor_norma, 200),
    "lemma-novo": ("valuation as a limit threshold (sampled)", suite_lemma_novo, 100),
    "lemma-fato": ("normalizing by the valuation gives norm 1", suite_lemma_fato, 100),
    "lemma-boll": ("ultrametric balls", suite_lemma_boll, 100),
    "prop-inv": ("geometric series inversion of 1 - x", suite_prop_inv, 50),
    "thm-ole-1": ("members of g_f(F) are at distance >= 1 from 1", suite_thm_ole_1, 100),
    "lemma-idpro": ("g_f(F) is a proper ideal", suite_lemma_idpro, 30),
    "prop-caos": ("S_f is closed under complement", suite_prop_caos, 0),
    "prop-direta": ("the direct-sum splitting by X_A", suite_prop_direta, 100),
    "prop-cara": ("characteristic functions are norm-1 idempotents", suite_prop_cara, 0),
    "lemma-vert": ("N_a(x) characterizes null and unit germs", suite_lemma_vert, 100),
    "prop-creio": ("some N_a(x) lies in S_f", suite_prop_creio, 0),
    "thm-aproxim": ("the approximation theorem", suite_thm_aproxim, 0),
    "thm-mosca": ("unit criterion |x| >= alpha_r", suite_thm_mosca, 50),
    "lemma-rep": ("unitization of a non-unit", suite_lemma_rep, 0),
    "thm-rad": ("the Jacobson radical is zero", suite_thm_rad, 0),
    "thm-impor-density": ("units are dense", suite_thm_impor_density, 0),
    "thm-zero-divisor": ("every non-unit is a zero divisor", suite_thm_zero_divisor, 100),
    "thm-idemp": ("idempotents are characteristic functions", suite_thm_idemp, 0),
    "prop-facil": ("positive and negative parts, absolute value", suite_prop_facil, 100),
    "prop-convex": ("convexity of the ideals g_f(F)", suite_prop_convex, 20),
    "lemma-val": ("sign transfer modulo g_f(F)", suite_lemma_val, 40),
    "thm-motor": ("the quotient by g_f(F) is totally ordered", suite_thm_motor, 50),
    "thm-prime-ideal": ("g_f(F) is prime: the (ab)- identity", suite_thm_prime_ideal, 200),
    "rem-oscillator": ("a germ neither q-positive nor q-negative", suite_rem_oscillator, 0),
    "lemma-fator": ("the prime-scale witness germ", suite_lemma_fator, 0),
}


def run_suite(name: str, seed: int = 0, size: int | None = None) -> SuiteReport:
    if name not in SUITES:
        raise KeyError(name)
    statement, fn, default = SUITES[name]
    rng = random.Random(seed)
    out = fn(rng, default if size is None else size)
    props, tables = out if isinstance(out, tuple) else (out, {})
    return SuiteReport(name, statement, props, tables)
