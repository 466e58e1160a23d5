"""Seeded fixture generators shared by the test-suites and the CLI suite runner."""
from __future__ import annotations

import random
from fractions import Fraction

from .normal import NormalForm
from .sets import DyadicClass, GeomSeq, TailClass, atoms, complement, intersect, tail_class, union

G2 = GeomSeq(Fraction(1, 2))
G3 = GeomSeq(Fraction(1, 3))
G4 = GeomSeq(Fraction(1, 4))
D20, D21 = DyadicClass(2, 0), DyadicClass(2, 1)
D30, D31 = DyadicClass(3, 0), DyadicClass(3, 1)


def algebra(n_atoms: int) -> list:
    """A partition into ``n_atoms`` Proper atoms (4, 6 or 8)."""
    gens = {4: [G2, D20], 6: [G2, D30, D31], 8: [G2, D20, D30]}[n_atoms]
    out = atoms(gens)
    assert len(out) == n_atoms and all(tail_class(a) is TailClass.PROPER for a in out)
    return out


def generators(n_atoms: int) -> list:
    return {4: [G2, D20], 6: [G2, D30, D31], 8: [G2, D20, D30]}[n_atoms]


HALF_GRID = [Fraction(k, 2) for k in range(-10, 11)]
COEFFS = [Fraction(n, d) for n in range(1, 5) for d in (1, 2, 3)]


def random_poly(rng, max_terms=3, exps=HALF_GRID, signs="mixed", complex_=False):
    n = rng.randint(1, max_terms)
    chosen = sorted(rng.sample(exps, n))
    sign = rng.choice((1, -1))
    out = []
    for r in chosen:
        c = rng.choice(COEFFS) * (sign if signs == "same" else rng.choice((1, -1)))
        if complex_ and rng.random() < 0.5:
            from .scalars import make_complex
            c = make_complex(c, rng.choice(COEFFS) * rng.choice((1, -1)))
        out.append((r, c))
    return tuple(out)


def random_nf(rng, prims, p_zero=0.2, **kw) -> NormalForm:
    """Random normal form: an independent random poly on every minterm."""
    def piece(env):
        return () if rng.random() < p_zero else random_poly(rng, **kw)
    return NormalForm.build(prims, piece)


def random_nonzero(rng, prims, **kw) -> NormalForm:
    from .normal import exact_valuation
    while True:
        x = random_nf(rng, prims, **kw)
        if exact_valuation(x) != float("inf"):
            return x


def random_nonunit(rng, prims, **kw) -> NormalForm:
    """Nonzero with at least one relevant minterm carrying 0."""
    from .normal import exact_valuation
    while True:
        x = random_nf(rng, prims, p_zero=0.4, **kw)
        near = x.analysis.near
        if exact_valuation(x) != float("inf") and any(not x.poly(b) for b in near):
            return x


def random_visible(rng, **kw) -> NormalForm:
    """Random normal form over descriptors the oracle's sample tracks resolve."""
    gens = [rng.choice([G2, G4]), rng.choice([D20, D21, D30])]
    return random_nf(rng, gens, max_terms=2, **kw)


def chain_fixture(depth=8, exps=None) -> NormalForm:
    """``x = sum_j alpha_{e_j} X_{M_j}`` on the nested chain of dyadic classes.

    ``M_j`` is the set of blocks whose index has 2-adic valuation exactly j
    (j < depth); x vanishes on the innermost class.  The construction
    stops after ``depth + 1`` steps, so truncating earlier yields Case B.
    """
    exps = exps or [Fraction(j + 1) for j in range(depth)]
    chain = [DyadicClass(2 ** (j + 1), 0) for j in range(depth)]
    pieces = []
    for j in range(depth):
        inside = chain[j - 1] if j else None
        ring = complement(chain[j]) if inside is None else intersect(inside, complement(chain[j]))
        pieces.append(NormalForm.chi(ring).shift(exps[j]))
    x = pieces[0]
    for p in pieces[1:]:
        x = x + p
    return x


def nonunit_fixtures(seed=0, n_random=18) -> list:
    """Named non-units: hand-built cases, the chain fixture and random ones."""
    rng = random.Random(seed)
    gens = generators(4)
    a = NormalForm.chi
    out = [
        ("alpha1*chi(G2)", NormalForm.alpha(1) * a(G2)),
        ("chi(G2)", a(G2)),
        ("alpha3*chi(D20)", NormalForm.alpha(3) * a(D20)),
        ("chi(G2)-alpha2*chi(D20&~G2)", a(G2) - NormalForm.alpha(2) * a(intersect(D20, complement(G2)))),
        ("chain8", chain_fixture(8)),
        ("chain6-half", chain_fixture(6, [Fraction(1, 2) + j for j in range(6)])),
    ]
    for i in range(n_random):
        out.append((f"random{i}", random_nonunit(rng, gens, max_terms=2)))
    return out


def idempotent_fixtures() -> list:
    """``(e, S)`` pairs with ``e - X_S`` null, including null perturbations."""
    atoms8 = algebra(8)
    null_bits = [NormalForm.chi(intersect(G2, G3)), NormalForm.chi(intersect(G2, G4, D21)),
                 NormalForm.alpha(1) * NormalForm.chi(intersect(G4, D21))]
    out = []
    rng = random.Random(7)
    while len(out) < 20:
        k = rng.randint(1, 7)
        chosen = rng.sample(atoms8, k)
        S = union(*chosen)
        e = NormalForm.chi(S)
        if len(out) % 2:
            e = e + null_bits[len(out) % len(null_bits)]
        out.append((e, S))
    return out
