"""Random formulas and models shared by the test modules."""
from __future__ import annotations

import random
from fractions import Fraction

from hypothesis import strategies as st

from problogic.models import FiniteModel
from problogic.syntax import And, L, M, Neg, Or, Prop

PROPS = ("p", "q", "r")


def rand_threshold(rng: random.Random, max_den: int = 8) -> Fraction:
    d = rng.randint(1, max_den)
    return Fraction(rng.randint(0, d), d)


def rand_formula(rng: random.Random, depth: int = 2, props=PROPS, max_den: int = 8,
                 positive: bool = False, size: int = 4):
    """A random formula of modal depth at most ``depth``.

    ``positive`` keeps negation on propositions only (the PPL fragment).
    """
    if size <= 1 or rng.random() < 0.25:
        atom = Prop(rng.choice(props))
        return Neg(atom) if rng.random() < 0.3 else atom
    kinds = ["and", "or"]
    if depth > 0:
        kinds += ["L", "M", "L", "M"]
    if not positive:
        kinds.append("neg")
    kind = rng.choice(kinds)
    if kind == "neg":
        return Neg(rand_formula(rng, depth, props, max_den, positive, size - 1))
    if kind in ("L", "M"):
        child = rand_formula(rng, depth - 1, props, max_den, positive, size - 1)
        return (L if kind == "L" else M)(rand_threshold(rng, max_den), child)
    half = max(1, (size - 1) // 2)
    a = rand_formula(rng, depth, props, max_den, positive, half)
    b = rand_formula(rng, depth, props, max_den, positive, half)
    return (And if kind == "and" else Or)(a, b)


def rand_row(rng: random.Random, n: int, max_den: int) -> list[Fraction]:
    d = rng.randint(1, max_den)
    counts = [0] * n
    for _ in range(d):
        counts[rng.randrange(n)] += 1
    return [Fraction(c, d) for c in counts]


def rand_model(rng: random.Random, max_states: int = 6, props=PROPS,
               max_den: int = 16) -> FiniteModel:
    n = rng.randint(1, max_states)
    kernel = tuple(tuple(rand_row(rng, n, max_den)) for _ in range(n))
    valuation = {p: frozenset(s for s in range(n) if rng.random() < 0.5) for p in props}
    return FiniteModel(n, kernel, valuation, rng.randrange(n))


# hypothesis strategies

thresholds = st.builds(lambda d, k: Fraction(k % (d + 1), d),
                       st.integers(1, 8), st.integers(0, 8))


def formulas(max_depth: int = 3, positive: bool = False, props=PROPS):
    leaves = st.sampled_from(props).map(Prop)
    if positive:
        leaves = leaves | leaves.map(Neg)

    def grow(depth):
        if depth == 0:
            base = leaves
        else:
            base = leaves | st.builds(L, thresholds, grow(depth - 1)) | st.builds(M, thresholds, grow(depth - 1))

        def extend(children):
            opts = [st.builds(And, children, children), st.builds(Or, children, children)]
            if not positive:
                opts.append(children.map(Neg))
            return st.one_of(*opts)

        return st.recursive(base, extend, max_leaves=4)

    return grow(max_depth)


@st.composite
def models(draw, max_states: int = 5, props=PROPS, max_den: int = 8):
    n = draw(st.integers(1, max_states))
    rows = []
    for _ in range(n):
        weights = draw(st.lists(st.integers(0, max_den), min_size=n, max_size=n))
        if not any(weights):
            weights[draw(st.integers(0, n - 1))] = 1
        total = sum(weights)
        rows.append(tuple(Fraction(w, total) for w in weights))
    valuation = {p: frozenset(draw(st.sets(st.integers(0, n - 1)))) for p in props}
    return FiniteModel(n, tuple(rows), valuation, draw(st.integers(0, n - 1)))


def rand_system(rng: random.Random, allow_strict: bool = True, bounded: bool = False):
    """A random system over at most three variables, denominators at most 8."""
    from problogic import lp
    from problogic.rational import Relation

    n = rng.randint(1, 3)
    rels = [Relation.LE, Relation.GE, Relation.EQ]
    if allow_strict:
        rels += [Relation.LT, Relation.GT]
    cons = []
    for _ in range(rng.randint(1, 4)):
        coeffs = {i: Fraction(rng.randint(-8, 8), rng.randint(1, 8))
                  for i in range(n) if rng.random() < 0.8}
        rhs = Fraction(rng.randint(-8, 8), rng.randint(1, 8))
        cons.append(lp.constraint(coeffs, rng.choice(rels), rhs))
    if bounded:
        cons += [lp.constraint({i: 1}, Relation.LE, 1) for i in range(n)]
    return lp.system(n, cons)
