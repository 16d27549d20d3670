"""Executable counterexamples and demonstrations.

Besides finite models, this module evaluates formulas in the countable
finitely additive model on the naturals whose state 0 carries the measure
of a non-principal ultrafilter. Every set that model needs is finite or
cofinite, and on that algebra every non-principal ultrafilter agrees:
finite sets are out, cofinite sets are in. :class:`FinCofSet` is that algebra.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Mapping

from . import decide
from .errors import NotRepresentable, UnknownCase, UnknownProposition
from .models import FiniteModel, check, extension, restrict, restriction_map
from .rational import format_rational
from .syntax import (TOP_NAME, And, Formula, L, M, Neg, Or, Prop, format_formula,
                     parse, subformulas)


# ---------------------------------------------------------------------------
# Finite / cofinite subsets of the naturals


@dataclass(frozen=True)
class FinCofSet:
    """A finite set (``cofinite=False``) or the complement of a finite set."""

    support: frozenset[int]
    cofinite: bool = False

    @classmethod
    def finite(cls, elems=()) -> "FinCofSet":
        return cls(frozenset(elems), False)

    @classmethod
    def cofinite_except(cls, elems=()) -> "FinCofSet":
        return cls(frozenset(elems), True)

    def __post_init__(self):
        if any(x < 0 for x in self.support):
            raise ValueError("naturals only")

    def __contains__(self, x: int) -> bool:
        return (x in self.support) != self.cofinite

    def complement(self) -> "FinCofSet":
        return FinCofSet(self.support, not self.cofinite)

    __invert__ = complement

    def __or__(self, other: "FinCofSet") -> "FinCofSet":
        a, b = self, other
        if not a.cofinite and not b.cofinite:
            return FinCofSet(a.support | b.support)
        if a.cofinite and b.cofinite:
            return FinCofSet(a.support & b.support, True)
        fin, cof = (a, b) if b.cofinite else (b, a)
        return FinCofSet(cof.support - fin.support, True)

    def __and__(self, other: "FinCofSet") -> "FinCofSet":
        return ~(~self | ~other)

    def count_below(self, bound: int) -> int:
        """Size of the intersection with {0, ..., bound-1}."""
        inside = sum(1 for x in self.support if x < bound)
        return bound - inside if self.cofinite else inside

    def __str__(self):
        body = "{" + ", ".join(map(str, sorted(self.support))) + "}"
        return f"N \\ {body}" if self.cofinite else body


EMPTY = FinCofSet.finite()
NATURALS = FinCofSet.cofinite_except()


@dataclass(frozen=True)
class ExampleRowFamily:
    """Kernel of the countable model: T(0) is the ultrafilter measure, T(n)
    for n >= 1 is uniform on {0, ..., 2^n - 1}."""

    def measure(self, state: int, s: FinCofSet) -> Fraction:
        if state == 0:
            return Fraction(1 if s.cofinite else 0)
        width = 2 ** state
        return Fraction(s.count_below(width), width)


def fincof_measure(family: ExampleRowFamily, state: int, s: FinCofSet) -> Fraction:
    return family.measure(state, s)


def _threshold_set(family: ExampleRowFamily, e: FinCofSet, at_least: bool,
                   r: Fraction) -> FinCofSet:
    """{n : T(n)(e) >= r} (or ``<= r``), exactly.

    Once 2^n exceeds every support element, T(n)(e) is c/2^n (finite e) or
    1 - c/2^n (cofinite e) with c = |support|. So it is constant when c = 0
    and otherwise strictly monotone toward its limit without reaching it. A
    threshold test on such a sequence changes value at most once, so scanning
    until the test agrees with its eventual value settles all later states.
    """

    def test(x: Fraction) -> bool:
        return x >= r if at_least else x <= r

    c = len(e.support)
    limit = Fraction(1 if e.cofinite else 0)
    if c == 0 or limit != r:
        eventual = test(limit)
    else:
        # limit == r, approached from above (finite e) or below (cofinite e)
        eventual = at_least != e.cofinite
    start = max(e.support).bit_length() + 1 if c else 1
    exceptions = set()
    n = 1
    while True:
        value = test(family.measure(n, e))
        if n >= start and value == eventual:
            break
        if value != eventual:
            exceptions.add(n)
        n += 1
        if n > start + 10**5:
            raise NotRepresentable("threshold set did not stabilize")
    if test(family.measure(0, e)) != eventual:
        exceptions.add(0)
    return FinCofSet(frozenset(exceptions), cofinite=eventual)


def fincof_extension(family: ExampleRowFamily, f: Formula,
                     valuation: Mapping[str, FinCofSet]) -> FinCofSet:
    """The set of states of the countable model satisfying ``f``."""
    memo: dict[Formula, FinCofSet] = {}

    def ext(g: Formula) -> FinCofSet:
        if g in memo:
            return memo[g]
        if isinstance(g, Prop):
            if g.name in valuation:
                out = valuation[g.name]
            elif g.name == TOP_NAME:
                out = EMPTY
            else:
                raise UnknownProposition(f"no valuation for proposition {g.name!r}")
        elif isinstance(g, Neg):
            out = ~ext(g.child)
        elif isinstance(g, And):
            out = ext(g.left) & ext(g.right)
        elif isinstance(g, Or):
            out = ext(g.left) | ext(g.right)
        elif isinstance(g, L):
            out = _threshold_set(family, ext(g.child), True, g.threshold)
        elif isinstance(g, M):
            out = _threshold_set(family, ext(g.child), False, g.threshold)
        else:
            raise TypeError(f"not a formula: {g!r}")
        memo[g] = out
        return out

    return ext(f)


# ---------------------------------------------------------------------------
# Formula families


P = Prop("p")


def band(i: int) -> Formula:
    """Mass of p lies in [1/2^i, 1 - 1/2^i]."""
    return And(L(Fraction(1, 2 ** i), P), M(1 - Fraction(1, 2 ** i), P))


def sigma_prefix(k: int) -> list[Formula]:
    """The M_0 formula plus the half-mass bounds on bands 1..k."""
    return [M(0, Or(M(0, P), L(1, P)))] + [M(Fraction(1, 2), band(i)) for i in range(1, k + 1)]


def eq1_prefix(n: int) -> list[Formula]:
    """Lower bounds 1/2 - 1/4^(i+1) on p for i = 0..n."""
    return [L(Fraction(1, 2) - Fraction(1, 4 ** (i + 1)), P) for i in range(n + 1)]


def not_half() -> Formula:
    return Neg(L(Fraction(1, 2), P))


def gamma_pairs(n: int) -> list[Formula]:
    """Half-mass disagreement between every pair of p_1..p_n."""
    return [L(Fraction(1, 2), parse(f"!(p{i} <-> p{j})"))
            for i in range(1, n + 1) for j in range(i + 1, n + 1)]


def two_state_model(k: int) -> FiniteModel:
    """w1 (state 0) splits evenly; w2 (state 1) gives w1 mass 2^-(k+1)."""
    eps = Fraction(1, 2 ** (k + 1))
    return FiniteModel.build([[Fraction(1, 2), Fraction(1, 2)], [eps, 1 - eps]], {"p": [0]}, 0)


# ---------------------------------------------------------------------------
# Cases


@dataclass
class Report:
    case: str
    passed: bool
    details: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"case": self.case, "pass": self.passed, "details": self.details}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    def to_text(self) -> str:
        head = f"{self.case}: {'PASS' if self.passed else 'FAIL'}"
        return "\n".join([head] + [f"  {d}" for d in self.details])


@dataclass(frozen=True)
class GalleryCase:
    name: str
    description: str
    run: Callable[[], Report]


def _eq1_prefix(max_n: int = 8) -> Report:
    rep = Report("eq1-prefix", True)
    for n in range(max_n + 1):
        res = decide.satisfiable_theory(eq1_prefix(n) + [not_half()])
        if not res:
            rep.passed = False
            rep.details.append(f"n={n}: UNSAT")
            continue
        w = res.witness
        mass = w.mass(w.world, w.valuation["p"])
        lo = Fraction(1, 2) - Fraction(1, 4 ** (n + 1))
        ok = lo <= mass < Fraction(1, 2) and check(w, w.world, decide.conjoin(eq1_prefix(n) + [not_half()]))
        rep.passed &= ok
        rep.details.append(f"n={n}: SAT, p-mass {format_rational(mass)} in "
                           f"[{format_rational(lo)}, 1/2): {ok}")
    both = decide.satisfiable_theory([L(Fraction(1, 2), P), not_half()])
    rep.passed &= not both
    rep.details.append(f"{{L[1/2] p, !L[1/2] p}}: {'SAT' if both else 'UNSAT'}")
    return rep


def _exm_pr_finite(max_k: int = 6) -> Report:
    rep = Report("exm-pr-finite", True)
    for k in range(1, max_k + 1):
        m = two_state_model(k)
        ok = all(check(m, 0, f) for f in sigma_prefix(k))
        rep.passed &= ok
        rep.details.append(f"k={k}: T(w2)(w1) = {format_rational(m.kernel[1][0])}, "
                           f"w1 satisfies prefix: {ok}")
    return rep


def _exm_pr_fincof(max_i: int = 64) -> Report:
    rep = Report("exm-pr-fincof", True)
    fam = ExampleRowFamily()
    val = {"p": FinCofSet.finite({0})}

    def ext(f):
        return fincof_extension(fam, f, val)

    mixed = ~(ext(M(0, P)) | ext(L(1, P)))
    displayed = [
        ("T(0)([[p]])", ext(P), Fraction(0), FinCofSet.finite({0})),
        ("T(0)([[M_0 p]])", ext(M(0, P)), Fraction(0), FinCofSet.finite({0})),
        ("T(0)([[L_1 p]])", ext(L(1, P)), Fraction(0), EMPTY),
        ("T(0)([[band 2]])", ext(band(2)), Fraction(0), FinCofSet.finite({1, 2})),
        ("T(0)({n : 0 < T(n)([[p]]) < 1})", mixed, Fraction(1), FinCofSet.cofinite_except({0})),
    ]
    for label, s, want, want_set in displayed:
        got = fam.measure(0, s)
        ok = got == want and s == want_set
        rep.passed &= ok
        rep.details.append(f"{label} = {format_rational(got)} on {s}"
                           f"{'' if ok else f' (expected {format_rational(want)} on {want_set})'}")
    for i in range(1, max_i + 1):
        got = ext(band(i))
        if got != FinCofSet.finite(range(1, i + 1)):
            rep.passed = False
            rep.details.append(f"band {i}: {got} != {{1..{i}}}")
    members = [f for f in sigma_prefix(max_i)]
    bad = [format_formula(f) for f in members if 0 not in ext(f)]
    rep.passed &= not bad
    rep.details.append(f"state 0 satisfies all {len(members)} formulas up to band {max_i}: {not bad}")
    return rep


def _ls_uncountable(ns=(2, 3, 4)) -> Report:
    rep = Report("ls-uncountable", True)
    for n in ns:
        gamma = gamma_pairs(n)
        res = decide.satisfiable_theory(gamma)
        ok = bool(res) and all(check(res.witness, res.witness.world, g) for g in gamma)
        rep.passed &= ok
        size = res.witness.states if res else 0
        rep.details.append(f"n={n}: {len(gamma)} formulas, "
                           f"{'SAT with a ' + str(size) + '-state witness' if res else 'UNSAT'}")
    rep.details.append("the infinite theory has no countable model; not checked here")
    return rep


def six_state_model() -> FiniteModel:
    """States 2k and 2k+1 have equal rows and equal valuations."""
    h, q = Fraction(1, 2), Fraction(1, 4)
    rows = [
        [0, h, q, 0, q, 0],
        [0, h, q, 0, q, 0],
        [h, 0, 0, 0, 0, h],
        [h, 0, 0, 0, 0, h],
        [0, 0, q, q, 0, h],
        [0, 0, q, q, 0, h],
    ]
    return FiniteModel.build(rows, {"p": [0, 1, 4, 5], "q": [2, 3, 4, 5]}, 0)


def _ls_restrict() -> Report:
    rep = Report("ls-restrict", True)
    m = six_state_model()
    f = parse("L[1/2] (p & !q) | M[1/4] L[1/2] q")
    r = restrict(m, f)
    reps = restriction_map(m, f)
    rep.details.append(f"closure of {format_formula(f)}: {m.states} -> {r.states} states {reps}")
    for g in subformulas(f):
        src = extension(m, g)
        dst = extension(r, g)
        ok = all((old in src) == (new in dst) for new, old in enumerate(reps))
        rep.passed &= ok
        if not ok:
            rep.details.append(f"not preserved: {format_formula(g)}")
    rep.passed &= r.states < m.states
    rep.details.append(f"all {len(subformulas(f))} closure formulas preserved: {rep.passed}")
    return rep


CASES: dict[str, GalleryCase] = {c.name: c for c in [
    GalleryCase("eq1-prefix", "finite prefixes of the non-compact PL theory are satisfiable", _eq1_prefix),
    GalleryCase("exm-pr-finite", "two-state models for finite parts of the positive theory", _exm_pr_finite),
    GalleryCase("exm-pr-fincof", "finitely additive model on the naturals", _exm_pr_fincof),
    GalleryCase("ls-uncountable", "finite parts of the theory without countable models", _ls_uncountable),
    GalleryCase("ls-restrict", "restriction to closure atoms preserves satisfaction", _ls_restrict),
]}


def run_case(name: str) -> Report:
    try:
        case = CASES[name]
    except KeyError:
        raise UnknownCase(f"unknown gallery case {name!r}; known: {', '.join(CASES)}") from None
    return case.run()
