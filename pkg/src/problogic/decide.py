"""Satisfiability for probability logic by type elimination over LP.

A formula's closure has two kinds of constituents: its propositions and
one constraint atom ``mass(subject) <rel> r`` per distinct modal
subformula of its negation normal form. A candidate is a truth assignment
to the constituents, encoded as an int bitset (constituent ``i`` is bit
``i``). Candidate ``A`` survives a round when some distribution over the
surviving candidates gives each subject a mass that matches ``A``'s atom
bits. A set atom contributes its own row and an unset atom the complementary
row (GE->LT, LE->GT, LT->GE, GT->LE). The surviving candidates at the
fixpoint are the realizable types, so a formula is satisfiable iff one of
them makes it true.

Two reductions keep this tractable; neither changes the verdict:

* Atoms that share a subject constrain a single number, the subject's mass.
  So their bits jointly say "the mass lies in this interval". Only the bit
  patterns whose interval within [0, 1] is non-empty are generated; every
  other pattern has an infeasible system and would be removed in the first
  round anyway. The rows a pattern emits are the two interval bounds, which
  intersect to the same set as the per-atom rows (:func:`atom_rows`).
* Candidates with equal truth values on every subject are interchangeable
  inside a system, so the LP has one variable per such group. A group's
  mass goes to its least-index member.

Either way, a subject's mass is what one world assigns to the set of
successor worlds satisfying it. The subformula order makes each candidate's
truth values depend only on strictly smaller subjects, so one pool iterated
to its fixpoint is equivalent to processing depth strata separately.
"""
from __future__ import annotations

import enum
import os
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import product
from typing import Callable, Iterable, Sequence, Union

from . import lp
from .errors import (CandidateBudgetExceeded, FormulaSyntaxError,
                     GammaUnsatisfiable, NotPositive, ProblogicError)
from .models import FiniteModel, check, validate
from .rational import Relation, format_rational
from .syntax import (ConstraintAtom, Formula, Fragment, L, Lit, M, NnfAnd,
                     NnfFormula, NnfOr, classify, conjoin, format_formula,
                     nnf, nnf_atoms, parse, positive_dnf, propositions)

DEFAULT_BUDGET = 2**20


class ExtractionError(ProblogicError):
    """An extracted witness failed exact re-verification (a bug, not a verdict)."""


# ---------------------------------------------------------------------------
# Closure


@dataclass(frozen=True)
class Closure:
    formula: Formula
    propositions: tuple[str, ...]
    atoms: tuple[ConstraintAtom, ...]

    @property
    def constituents(self) -> tuple[Union[str, ConstraintAtom], ...]:
        return self.propositions + self.atoms

    def bit(self, constituent: Union[str, ConstraintAtom]) -> int:
        return self.constituents.index(constituent)

    def assignment(self, bits: int) -> dict:
        return {c: bool(bits >> i & 1) for i, c in enumerate(self.constituents)}

    @property
    def subjects(self) -> tuple[Formula, ...]:
        return tuple(dict.fromkeys(a.subject for a in self.atoms))

    def evaluator(self, g: NnfFormula) -> Callable[[int], bool]:
        """Compile ``g`` into a predicate on candidate bitsets.

        Every literal and atom of ``g`` must be a constituent.
        """
        index = {c: i for i, c in enumerate(self.constituents)}

        def comp(h: NnfFormula):
            if isinstance(h, Lit):
                i = index[h.name]
                if h.positive:
                    return lambda b: bool(b >> i & 1)
                return lambda b: not b >> i & 1
            if isinstance(h, ConstraintAtom):
                i = index[h]
                return lambda b: bool(b >> i & 1)
            lf, rf = comp(h.left), comp(h.right)
            if isinstance(h, NnfAnd):
                return lambda b: lf(b) and rf(b)
            return lambda b: lf(b) or rf(b)

        return comp(g)


def closure_of(f: Formula) -> Closure:
    """Propositions in first-occurrence order, then atoms in post-order."""
    atoms: dict[ConstraintAtom, None] = {}

    def visit(g: NnfFormula) -> None:
        for a in nnf_atoms(g):
            if a not in atoms:
                visit(nnf(a.subject))
                atoms.setdefault(a, None)

    visit(nnf(f))
    return Closure(f, propositions(f), tuple(atoms))


def atom_rows(closure: Closure, bits: int) -> list[tuple[Formula, Relation, Fraction]]:
    """Per-atom rows of a candidate: set atoms as written, unset ones complemented."""
    rows = []
    offset = len(closure.propositions)
    for k, a in enumerate(closure.atoms):
        rel = a.relation if bits >> (offset + k) & 1 else a.relation.complement()
        rows.append((a.subject, rel, a.threshold))
    return rows


# ---------------------------------------------------------------------------
# Regions of a subject's mass


@dataclass(frozen=True)
class Region:
    """An interval of [0, 1] on which every atom of one subject is constant."""

    lo: Fraction
    lo_closed: bool
    hi: Fraction
    hi_closed: bool
    atom_bits: int  # bits of this subject's atoms that are set on the interval

    def contains(self, x: Fraction) -> bool:
        above = x >= self.lo if self.lo_closed else x > self.lo
        below = x <= self.hi if self.hi_closed else x < self.hi
        return above and below

    def rows(self) -> list[tuple[Relation, Fraction]]:
        out = []
        if not (self.lo == 0 and self.lo_closed):
            out.append((Relation.GE if self.lo_closed else Relation.GT, self.lo))
        if not (self.hi == 1 and self.hi_closed):
            out.append((Relation.LE if self.hi_closed else Relation.LT, self.hi))
        return out


def subject_regions(atoms: Sequence[tuple[int, ConstraintAtom]]) -> list[Region]:
    """Partition [0, 1] into maximal intervals of constant atom truth.

    ``atoms`` pairs each atom with its bit position.
    """
    points = sorted({Fraction(0), Fraction(1)} | {a.threshold for _, a in atoms})
    cells = []  # (lo, lo_closed, hi, hi_closed, sample)
    for k, x in enumerate(points):
        cells.append((x, True, x, True, x))
        if k + 1 < len(points):
            y = points[k + 1]
            cells.append((x, False, y, False, (x + y) / 2))

    def pattern(x: Fraction) -> int:
        return sum(1 << i for i, a in atoms if a.relation.holds(x, a.threshold))

    regions: list[Region] = []
    for lo, lc, hi, hc, sample in cells:
        bits = pattern(sample)
        if regions and regions[-1].atom_bits == bits:
            prev = regions[-1]
            regions[-1] = Region(prev.lo, prev.lo_closed, hi, hc, bits)
        else:
            regions.append(Region(lo, lc, hi, hc, bits))
    return regions


# ---------------------------------------------------------------------------
# Elimination


@dataclass(frozen=True)
class Survivor:
    bits: int
    distribution: dict[int, Fraction]  # successor candidate bits -> mass


@dataclass
class Elimination:
    closure: Closure
    survivors: list[Survivor]
    # Final pool grouped by subject-truth signature; see module docstring.
    groups: list[tuple[bool, ...]] = field(repr=False)
    representatives: list[int] = field(repr=False)
    rounds: int = 0
    lp_calls: int = 0

    def subject_index(self, subject: Formula) -> int:
        return self.closure.subjects.index(subject)


class _Engine:
    def __init__(self, closure: Closure, budget: int):
        self.closure = closure
        self.subjects = closure.subjects
        offset = len(closure.propositions)
        by_subject: dict[Formula, list[tuple[int, ConstraintAtom]]] = {s: [] for s in self.subjects}
        for k, a in enumerate(closure.atoms):
            by_subject[a.subject].append((offset + k, a))
        self.regions = [subject_regions(by_subject[s]) for s in self.subjects]
        self.prop_count = len(closure.propositions)
        size = 2 ** self.prop_count
        for r in self.regions:
            size *= len(r)
        if size > budget:
            raise CandidateBudgetExceeded(
                f"{size} candidates exceed the budget of {budget}")
        self.subject_eval = [closure.evaluator(nnf(s)) for s in self.subjects]
        self.lp_calls = 0
        self._sig_cache: dict[int, tuple[bool, ...]] = {}

    def bits(self, propbits: int, pattern: tuple[int, ...]) -> int:
        b = propbits
        for j, ri in enumerate(pattern):
            b |= self.regions[j][ri].atom_bits
        return b

    def signature(self, bits: int) -> tuple[bool, ...]:
        sig = self._sig_cache.get(bits)
        if sig is None:
            sig = tuple(ev(bits) for ev in self.subject_eval)
            self._sig_cache[bits] = sig
        return sig

    def pool_groups(self, patterns: Iterable[tuple[int, ...]]):
        reps: dict[tuple[bool, ...], int] = {}
        for pat in patterns:
            atom_part = self.bits(0, pat)
            for propbits in range(2 ** self.prop_count):
                b = atom_part | propbits
                sig = self.signature(b)
                if sig not in reps or b < reps[sig]:
                    reps[sig] = b
        order = sorted(reps, key=reps.__getitem__)
        return order, [reps[s] for s in order]

    def region_of(self, j: int, x: Fraction) -> int:
        for ri, reg in enumerate(self.regions[j]):
            if reg.contains(x):
                return ri
        raise AssertionError("regions do not cover [0, 1]")

    def system_for(self, groups, constraints) -> lp.LinearSystem:
        """``constraints``: (subject index, relation, rhs) rows over the groups."""
        n = len(groups)
        rows = [lp.Constraint({g: Fraction(1) for g in range(n)}, Relation.EQ, Fraction(1))]
        for j, rel, rhs in constraints:
            coeffs = {g: Fraction(1) for g, sig in enumerate(groups) if sig[j]}
            rows.append(lp.Constraint(coeffs, rel, rhs))
        return lp.LinearSystem(n, tuple(rows))

    def solve_prefix(self, groups, prefix) -> dict | None:
        rows = [(j, rel, rhs) for j, ri in enumerate(prefix) for rel, rhs in self.regions[j][ri].rows()]
        self.lp_calls += 1
        out = lp.strict_feasible(self.system_for(groups, rows))
        if isinstance(out, lp.Infeasible):
            return None
        return {groups[g]: x for g, x in enumerate(out.point) if x}

    def realized_pattern(self, witness: dict) -> tuple[int, ...]:
        out = []
        for j in range(len(self.subjects)):
            mass = sum((x for sig, x in witness.items() if sig[j]), Fraction(0))
            out.append(self.region_of(j, mass))
        return tuple(out)

    def first_round(self, groups) -> dict[tuple[int, ...], dict]:
        """Depth-first search over region choices, one subject per level.

        An infeasible prefix prunes its whole subtree. Each solved system's
        point realizes one complete pattern, which is then known feasible.
        """
        nsub = len(self.subjects)
        leaves: dict[tuple[int, ...], dict] = {}
        known: dict[tuple[int, ...], dict] = {}

        def record(w: dict) -> None:
            pat = self.realized_pattern(w)
            leaves.setdefault(pat, w)
            for k in range(nsub + 1):
                known.setdefault(pat[:k], w)

        root = self.solve_prefix(groups, ())
        if root is None:
            return {}
        record(root)
        stack = [()]
        while stack:
            prefix = stack.pop()
            if len(prefix) == nsub:
                continue
            j = len(prefix)
            children = []
            for ri in range(len(self.regions[j])):
                child = prefix + (ri,)
                if child not in known:
                    w = self.solve_prefix(groups, child)
                    if w is None:
                        continue
                    record(w)
                children.append(child)
            stack.extend(reversed(children))
        return leaves

    def run(self) -> Elimination:
        all_patterns = list(product(*(range(len(r)) for r in self.regions)))
        groups, reps = self.pool_groups(all_patterns)
        leaves = self.first_round(groups)
        rounds = 1
        while True:
            patterns = sorted(leaves)
            groups, reps = self.pool_groups(patterns)
            present = set(groups)
            nxt: dict[tuple[int, ...], dict] = {}
            for pat in patterns:
                w = leaves[pat]
                if not set(w) <= present:
                    w = self.solve_prefix(groups, pat)
                    if w is None:
                        continue
                nxt[pat] = w
            rounds += 1
            if len(nxt) == len(leaves):
                leaves = nxt
                break
            leaves = nxt

        rep_of = dict(zip(groups, reps))
        survivors = []
        for pat, w in leaves.items():
            dist = {}
            for sig, x in w.items():
                dist[rep_of[sig]] = dist.get(rep_of[sig], Fraction(0)) + x
            dist = dict(sorted(dist.items()))
            atom_part = self.bits(0, pat)
            for propbits in range(2 ** self.prop_count):
                survivors.append(Survivor(atom_part | propbits, dist))
        survivors.sort(key=lambda s: s.bits)
        return Elimination(self.closure, survivors, groups, reps, rounds, self.lp_calls)


def eliminate(closure: Closure, budget: int = DEFAULT_BUDGET) -> Elimination:
    """Greatest fixpoint of candidate elimination, with witness distributions."""
    return _Engine(closure, budget).run()


# ---------------------------------------------------------------------------
# Satisfiability


@dataclass(frozen=True)
class Sat:
    witness: FiniteModel

    def __bool__(self):
        return True


@dataclass(frozen=True)
class Unsat:
    def __bool__(self):
        return False


SatResult = Union[Sat, Unsat]


def _witness(elim: Elimination, world_bits: int) -> FiniteModel:
    by_bits = {s.bits: s for s in elim.survivors}
    seen = {world_bits}
    queue = deque([world_bits])
    while queue:
        b = queue.popleft()
        for succ in by_bits[b].distribution:
            if succ not in seen:
                seen.add(succ)
                queue.append(succ)
    states = sorted(seen)
    index = {b: i for i, b in enumerate(states)}
    kernel = []
    for b in states:
        row = [Fraction(0)] * len(states)
        for succ, x in by_bits[b].distribution.items():
            row[index[succ]] = x
        kernel.append(tuple(row))
    valuation = {p: frozenset(index[b] for b in states if b >> i & 1)
                 for i, p in enumerate(elim.closure.propositions)}
    return FiniteModel(len(states), tuple(kernel), valuation, index[world_bits])


def satisfiable(f: Formula, budget: int = DEFAULT_BUDGET) -> SatResult:
    """Decide ``f``; a Sat verdict carries a re-verified finite witness.

    The witness keeps only the candidates reachable from the designated one.
    """
    closure = closure_of(f)
    elim = eliminate(closure, budget)
    holds = closure.evaluator(nnf(f))
    world = next((s.bits for s in elim.survivors if holds(s.bits)), None)
    if world is None:
        return Unsat()
    m = _witness(elim, world)
    if validate(m) or not check(m, m.world, f):
        raise ExtractionError(f"witness fails to satisfy {format_formula(f)}")
    return Sat(m)


_TRIVIAL = FiniteModel(1, ((Fraction(1),),), {}, 0)


def satisfiable_theory(fs: Sequence[Formula], budget: int = DEFAULT_BUDGET) -> SatResult:
    if not fs:
        return Sat(_TRIVIAL)
    return satisfiable(conjoin(fs), budget)


# ---------------------------------------------------------------------------
# Threshold tightening and maximal extension


class Op(enum.Enum):
    L = "L"
    M = "M"

    def apply(self, r, phi: Formula) -> Formula:
        return L(r, phi) if self is Op.L else M(r, phi)


@dataclass(frozen=True)
class AlreadySat:
    pass


@dataclass(frozen=True)
class Tightened:
    """``max_value`` is the extreme mass of phi over models of gamma.

    For ``L`` it is a maximum and ``max_value < threshold < r``; for ``M`` a
    minimum and ``r < threshold < max_value``.
    """

    max_value: Fraction
    threshold: Fraction


def _require_positive(fs: Iterable[Formula], what: str) -> None:
    for f in fs:
        if classify(f) is Fragment.PL:
            raise NotPositive(f"{what} is not positive: {format_formula(f)}")


def extreme_mass(gamma: Sequence[Formula], phi: Formula, maximize: bool,
                 budget: int = DEFAULT_BUDGET, probe: Formula | None = None) -> Fraction | None:
    """Max (or min) of phi's mass at a root world satisfying gamma.

    One system per positive DNF clause of gamma, over the candidates that
    survive elimination of the closure of gamma plus ``probe``. None when no
    clause is feasible.
    """
    probe = probe if probe is not None else L(0, phi)
    combined = conjoin(list(gamma) + [probe])
    elim = eliminate(closure_of(combined), budget)
    engine_groups = elim.groups
    subj = elim.closure.subjects
    phi_j = subj.index(phi)
    best = None
    for clause in positive_dnf(conjoin(gamma)):
        lits = [c for c in clause if isinstance(c, Lit)]
        if any(Lit(x.name, not x.positive) in clause for x in lits):
            continue
        rows = [(subj.index(a.subject), a.relation, a.threshold)
                for a in clause if isinstance(a, ConstraintAtom)]
        n = len(engine_groups)
        cons = [lp.Constraint({g: Fraction(1) for g in range(n)}, Relation.EQ, Fraction(1))]
        for j, rel, rhs in rows:
            cons.append(lp.Constraint(
                {g: Fraction(1) for g, sig in enumerate(engine_groups) if sig[j]}, rel, rhs))
        objective = {g: Fraction(1) for g, sig in enumerate(engine_groups) if sig[phi_j]}
        system = lp.LinearSystem(n, tuple(cons))
        out = lp.maximize(objective, system) if maximize else lp.minimize(objective, system)
        if isinstance(out, lp.Optimal):
            if best is None or (out.value > best if maximize else out.value < best):
                best = out.value
    return best


def tighten(gamma: Sequence[Formula], op: Op, r, phi: Formula,
            budget: int = DEFAULT_BUDGET) -> Union[AlreadySat, Tightened]:
    """A threshold strictly between r and the attainable extreme of phi's mass.

    If ``gamma + [op_r phi]`` is unsatisfiable, the returned threshold keeps
    it unsatisfiable; ``threshold`` is the midpoint of r and the extreme.
    """
    _require_positive(gamma, "gamma member")
    _require_positive([phi], "phi")
    probe = op.apply(r, phi)
    r = probe.threshold
    if not satisfiable_theory(gamma, budget):
        raise GammaUnsatisfiable("gamma is unsatisfiable")
    if satisfiable_theory(list(gamma) + [probe], budget):
        return AlreadySat()
    best = extreme_mass(gamma, phi, maximize=op is Op.L, budget=budget, probe=probe)
    if best is None:
        raise GammaUnsatisfiable("no clause of gamma is satisfiable")
    return Tightened(best, (best + r) / 2)


def extend_maximal(gamma: Sequence[Formula], universe: Sequence[Formula],
                   budget: int = DEFAULT_BUDGET) -> list[Formula]:
    """Greedily add universe members, in order, while staying satisfiable."""
    _require_positive(gamma, "gamma member")
    _require_positive(universe, "universe member")
    current = list(gamma)
    if not satisfiable_theory(current, budget):
        raise GammaUnsatisfiable("gamma is unsatisfiable")
    for psi in universe:
        if satisfiable_theory(current + [psi], budget):
            current.append(psi)
    return current


# ---------------------------------------------------------------------------
# Theory files


def parse_theory(text: str) -> list[Formula]:
    """One formula per line; ``#`` starts a comment; blank lines are skipped."""
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        body = line.split("#", 1)[0]
        if not body.strip():
            continue
        try:
            out.append(parse(body))
        except FormulaSyntaxError as exc:
            raise FormulaSyntaxError(f"line {lineno}: {exc.message}", exc.position) from None
    return out


def load_theory(path: str | os.PathLike) -> list[Formula]:
    with open(path, encoding="utf-8") as fh:
        return parse_theory(fh.read())
