"""Lattices of sets, valuations and finitely additive extension on finite universes.

Sets are ``frozenset`` of points ``0..n-1``. On a finite universe the
algebra generated by a family is the union-closure of its atoms, so the
extension theorems become exact linear algebra on atom masses.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping

from .errors import (AmbiguousExtension, InconsistentValuation, NotALattice,
                     NotAnAlgebra)
from .rational import to_rational

Subset = frozenset


@dataclass(frozen=True)
class SetFamily:
    size: int
    members: tuple[frozenset[int], ...]

    @classmethod
    def of(cls, size: int, members: Iterable[Iterable[int]]) -> "SetFamily":
        out = []
        for m in members:
            s = frozenset(m)
            if any(not 0 <= x < size for x in s):
                raise ValueError(f"member {sorted(s)} not inside a universe of size {size}")
            out.append(s)
        return cls(size, _canonical(out))

    @property
    def universe(self) -> frozenset[int]:
        return frozenset(range(self.size))

    def __contains__(self, s) -> bool:
        return frozenset(s) in set(self.members)

    def __len__(self):
        return len(self.members)

    def is_lattice(self) -> bool:
        ms = set(self.members)
        if frozenset() not in ms or self.universe not in ms:
            return False
        return all(a | b in ms and a & b in ms for a, b in combinations(self.members, 2))

    def is_algebra(self) -> bool:
        ms = set(self.members)
        return self.is_lattice() and all(self.universe - a in ms for a in ms)


def _canonical(sets: Iterable[frozenset[int]]) -> tuple[frozenset[int], ...]:
    return tuple(sorted(set(sets), key=lambda s: (len(s), sorted(s))))


@dataclass(frozen=True)
class SetValuation:
    family: SetFamily
    values: Mapping[frozenset[int], Fraction]

    @classmethod
    def of(cls, family: SetFamily, values: Mapping) -> "SetValuation":
        vals = {frozenset(k): to_rational(v) for k, v in values.items()}
        missing = [sorted(m) for m in family.members if m not in vals]
        if missing:
            raise ValueError(f"no value for members {missing}")
        return cls(family, {m: vals[m] for m in family.members})

    def __call__(self, s) -> Fraction:
        return self.values[frozenset(s)]


def lattice_closure(f: SetFamily) -> SetFamily:
    """Smallest lattice containing ``f``, the empty set and the universe."""
    ms = set(f.members) | {frozenset(), f.universe}
    frontier = list(ms)
    while frontier:
        new = set()
        for a in frontier:
            for b in list(ms):
                for c in (a | b, a & b):
                    if c not in ms and c not in new:
                        new.add(c)
        ms |= new
        frontier = list(new)
    return SetFamily(f.size, _canonical(ms))


def atoms(f: SetFamily) -> list[frozenset[int]]:
    """Atoms of the algebra generated by ``f``: points with equal membership profiles."""
    blocks: dict[tuple[bool, ...], list[int]] = {}
    for x in range(f.size):
        blocks.setdefault(tuple(x in m for m in f.members), []).append(x)
    return sorted((frozenset(b) for b in blocks.values()), key=min)


def _unions(parts: list[frozenset[int]]) -> list[frozenset[int]]:
    out = []
    for mask in range(2 ** len(parts)):
        s = frozenset().union(*(p for i, p in enumerate(parts) if mask >> i & 1))
        out.append(s)
    return out


def generated_algebra(f: SetFamily) -> SetFamily:
    return SetFamily(f.size, _canonical(_unions(atoms(f))))


def is_valuation(v: SetValuation) -> list[str]:
    """Violated valuation axioms with witnesses; empty when all hold."""
    fam = v.family
    if not fam.is_lattice():
        raise NotALattice("family is not a lattice")
    out = []
    if v(frozenset()) != 0:
        out.append(f"strictness: mu(empty) = {v(frozenset())}")
    for a in fam.members:
        if v(a) < 0:
            out.append(f"non-negativity: mu({sorted(a)}) = {v(a)}")
    for a, b in combinations(fam.members, 2):
        if a <= b and v(a) > v(b):
            out.append(f"monotonicity: {sorted(a)} <= {sorted(b)} but {v(a)} > {v(b)}")
        elif b <= a and v(b) > v(a):
            out.append(f"monotonicity: {sorted(b)} <= {sorted(a)} but {v(b)} > {v(a)}")
        if v(a) + v(b) != v(a | b) + v(a & b):
            out.append(f"modularity: {sorted(a)}, {sorted(b)}: "
                       f"{v(a) + v(b)} != {v(a | b) + v(a & b)}")
    return out


def _solve_exact(rows: list[list[Fraction]], rhs: list[Fraction], unknowns: int):
    """Gauss-Jordan elimination. Returns (solution, rank) or None if inconsistent."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    pivots = []
    r = 0
    for c in range(unknowns):
        p = next((i for i in range(r, len(aug)) if aug[i][c] != 0), None)
        if p is None:
            continue
        aug[r], aug[p] = aug[p], aug[r]
        pv = aug[r][c]
        aug[r] = [x / pv for x in aug[r]]
        for i in range(len(aug)):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(aug)):
        if aug[i][-1] != 0:
            return None
    sol = [Fraction(0)] * unknowns
    for i, c in enumerate(pivots):
        sol[c] = aug[i][-1]
    return sol, len(pivots)


def sht_extend(v: SetValuation) -> SetValuation:
    """The unique finitely additive extension of a valuation to the generated algebra.

    Unknowns are the atom masses; each lattice member contributes the equation
    mu(member) = sum of the masses of its atoms.
    """
    problems = is_valuation(v)
    if problems:
        raise InconsistentValuation("; ".join(problems))
    ats = atoms(v.family)
    rows = [[Fraction(1 if a <= m else 0) for a in ats] for m in v.family.members]
    solved = _solve_exact(rows, [v(m) for m in v.family.members], len(ats))
    if solved is None:
        raise InconsistentValuation("no atom masses reproduce the valuation")
    masses, rank = solved
    if rank < len(ats):
        raise AmbiguousExtension(f"{len(ats) - rank} atom masses are undetermined")
    if any(x < 0 for x in masses):
        raise InconsistentValuation("extension would assign negative mass to an atom")
    return _from_atom_masses(v.family.size, ats, masses)


def _from_atom_masses(size, ats, masses) -> SetValuation:
    values = {}
    for mask in range(2 ** len(ats)):
        s = frozenset().union(*(a for i, a in enumerate(ats) if mask >> i & 1))
        values[s] = sum((x for i, x in enumerate(masses) if mask >> i & 1), Fraction(0))
    fam = SetFamily(size, _canonical(values))
    return SetValuation(fam, {m: values[m] for m in fam.members})


def is_finitely_additive(v: SetValuation):
    """None when additive on all disjoint member pairs, else the first failing pair."""
    if not v.family.is_algebra():
        raise NotAnAlgebra("family is not an algebra")
    for a, b in combinations(v.family.members, 2):
        if not a & b and v(a | b) != v(a) + v(b):
            return (a, b)
    return None


def extend_to_powerset(v: SetValuation) -> SetValuation:
    """Move each algebra atom's mass to its least point, giving a powerset measure."""
    if not v.family.is_algebra():
        raise NotAnAlgebra("family is not an algebra")
    point = [Fraction(0)] * v.family.size
    for a in atoms(v.family):
        point[min(a)] = v(a)
    singletons = [frozenset({x}) for x in range(v.family.size)]
    return _from_atom_masses(v.family.size, singletons, point)
