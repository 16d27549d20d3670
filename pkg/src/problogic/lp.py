"""Exact rational linear programming.

Two-phase dense-tableau simplex with Bland's rule. Every variable is
implicitly non-negative. The kernel computes with ``gmpy2.mpq`` and converts
to :class:`~fractions.Fraction` at the boundary; every returned point is
re-checked against the original constraints before it leaves this module.

Strict rows (``<``, ``>``) are handled by :func:`strict_feasible`, which
relaxes all of them with a single shared slack ``t`` and maximizes it.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence, Union

import gmpy2

from .errors import LpInternalError
from .rational import Relation, format_rational, to_rational

log = logging.getLogger(__name__)

PIVOT_GUARD = 10**6

_ZERO = gmpy2.mpq(0)
_ONE = gmpy2.mpq(1)


@dataclass(frozen=True)
class Constraint:
    coeffs: Mapping[int, Fraction]
    relation: Relation
    rhs: Fraction

    def lhs(self, point: Sequence[Fraction]) -> Fraction:
        return sum((c * point[i] for i, c in self.coeffs.items()), Fraction(0))

    def satisfied_by(self, point: Sequence[Fraction]) -> bool:
        return self.relation.holds(self.lhs(point), self.rhs)

    def __str__(self):
        terms = " + ".join(f"{format_rational(c)}*x{i}" for i, c in sorted(self.coeffs.items()))
        return f"{terms or '0'} {self.relation.value} {format_rational(self.rhs)}"


def constraint(coeffs: Mapping[int, object], relation: Relation, rhs) -> Constraint:
    """Build a :class:`Constraint`, dropping zero coefficients."""
    clean = {i: to_rational(c) for i, c in coeffs.items()}
    return Constraint({i: c for i, c in sorted(clean.items()) if c}, relation, to_rational(rhs))


@dataclass(frozen=True)
class LinearSystem:
    variable_count: int
    constraints: tuple[Constraint, ...]

    def __post_init__(self):
        if self.variable_count < 1:
            raise ValueError("a linear system needs at least one variable")
        for c in self.constraints:
            for i in c.coeffs:
                if not 0 <= i < self.variable_count:
                    raise ValueError(f"variable index {i} out of range")

    @property
    def has_strict(self) -> bool:
        return any(c.relation.strict for c in self.constraints)

    def violations(self, point: Sequence[Fraction]) -> list[Constraint]:
        bad = [c for c in self.constraints if not c.satisfied_by(point)]
        if len(point) != self.variable_count or any(x < 0 for x in point):
            bad.append(Constraint({}, Relation.GE, Fraction(0)))
        return bad

    def __str__(self):
        return "\n".join(str(c) for c in self.constraints)


def system(variable_count: int, constraints) -> LinearSystem:
    return LinearSystem(variable_count, tuple(constraints))


@dataclass(frozen=True)
class Feasible:
    point: tuple[Fraction, ...]


@dataclass(frozen=True)
class Infeasible:
    pass


@dataclass(frozen=True)
class Optimal:
    value: Fraction
    point: tuple[Fraction, ...]


@dataclass(frozen=True)
class Unbounded:
    pass


LpOutcome = Union[Feasible, Infeasible, Optimal, Unbounded]


def _mpq(q: Fraction):
    return gmpy2.mpq(q.numerator, q.denominator)


def _frac(x) -> Fraction:
    return Fraction(int(x.numerator), int(x.denominator))


class _Tableau:
    """Dense simplex tableau. Rows are lists of mpq with the rhs last."""

    def __init__(self, rows, basis, ncols):
        self.rows = rows
        self.basis = basis
        self.ncols = ncols
        self.obj: list = []
        self.pivots = 0

    def set_objective(self, costs) -> None:
        # obj[j] is the reduced cost of column j; obj[-1] holds -z.
        obj = list(costs) + [_ZERO]
        for row, b in zip(self.rows, self.basis):
            cb = obj[b]
            if cb:
                for k, v in enumerate(row):
                    if v:
                        obj[k] -= cb * v
        self.obj = obj

    def pivot(self, r: int, j: int) -> None:
        self.pivots += 1
        if self.pivots > PIVOT_GUARD:
            raise LpInternalError(f"pivot guard of {PIVOT_GUARD} exceeded")
        row = self.rows[r]
        p = row[j]
        if p != 1:
            inv = 1 / p
            row = [v * inv if v else v for v in row]
            self.rows[r] = row
        nz = [(k, v) for k, v in enumerate(row) if v]
        for i, other in enumerate(self.rows):
            if i != r:
                f = other[j]
                if f:
                    for k, v in nz:
                        other[k] -= f * v
        f = self.obj[j]
        if f:
            obj = self.obj
            for k, v in nz:
                obj[k] -= f * v
        self.basis[r] = j

    def optimize(self, allowed: int) -> bool:
        """Bland's rule on columns < ``allowed``. False when unbounded."""
        while True:
            obj = self.obj
            j = next((k for k in range(allowed) if obj[k] > 0), None)
            if j is None:
                if log.isEnabledFor(logging.DEBUG):
                    log.debug("optimal after %d pivots\n%s", self.pivots, self.dump())
                return True
            best = None
            for i, row in enumerate(self.rows):
                a = row[j]
                if a > 0:
                    ratio = row[-1] / a
                    key = (ratio, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return False
            self.pivot(best[1], j)

    def value(self):
        return -self.obj[-1]

    def point(self, n: int) -> list:
        x = [_ZERO] * n
        for row, b in zip(self.rows, self.basis):
            if b < n:
                x[b] = row[-1]
        return x

    def dump(self) -> str:
        lines = [f"basis={self.basis}"]
        for row in self.rows:
            lines.append(" ".join(str(v) for v in row))
        lines.append("obj " + " ".join(str(v) for v in self.obj))
        return "\n".join(lines)


def _solve(n: int, constraints: Sequence[Constraint], objective: Mapping[int, Fraction] | None):
    """Returns ("infeasible"|"unbounded"|"optimal", value, point as Fractions)."""
    normalized = []
    for c in constraints:
        if c.relation.strict:
            raise ValueError("strict rows must go through strict_feasible")
        coeffs = {i: _mpq(v) for i, v in c.coeffs.items()}
        rhs = _mpq(c.rhs)
        rel = c.relation
        if rhs < 0:
            coeffs = {i: -v for i, v in coeffs.items()}
            rhs = -rhs
            rel = {Relation.LE: Relation.GE, Relation.GE: Relation.LE}.get(rel, rel)
        normalized.append((coeffs, rel, rhs))

    n_slack = sum(1 for _, rel, _ in normalized if rel is not Relation.EQ)
    n_art = sum(1 for _, rel, _ in normalized if rel is not Relation.LE)
    ncols = n + n_slack + n_art
    art_start = n + n_slack
    rows, basis = [], []
    s_idx, a_idx = n, art_start
    for coeffs, rel, rhs in normalized:
        row = [_ZERO] * (ncols + 1)
        for i, v in coeffs.items():
            row[i] = v
        row[-1] = rhs
        if rel is Relation.LE:
            row[s_idx] = _ONE
            basis.append(s_idx)
            s_idx += 1
        else:
            if rel is Relation.GE:
                row[s_idx] = -_ONE
                s_idx += 1
            row[a_idx] = _ONE
            basis.append(a_idx)
            a_idx += 1
        rows.append(row)

    tab = _Tableau(rows, basis, ncols)
    if n_art:
        tab.set_objective([_ZERO] * art_start + [-_ONE] * n_art)
        tab.optimize(ncols)
        if tab.value() < 0:
            return "infeasible", None, None
        # Drive zero-level artificials out of the basis; drop redundant rows.
        r = 0
        while r < len(tab.rows):
            if tab.basis[r] >= art_start:
                row = tab.rows[r]
                j = next((k for k in range(art_start) if row[k]), None)
                if j is None:
                    del tab.rows[r]
                    del tab.basis[r]
                    continue
                tab.pivot(r, j)
            r += 1

    costs = [_ZERO] * (ncols)
    for i, v in (objective or {}).items():
        costs[i] = _mpq(v)
    tab.set_objective(costs)
    if objective and not tab.optimize(art_start):
        return "unbounded", None, None
    x = tab.point(n)
    return "optimal", _frac(tab.value()), [_frac(v) for v in x]


def _verified(s: LinearSystem, point: Sequence[Fraction]) -> tuple[Fraction, ...]:
    bad = s.violations(point)
    if bad:
        raise LpInternalError(f"solver point violates {', '.join(map(str, bad))}")
    return tuple(point)


def feasible(s: LinearSystem) -> Union[Feasible, Infeasible]:
    """Feasibility of a system without strict rows."""
    if s.has_strict:
        raise ValueError("system has strict rows; use strict_feasible")
    status, _, x = _solve(s.variable_count, s.constraints, None)
    if status == "infeasible":
        return Infeasible()
    return Feasible(_verified(s, x))


def maximize(objective: Mapping[int, object], s: LinearSystem) -> Union[Optimal, Infeasible, Unbounded]:
    if s.has_strict:
        raise ValueError("system has strict rows; maximize accepts LE/GE/EQ only")
    obj = {i: to_rational(c) for i, c in objective.items()}
    for i in obj:
        if not 0 <= i < s.variable_count:
            raise ValueError(f"objective variable {i} out of range")
    status, value, x = _solve(s.variable_count, s.constraints, obj)
    if status == "infeasible":
        return Infeasible()
    if status == "unbounded":
        return Unbounded()
    point = _verified(s, x)
    check = sum((c * point[i] for i, c in obj.items()), Fraction(0))
    if check != value:
        raise LpInternalError(f"objective mismatch {check} != {value}")
    return Optimal(value, point)


def minimize(objective: Mapping[int, object], s: LinearSystem) -> Union[Optimal, Infeasible, Unbounded]:
    out = maximize({i: -to_rational(c) for i, c in objective.items()}, s)
    if isinstance(out, Optimal):
        return Optimal(-out.value, out.point)
    return out


def strict_feasible(s: LinearSystem) -> Union[Feasible, Infeasible]:
    """Feasibility of a system that may contain ``<`` and ``>`` rows.

    Every strict row shares one slack ``t``: ``a.x < b`` becomes
    ``a.x + t <= b`` and ``a.x > b`` becomes ``a.x - t >= b``. With ``t <= 1``
    the system is strictly feasible iff the maximum of ``t`` is positive.
    """
    if not s.has_strict:
        return feasible(s)
    n = s.variable_count
    t = n
    relaxed = []
    for c in s.constraints:
        if c.relation is Relation.LT:
            relaxed.append(Constraint({**c.coeffs, t: Fraction(1)}, Relation.LE, c.rhs))
        elif c.relation is Relation.GT:
            relaxed.append(Constraint({**c.coeffs, t: Fraction(-1)}, Relation.GE, c.rhs))
        else:
            relaxed.append(c)
    relaxed.append(Constraint({t: Fraction(1)}, Relation.LE, Fraction(1)))
    status, value, x = _solve(n + 1, relaxed, {t: Fraction(1)})
    if status != "optimal" or value <= 0:
        return Infeasible()
    return Feasible(_verified(s, x[:n]))
