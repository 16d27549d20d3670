"""Brute-force reference solvers, independent of the simplex kernel."""
from __future__ import annotations

from fractions import Fraction
from itertools import combinations

from problogic.rational import Relation


def _solve_square(a, b):
    """Unique solution of a square system, or None when singular."""
    n = len(a)
    m = [list(row) + [rhs] for row, rhs in zip(a, b)]
    for c in range(n):
        p = next((i for i in range(c, n) if m[i][c] != 0), None)
        if p is None:
            return None
        m[c], m[p] = m[p], m[c]
        for i in range(n):
            if i != c and m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [x - f * y for x, y in zip(m[i], m[c])]
    return [m[i][n] / m[i][i] for i in range(n)]


def _holds(row, x):
    coeffs, rel, rhs = row
    return rel.holds(sum((c * v for c, v in zip(coeffs, x)), Fraction(0)), rhs)


def vertices(n, rows):
    """Vertices of {x >= 0 : rows}; rows are (dense coeffs, LE/GE/EQ, rhs)."""
    bounds = [([Fraction(int(i == j)) for j in range(n)], Relation.GE, Fraction(0)) for i in range(n)]
    every = list(rows) + bounds
    out = []
    for tight in combinations(every, n):
        x = _solve_square([t[0] for t in tight], [t[2] for t in tight])
        if x is not None and all(_holds(r, x) for r in every):
            out.append(x)
    return out


def dense(system):
    n = system.variable_count
    return [([c.coeffs.get(i, Fraction(0)) for i in range(n)], c.relation, c.rhs)
            for c in system.constraints]


def feasible_by_vertices(system) -> bool:
    """Feasibility, with strict rows handled through a shared slack maximized by enumeration."""
    n = system.variable_count
    rows = dense(system)
    if not system.has_strict:
        return bool(vertices(n, rows))
    relaxed = []
    for coeffs, rel, rhs in rows:
        if rel is Relation.LT:
            relaxed.append((coeffs + [Fraction(1)], Relation.LE, rhs))
        elif rel is Relation.GT:
            relaxed.append((coeffs + [Fraction(-1)], Relation.GE, rhs))
        else:
            relaxed.append((coeffs + [Fraction(0)], rel, rhs))
    relaxed.append(([Fraction(0)] * n + [Fraction(1)], Relation.LE, Fraction(1)))
    vs = vertices(n + 1, relaxed)
    return bool(vs) and max(v[-1] for v in vs) > 0


def max_by_vertices(objective, system):
    """Maximum over vertices of a bounded system, or None when empty."""
    n = system.variable_count
    vs = vertices(n, dense(system))
    if not vs:
        return None
    return max(sum((objective.get(i, Fraction(0)) * v[i] for i in range(n)), Fraction(0)) for v in vs)
