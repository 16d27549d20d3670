"""Finite probability models and the satisfaction relation.

A :class:`FiniteModel` is a finite type space on the powerset algebra: row
``w`` of the kernel is the distribution ``T(w)``. On a finite powerset finite
additivity and countable additivity coincide, so one type serves both the
sigma-additive and the finitely additive model classes.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from .errors import InvalidModel, UnknownProposition
from .rational import format_rational, to_rational
from .syntax import (TOP_NAME, And, ConstraintAtom, Formula, L, Lit, M, Neg,
                     NnfAnd, NnfFormula, NnfOr, Or, Prop, subformulas)

Extension = frozenset  # of state indices


@dataclass(frozen=True)
class FiniteModel:
    states: int
    kernel: tuple[tuple[Fraction, ...], ...]
    valuation: Mapping[str, frozenset[int]]
    world: int = 0

    @classmethod
    def build(cls, kernel: Sequence[Sequence], valuation: Mapping[str, Sequence[int]],
              world: int = 0) -> "FiniteModel":
        """Convenience constructor accepting ints, strings or Fractions."""
        rows = tuple(tuple(to_rational(x) for x in row) for row in kernel)
        val = {p: frozenset(s) for p, s in valuation.items()}
        return cls(len(rows), rows, val, world)

    def __hash__(self):
        return hash((self.states, self.kernel, self.world,
                     tuple(sorted(self.valuation.items()))))

    def mass(self, w: int, states: Extension) -> Fraction:
        row = self.kernel[w]
        return sum((row[u] for u in states), Fraction(0))

    def with_world(self, world: int) -> "FiniteModel":
        return FiniteModel(self.states, self.kernel, self.valuation, world)


def validate(m: FiniteModel) -> list[str]:
    """Every violation of the model invariants; an empty list means valid."""
    problems: list[str] = []
    n = m.states
    if n < 1:
        problems.append("model has no states")
    if len(m.kernel) != n:
        problems.append(f"kernel has {len(m.kernel)} rows, expected {n}")
    for w, row in enumerate(m.kernel):
        if len(row) != n:
            problems.append(f"row {w} has {len(row)} entries, expected {n}")
        for u, x in enumerate(row):
            if not isinstance(x, Fraction):
                problems.append(f"entry ({w},{u}) is not an exact rational")
            elif not 0 <= x <= 1:
                problems.append(f"entry ({w},{u}) = {format_rational(x)} outside [0,1]")
        total = sum(row, Fraction(0))
        if total != 1:
            problems.append(f"row {w} sums to {format_rational(total)}")
    for p in sorted(m.valuation):
        for i in sorted(m.valuation[p]):
            if not 0 <= i < n:
                problems.append(f"valuation of {p}: index {i} out of range")
    if not 0 <= m.world < max(n, 1):
        problems.append(f"designated world {m.world} out of range")
    return problems


def _require_valid(m: FiniteModel) -> None:
    problems = validate(m)
    if problems:
        raise InvalidModel("; ".join(problems))


class _Evaluator:
    """Bottom-up evaluator with a per-call memo keyed by subformula."""

    def __init__(self, m: FiniteModel):
        self.m = m
        self.all = frozenset(range(m.states))
        self.memo: dict[Formula, Extension] = {}

    def prop(self, name: str) -> Extension:
        try:
            return self.m.valuation[name]
        except KeyError:
            if name == TOP_NAME:
                return frozenset()
            raise UnknownProposition(f"no valuation for proposition {name!r}") from None

    def threshold_set(self, inner: Extension, test) -> Extension:
        return frozenset(w for w in range(self.m.states) if test(self.m.mass(w, inner)))

    def ext(self, f: Formula) -> Extension:
        hit = self.memo.get(f)
        if hit is not None:
            return hit
        if isinstance(f, Prop):
            out = self.prop(f.name)
        elif isinstance(f, Neg):
            out = self.all - self.ext(f.child)
        elif isinstance(f, And):
            out = self.ext(f.left) & self.ext(f.right)
        elif isinstance(f, Or):
            out = self.ext(f.left) | self.ext(f.right)
        elif isinstance(f, L):
            r = f.threshold
            out = self.threshold_set(self.ext(f.child), lambda x: x >= r)
        elif isinstance(f, M):
            r = f.threshold
            out = self.threshold_set(self.ext(f.child), lambda x: x <= r)
        else:
            raise TypeError(f"not a formula: {f!r}")
        self.memo[f] = out
        return out

    def ext_nnf(self, g: NnfFormula) -> Extension:
        if isinstance(g, Lit):
            s = self.prop(g.name)
            return s if g.positive else self.all - s
        if isinstance(g, NnfAnd):
            return self.ext_nnf(g.left) & self.ext_nnf(g.right)
        if isinstance(g, NnfOr):
            return self.ext_nnf(g.left) | self.ext_nnf(g.right)
        if isinstance(g, ConstraintAtom):
            rel, r = g.relation, g.threshold
            return self.threshold_set(self.ext(g.subject), lambda x: rel.holds(x, r))
        raise TypeError(f"not an NNF formula: {g!r}")


def extension(m: FiniteModel, f: Formula) -> Extension:
    """The set of states of ``m`` satisfying ``f``."""
    _require_valid(m)
    return _Evaluator(m).ext(f)


def nnf_extension(m: FiniteModel, g: NnfFormula) -> Extension:
    _require_valid(m)
    return _Evaluator(m).ext_nnf(g)


def check(m: FiniteModel, w: int, f: Formula) -> bool:
    if not 0 <= w < m.states:
        raise InvalidModel(f"state {w} out of range")
    return w in extension(m, f)


def closure_atoms(m: FiniteModel, f: Formula) -> list[list[int]]:
    """Atoms of the set algebra generated by the closure extensions and {world}.

    Atoms are returned sorted by their least element; each atom is sorted.
    """
    _require_valid(m)
    ev = _Evaluator(m)
    exts = [ev.ext(g) for g in subformulas(f)]
    blocks: dict[tuple, list[int]] = {}
    for s in range(m.states):
        key = (s == m.world,) + tuple(s in e for e in exts)
        blocks.setdefault(key, []).append(s)
    return sorted(blocks.values(), key=lambda b: b[0])


def restrict(m: FiniteModel, f: Formula) -> FiniteModel:
    """Keep one state per closure atom, moving each atom's mass onto it.

    Satisfaction of every subformula of ``f`` is preserved at every kept state.
    Kept states are the least index of each atom and are renumbered in
    increasing order; :func:`restriction_map` gives the old indices.
    """
    atoms = closure_atoms(m, f)
    reps = [a[0] for a in atoms]
    kernel = tuple(
        tuple(sum((m.kernel[v][u] for u in atom), Fraction(0)) for atom in atoms)
        for v in reps
    )
    position = {old: new for new, old in enumerate(reps)}
    valuation = {p: frozenset(position[s] for s in ext if s in position)
                 for p, ext in m.valuation.items()}
    return FiniteModel(len(reps), kernel, valuation, position[m.world])


def restriction_map(m: FiniteModel, f: Formula) -> list[int]:
    """Old state index of each state of ``restrict(m, f)``."""
    return [a[0] for a in closure_atoms(m, f)]


# ---------------------------------------------------------------------------
# JSON


def model_to_dict(m: FiniteModel) -> dict:
    return {
        "states": m.states,
        "world": m.world,
        "kernel": [[format_rational(x) for x in row] for row in m.kernel],
        "valuation": {p: sorted(m.valuation[p]) for p in sorted(m.valuation)},
    }


def model_to_json(m: FiniteModel, indent: int | None = None) -> str:
    return json.dumps(model_to_dict(m), indent=indent)


def _rat_field(x) -> Fraction:
    if isinstance(x, bool) or not isinstance(x, (str, int)):
        raise InvalidModel(f"kernel entry {x!r} must be a string 'a/b' or an integer")
    try:
        return to_rational(x)
    except ValueError as exc:
        raise InvalidModel(str(exc)) from None


def model_from_dict(data: Mapping) -> FiniteModel:
    try:
        states = data["states"]
        kernel_raw = data["kernel"]
        valuation_raw = data.get("valuation", {})
        world = data.get("world", 0)
    except (KeyError, TypeError, AttributeError) as exc:
        raise InvalidModel(f"malformed model object: {exc}") from None
    if not isinstance(states, int) or isinstance(states, bool):
        raise InvalidModel("'states' must be an integer")
    if not isinstance(world, int) or isinstance(world, bool):
        raise InvalidModel("'world' must be an integer")
    if not isinstance(kernel_raw, list) or not all(isinstance(r, list) for r in kernel_raw):
        raise InvalidModel("'kernel' must be a list of rows")
    if not isinstance(valuation_raw, dict):
        raise InvalidModel("'valuation' must be an object")
    kernel = tuple(tuple(_rat_field(x) for x in row) for row in kernel_raw)
    valuation = {}
    for p, idx in valuation_raw.items():
        if not isinstance(idx, list) or not all(
                isinstance(i, int) and not isinstance(i, bool) for i in idx):
            raise InvalidModel(f"valuation of {p!r} must be a list of integers")
        valuation[p] = frozenset(idx)
    m = FiniteModel(states, kernel, valuation, world)
    _require_valid(m)
    return m


def model_from_json(text: str) -> FiniteModel:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InvalidModel(f"invalid JSON: {exc}") from None
    return model_from_dict(data)


def load_model(path) -> FiniteModel:
    with open(path, encoding="utf-8") as fh:
        return model_from_json(fh.read())
