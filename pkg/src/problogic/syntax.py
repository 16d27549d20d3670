"""Formulas of propositional probability logic.

The AST has six node kinds (:class:`Prop`, :class:`Neg`, :class:`And`,
:class:`Or`, :class:`L`, :class:`M`). ``L[r] phi`` reads "phi has probability
at least r" and ``M[r] phi`` "at most r". Thresholds are exact
:class:`~fractions.Fraction` values in [0, 1].

Concrete syntax (whitespace insensitive)::

    formula := iff
    iff     := imp ("<->" imp)*
    imp     := disj ("->" disj)*          right associative
    disj    := conj ("|" conj)*
    conj    := unary ("&" unary)*
    unary   := "!" unary | "L[" rat "]" unary | "M[" rat "]" unary | atom
    atom    := ident | "true" | "false" | "(" formula ")"
    rat     := int | int "/" int

``->`` and ``<->`` are desugared at parse time; ``true`` and ``false`` become
``_top | !_top`` and ``_top & !_top`` over the reserved proposition ``_top``.
"""
from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Union

from .errors import FormulaSyntaxError, NotPositive
from .rational import Relation, format_rational, lcm_of_denominators, to_rational

__all__ = [
    "Formula", "Prop", "Neg", "And", "Or", "L", "M",
    "TOP_NAME", "TRUE", "FALSE",
    "ConstraintAtom", "Lit", "NnfAnd", "NnfOr", "NnfFormula",
    "Fragment", "LocalLanguageInfo",
    "parse", "format_formula", "depth", "classify", "nnf", "nnf_depth",
    "propositions", "subformulas", "thresholds", "local_language",
    "in_local_language", "positive_dnf", "conjoin",
]

IDENT_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
TOP_NAME = "_top"
_KEYWORDS = frozenset({"true", "false"})


class Formula:
    """Base class of AST nodes. Nodes are immutable and compare structurally."""

    __slots__ = ()

    def __str__(self) -> str:
        return format_formula(self)

    def __and__(self, other: "Formula") -> "Formula":
        return And(self, other)

    def __or__(self, other: "Formula") -> "Formula":
        return Or(self, other)

    def __invert__(self) -> "Formula":
        return Neg(self)


@dataclass(frozen=True, slots=True)
class Prop(Formula):
    name: str

    def __post_init__(self):
        if not IDENT_RE.match(self.name) or self.name in _KEYWORDS:
            raise ValueError(f"invalid proposition name {self.name!r}")

    def __repr__(self):
        return f"Prop({self.name})"


@dataclass(frozen=True, slots=True)
class Neg(Formula):
    child: Formula

    def __repr__(self):
        return f"Neg({self.child!r})"


@dataclass(frozen=True, slots=True)
class And(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"And({self.left!r}, {self.right!r})"


@dataclass(frozen=True, slots=True)
class Or(Formula):
    left: Formula
    right: Formula

    def __repr__(self):
        return f"Or({self.left!r}, {self.right!r})"


def _check_threshold(value) -> Fraction:
    q = to_rational(value)
    if not 0 <= q <= 1:
        raise ValueError(f"threshold {format_rational(q)} outside [0,1]")
    return q


@dataclass(frozen=True, slots=True)
class L(Formula):
    """Probability of ``child`` is at least ``threshold``."""

    threshold: Fraction
    child: Formula

    def __post_init__(self):
        object.__setattr__(self, "threshold", _check_threshold(self.threshold))

    def __repr__(self):
        return f"L({format_rational(self.threshold)}, {self.child!r})"


@dataclass(frozen=True, slots=True)
class M(Formula):
    """Probability of ``child`` is at most ``threshold``."""

    threshold: Fraction
    child: Formula

    def __post_init__(self):
        object.__setattr__(self, "threshold", _check_threshold(self.threshold))

    def __repr__(self):
        return f"M({format_rational(self.threshold)}, {self.child!r})"


_TOP = Prop(TOP_NAME)
TRUE = Or(_TOP, Neg(_TOP))
FALSE = And(_TOP, Neg(_TOP))


def conjoin(formulas) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``TRUE``."""
    out = None
    for f in formulas:
        out = f if out is None else And(out, f)
    return TRUE if out is None else out


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow><->|->)|(?P<ident>[A-Za-z_][A-Za-z0-9_]*)|(?P<int>\d+)"
    r"|(?P<sym>[!&|()\[\]/]))"
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # "arrow" | "ident" | "int" | "sym" | "eof"
    text: str
    pos: int  # 1-based


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        m = _TOKEN_RE.match(text, i)
        if not m or m.lastgroup is None:
            raise FormulaSyntaxError(f"unexpected character {text[i]!r}", i + 1)
        start = m.start(m.lastgroup)
        toks.append(_Tok(m.lastgroup, m.group(m.lastgroup), start + 1))
        i = m.end()
    toks.append(_Tok("eof", "", n + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    def peek(self, offset: int = 0) -> _Tok:
        return self.toks[min(self.i + offset, len(self.toks) - 1)]

    def advance(self) -> _Tok:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def at(self, text: str) -> bool:
        tok = self.peek()
        return tok.kind in ("sym", "arrow") and tok.text == text

    def expect(self, text: str, what: str) -> _Tok:
        if not self.at(text):
            tok = self.peek()
            found = "end of input" if tok.kind == "eof" else repr(tok.text)
            raise FormulaSyntaxError(f"expected {what}, found {found}", tok.pos)
        return self.advance()

    def parse(self) -> Formula:
        f = self.iff()
        tok = self.peek()
        if tok.kind != "eof":
            if tok.text == ")":
                raise FormulaSyntaxError("unbalanced parentheses: unmatched ')'", tok.pos)
            raise FormulaSyntaxError(f"unexpected token {tok.text!r}", tok.pos)
        return f

    def iff(self) -> Formula:
        f = self.imp()
        while self.at("<->"):
            self.advance()
            g = self.imp()
            f = And(Or(Neg(f), g), Or(Neg(g), f))
        return f

    def imp(self) -> Formula:
        f = self.disj()
        if self.at("->"):
            self.advance()
            return Or(Neg(f), self.imp())
        return f

    def disj(self) -> Formula:
        f = self.conj()
        while self.at("|"):
            self.advance()
            f = Or(f, self.conj())
        return f

    def conj(self) -> Formula:
        f = self.unary()
        while self.at("&"):
            self.advance()
            f = And(f, self.unary())
        return f

    def unary(self) -> Formula:
        tok = self.peek()
        if self.at("!"):
            self.advance()
            return Neg(self.unary())
        nxt = self.peek(1)
        if tok.kind == "ident" and tok.text in ("L", "M") and nxt.kind == "sym" and nxt.text == "[":
            self.advance()
            self.advance()
            r = self.rat()
            self.expect("]", "']'")
            child = self.unary()
            return L(r, child) if tok.text == "L" else M(r, child)
        return self.atom()

    def rat(self) -> Fraction:
        tok = self.peek()
        if tok.kind != "int":
            raise FormulaSyntaxError("expected a rational threshold", tok.pos)
        self.advance()
        num, den = int(tok.text), 1
        if self.at("/"):
            self.advance()
            dtok = self.peek()
            if dtok.kind != "int":
                raise FormulaSyntaxError("expected a denominator", dtok.pos)
            self.advance()
            den = int(dtok.text)
            if den == 0:
                raise FormulaSyntaxError("zero denominator", dtok.pos)
        value = Fraction(num, den)
        if value > 1:
            raise FormulaSyntaxError(
                f"threshold {format_rational(value)} outside [0,1]", tok.pos)
        return value

    def atom(self) -> Formula:
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            if tok.text == "true":
                return TRUE
            if tok.text == "false":
                return FALSE
            return Prop(tok.text)
        if self.at("("):
            self.advance()
            f = self.iff()
            if not self.at(")"):
                end = self.peek()
                if end.kind == "eof":
                    raise FormulaSyntaxError(
                        "unbalanced parentheses: '(' is never closed", tok.pos)
                raise FormulaSyntaxError(f"expected ')', found {end.text!r}", end.pos)
            self.advance()
            return f
        if tok.kind == "eof":
            raise FormulaSyntaxError("unexpected end of input", tok.pos)
        if tok.text == ")":
            raise FormulaSyntaxError("unbalanced parentheses: unmatched ')'", tok.pos)
        raise FormulaSyntaxError(f"unexpected token {tok.text!r}", tok.pos)


def parse(text: str) -> Formula:
    """Parse concrete syntax into a :class:`Formula`.

    >>> parse("L[1/2] p")
    L(1/2, Prop(p))
    """
    return _Parser(text).parse()


def format_formula(f: Formula) -> str:
    """Print ``f`` so that ``parse(format_formula(f)) == f``."""
    if f == TRUE:
        return "true"
    if f == FALSE:
        return "false"
    if isinstance(f, Prop):
        return f.name
    if isinstance(f, Neg):
        return "!" + format_formula(f.child)
    if isinstance(f, And):
        return f"({format_formula(f.left)} & {format_formula(f.right)})"
    if isinstance(f, Or):
        return f"({format_formula(f.left)} | {format_formula(f.right)})"
    if isinstance(f, L):
        return f"L[{format_rational(f.threshold)}] {format_formula(f.child)}"
    if isinstance(f, M):
        return f"M[{format_rational(f.threshold)}] {format_formula(f.child)}"
    raise TypeError(f"not a formula: {f!r}")


# ---------------------------------------------------------------------------
# Syntactic measures


def depth(f: Formula) -> int:
    """Maximum nesting of probability operators."""
    if isinstance(f, Prop):
        return 0
    if isinstance(f, Neg):
        return depth(f.child)
    if isinstance(f, (And, Or)):
        return max(depth(f.left), depth(f.right))
    return depth(f.child) + 1


def _children(f: Formula) -> tuple[Formula, ...]:
    if isinstance(f, Prop):
        return ()
    if isinstance(f, (And, Or)):
        return (f.left, f.right)
    return (f.child,)


def subformulas(f: Formula) -> list[Formula]:
    """Distinct subformulas of ``f`` in post-order (children before parents)."""
    seen: dict[Formula, None] = {}

    def walk(g: Formula):
        if g in seen:
            return
        for c in _children(g):
            walk(c)
        seen[g] = None

    walk(f)
    return list(seen)


def propositions(f: Formula) -> tuple[str, ...]:
    """Proposition names in order of first occurrence."""
    return tuple(g.name for g in subformulas(f) if isinstance(g, Prop))


def thresholds(f: Formula) -> list[Fraction]:
    return [g.threshold for g in subformulas(f) if isinstance(g, (L, M))]


class Fragment(enum.Enum):
    BPL = "BPL"
    PPL = "PPL"
    PL = "PL"


def classify(f: Formula) -> Fragment:
    """Least of BPL ⊂ PPL ⊂ PL containing ``f``."""
    negation_ok = True
    uses_m = False
    for g in subformulas(f):
        if isinstance(g, Neg) and not isinstance(g.child, Prop):
            negation_ok = False
        elif isinstance(g, M):
            uses_m = True
    if not negation_ok:
        return Fragment.PL
    return Fragment.PPL if uses_m else Fragment.BPL


# ---------------------------------------------------------------------------
# Negation normal form


class NnfFormula:
    __slots__ = ()


@dataclass(frozen=True, slots=True)
class Lit(NnfFormula):
    name: str
    positive: bool = True

    def __repr__(self):
        return f"Lit({self.name},{'+' if self.positive else '-'})"


@dataclass(frozen=True, slots=True)
class NnfAnd(NnfFormula):
    left: NnfFormula
    right: NnfFormula


@dataclass(frozen=True, slots=True)
class NnfOr(NnfFormula):
    left: NnfFormula
    right: NnfFormula


@dataclass(frozen=True, slots=True)
class ConstraintAtom(NnfFormula):
    """``mass(subject) <relation> threshold`` at the evaluation world.

    GE and LE come from ``L`` and ``M``; GT and LT only from negated operators.
    """

    subject: Formula
    relation: Relation
    threshold: Fraction

    def __post_init__(self):
        if self.relation is Relation.EQ:
            raise ValueError("constraint atoms use GE, LE, GT or LT")

    def __repr__(self):
        return (f"Atom({format_formula(self.subject)},{self.relation.name},"
                f"{format_rational(self.threshold)})")


def nnf(f: Formula, positive: bool = True) -> NnfFormula:
    """Push negations to propositions; negated operators become strict atoms."""
    if isinstance(f, Prop):
        return Lit(f.name, positive)
    if isinstance(f, Neg):
        return nnf(f.child, not positive)
    if isinstance(f, And):
        node = NnfAnd if positive else NnfOr
        return node(nnf(f.left, positive), nnf(f.right, positive))
    if isinstance(f, Or):
        node = NnfOr if positive else NnfAnd
        return node(nnf(f.left, positive), nnf(f.right, positive))
    if isinstance(f, L):
        rel = Relation.GE if positive else Relation.LT
    else:
        rel = Relation.LE if positive else Relation.GT
    return ConstraintAtom(f.child, rel, f.threshold)


def nnf_depth(g: NnfFormula) -> int:
    if isinstance(g, Lit):
        return 0
    if isinstance(g, (NnfAnd, NnfOr)):
        return max(nnf_depth(g.left), nnf_depth(g.right))
    return depth(g.subject) + 1


def nnf_atoms(g: NnfFormula) -> Iterator[ConstraintAtom]:
    """Constraint atoms of ``g`` left to right (not descending into subjects)."""
    if isinstance(g, ConstraintAtom):
        yield g
    elif isinstance(g, (NnfAnd, NnfOr)):
        yield from nnf_atoms(g.left)
        yield from nnf_atoms(g.right)


# ---------------------------------------------------------------------------
# Local language


@dataclass(frozen=True)
class LocalLanguageInfo:
    propositions: frozenset[str]
    grid: int
    depth: int

    def __contains__(self, g: Formula) -> bool:
        return in_local_language(g, self)


def local_language(f: Formula) -> LocalLanguageInfo:
    """Propositions, threshold grid denominator and depth bounding f's local language."""
    return LocalLanguageInfo(
        propositions=frozenset(propositions(f)),
        grid=lcm_of_denominators(thresholds(f)),
        depth=depth(f),
    )


def in_local_language(g: Formula, info: LocalLanguageInfo) -> bool:
    return (
        set(propositions(g)) <= info.propositions
        and all((t * info.grid).denominator == 1 for t in thresholds(g))
        and depth(g) <= info.depth
    )


# ---------------------------------------------------------------------------
# Positive DNF

Clause = frozenset  # of Lit | ConstraintAtom


def positive_dnf(f: Formula) -> list[Clause]:
    """Disjunctive normal form of a PPL formula with modal atoms kept opaque.

    Each clause is a frozenset of :class:`Lit` and GE/LE :class:`ConstraintAtom`.
    Equal clauses are merged; order follows the distribution of the AST.
    """
    if classify(f) is Fragment.PL:
        raise NotPositive(f"not a positive formula: {format_formula(f)}")

    def dnf(g: Formula) -> list[Clause]:
        if isinstance(g, Prop):
            return [frozenset({Lit(g.name, True)})]
        if isinstance(g, Neg):
            return [frozenset({Lit(g.child.name, False)})]
        if isinstance(g, Or):
            return _dedupe(dnf(g.left) + dnf(g.right))
        if isinstance(g, And):
            right = dnf(g.right)
            return _dedupe([a | b for a in dnf(g.left) for b in right])
        return [frozenset({nnf(g)})]

    return dnf(f)


def _dedupe(clauses: list[Clause]) -> list[Clause]:
    return list(dict.fromkeys(clauses))
