"""Propositional probability logic: syntax, finite models, exact LP and decision procedures."""
from .decide import (AlreadySat, Op, Sat, Tightened, Unsat, extend_maximal,
                     satisfiable, satisfiable_theory, tighten)
from .errors import ProblogicError
from .models import FiniteModel, check, restrict
from .syntax import FALSE, TRUE, And, L, M, Neg, Or, Prop, format_formula, parse

__all__ = [
    "AlreadySat", "And", "FALSE", "FiniteModel", "L", "M", "Neg", "Op", "Or",
    "ProblogicError", "Prop", "Sat", "TRUE", "Tightened", "Unsat", "check",
    "extend_maximal", "format_formula", "parse", "restrict", "satisfiable",
    "satisfiable_theory", "tighten",
]
