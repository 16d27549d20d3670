"""Acceptance criteria 1-10, one test each.

A one-line verdict per criterion is printed in the terminal summary.
"""
import random
import time
from fractions import Fraction
from itertools import combinations

import pytest

from helpers import rand_formula, rand_model, rand_system
from oracles import feasible_by_vertices, max_by_vertices
from problogic import lp
from problogic.decide import Op, Tightened, extend_maximal, satisfiable, satisfiable_theory, tighten
from problogic.gallery import (ExampleRowFamily, FinCofSet, band, eq1_prefix, fincof_extension,
                               gamma_pairs, not_half, sigma_prefix, two_state_model)
from problogic.measure import (SetFamily, SetValuation, atoms, extend_to_powerset,
                               generated_algebra, is_finitely_additive, lattice_closure,
                               sht_extend)
from problogic.models import check, restrict, restriction_map, validate
from problogic.syntax import L, M, Prop, conjoin, subformulas

half = Fraction(1, 2)
P = Prop("p")


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


def report(n, ok, detail):
    print(f"criterion {n}: {'PASS' if ok else 'FAIL'} ({detail})")


@pytest.mark.criterion(1, "finitely additive example: five displayed measures 0,0,0,0,1")
def test_c1_fincof_displayed_values():
    with Timer() as t:
        fam = ExampleRowFamily()
        val = {"p": FinCofSet.finite({0})}
        ext = lambda f: fincof_extension(fam, f, val)
        mixed = ~(ext(M(0, P)) | ext(L(1, P)))
        sets = [ext(P), ext(M(0, P)), ext(L(1, P)), ext(band(2)), mixed]
        values = [fam.measure(0, s) for s in sets]
    assert sets[3] == FinCofSet.finite({1, 2}) and mixed == FinCofSet.cofinite_except({0})
    ok = values == [0, 0, 0, 0, 1] and t.elapsed < 1
    report(1, ok, f"values {[str(v) for v in values]}, {t.elapsed:.3f}s")
    assert ok


@pytest.mark.criterion(2, "two-state model satisfies the positive prefixes; decision agrees")
def test_c2_two_state_model():
    with Timer() as t:
        model_ok = all(check(two_state_model(k), 0, f) for k in range(1, 7) for f in sigma_prefix(k))
        results = [satisfiable(conjoin(sigma_prefix(k))) for k in range(1, 7)]
    decided = all(results) and all(
        check(r.witness, r.witness.world, conjoin(sigma_prefix(k)))
        for k, r in zip(range(1, 7), results))
    ok = model_ok and decided and t.elapsed < 5
    report(2, ok, f"model check {model_ok}, decision {decided}, {t.elapsed:.2f}s")
    assert ok


@pytest.mark.criterion(3, "non-compact theory: finite prefixes Sat, witness mass in range")
def test_c3_eq1_prefixes():
    masses = []
    with Timer() as t:
        for n in range(9):
            theory = eq1_prefix(n) + [not_half()]
            res = satisfiable_theory(theory)
            assert res, f"prefix {n} unsat"
            w = res.witness
            assert check(w, w.world, conjoin(theory))
            mass = w.mass(w.world, w.valuation["p"])
            assert half - Fraction(1, 4 ** (n + 1)) <= mass < half
            masses.append(mass)
        contradiction = satisfiable_theory([L(half, P), not_half()])
    ok = not contradiction and t.elapsed < 10
    report(3, ok, f"9 prefixes Sat, last mass {masses[-1]}, {t.elapsed:.2f}s")
    assert ok


@pytest.mark.criterion(4, "extraction and refutation soundness on 500 random formulas")
def test_c4_soundness():
    rng = random.Random(2024)
    sat = unsat = 0
    with Timer() as t:
        for _ in range(500):
            f = rand_formula(rng, depth=2, max_den=8, size=rng.randint(2, 6))
            res = satisfiable(f)
            if res:
                sat += 1
                assert validate(res.witness) == [] and check(res.witness, res.witness.world, f)
            else:
                unsat += 1
                for _ in range(200):
                    m = rand_model(rng, max_states=6, max_den=16)
                    assert not any(check(m, w, f) for w in range(m.states)), f
    ok = t.elapsed < 60
    report(4, ok, f"{sat} Sat verified, {unsat} Unsat unrefuted, {t.elapsed:.1f}s")
    assert ok


def _tighten_instance(rng):
    while True:
        phi = rand_formula(rng, depth=1, props=("p", "q"), positive=True, size=rng.randint(1, 3))
        gamma = [rand_formula(rng, depth=1, props=("p", "q"), positive=True, size=3)]
        cap = Fraction(rng.randint(0, 7), 8)
        gamma.append(M(cap, phi) if rng.random() < 0.7 else
                     rand_formula(rng, depth=2, props=("p", "q"), positive=True, size=3))
        r = Fraction(rng.randint(1, 8), 8)
        if satisfiable_theory(gamma) and not satisfiable_theory(gamma + [L(r, phi)]):
            return gamma, phi, r


@pytest.mark.criterion(5, "threshold tightening characterizes the attainable maximum")
def test_c5_tighten():
    rng = random.Random(99)
    with Timer() as t:
        for _ in range(100):
            gamma, phi, r = _tighten_instance(rng)
            out = tighten(gamma, Op.L, r, phi)
            assert isinstance(out, Tightened)
            top, r2 = out.max_value, out.threshold
            assert top < r2 < r
            for qv in (Fraction(0), top / 2, top):
                assert satisfiable_theory(gamma + [L(qv, phi)]), (gamma, phi, qv)
            for qv in (r2, r, min(Fraction(1), (r + 1) / 2)):
                assert not satisfiable_theory(gamma + [L(qv, phi)]), (gamma, phi, qv)
    ok = t.elapsed < 60
    report(5, ok, f"100 instances, {t.elapsed:.1f}s")
    assert ok


@pytest.mark.criterion(6, "maximal extension keeps one of every L/M pair and is maximal")
def test_c6_extend_maximal():
    rng = random.Random(6)
    with Timer() as t:
        for _ in range(100):
            pairs = []
            for _ in range(rng.randint(3, 4)):
                phi = rand_formula(rng, depth=1, props=("p", "q"), positive=True, size=rng.randint(1, 2))
                r = Fraction(rng.randint(0, 4), 4)
                pairs.append((L(r, phi), M(r, phi)))
            extras = [rand_formula(rng, depth=1, props=("p", "q"), positive=True, size=2)
                      for _ in range(rng.randint(0, 2))]
            universe = [f for pair in pairs for f in pair] + extras
            rng.shuffle(universe)
            out = extend_maximal([], universe)
            assert satisfiable_theory(out)
            for a, b in pairs:
                assert a in out or b in out
            for f in universe:
                if f not in out:
                    assert not satisfiable_theory(out + [f])
    ok = t.elapsed < 120
    report(6, ok, f"100 universes, {t.elapsed:.1f}s")
    assert ok


@pytest.mark.criterion(7, "restriction preserves closure formulas at every representative")
def test_c7_restriction():
    rng = random.Random(7)
    checked = 0
    for _ in range(100):
        m = rand_model(rng, max_states=8, max_den=8)
        f = rand_formula(rng, depth=2, size=rng.randint(2, 6))
        r = restrict(m, f)
        reps = restriction_map(m, f)
        assert validate(r) == [] and r.states <= m.states
        for g in subformulas(f):
            for new, old in enumerate(reps):
                assert check(m, old, g) == check(r, new, g)
                checked += 1
    report(7, True, f"{checked} preservation checks")


def _induced_valuation(rng):
    n = rng.randint(1, 6)
    weights = [rng.randint(0, 6) for _ in range(n)]
    if not any(weights):
        weights[0] = 1
    point = [Fraction(w, sum(weights)) for w in weights]
    gens = [frozenset(x for x in range(n) if rng.random() < 0.5) for _ in range(rng.randint(0, 4))]
    fam = lattice_closure(SetFamily.of(n, gens))
    return SetValuation.of(fam, {s: sum((point[x] for x in s), Fraction(0)) for s in fam.members})


@pytest.mark.criterion(8, "lattice valuations extend uniquely and additively")
def test_c8_measure_toolkit():
    rng = random.Random(8)
    perturbed = 0
    for _ in range(500):
        v = _induced_valuation(rng)
        ext = sht_extend(v)
        assert all(ext(s) == v(s) for s in v.family.members)
        assert is_finitely_additive(ext) is None
        assert ext.family == generated_algebra(v.family)
        ats = atoms(ext.family)
        for a, b in combinations(ats, 2):
            if ext(a) == 0:
                a, b = b, a
            if ext(a) == 0:
                continue
            delta = ext(a) / 2
            shifted = {s: ext(s) - (delta if a <= s else 0) + (delta if b <= s else 0)
                       for s in ext.family.members}
            alt = SetValuation(ext.family, shifted)
            assert is_finitely_additive(alt) is None
            assert any(alt(s) != v(s) for s in v.family.members)
            perturbed += 1
        full = extend_to_powerset(ext)
        assert full(full.family.universe) == ext(ext.family.universe) == 1
        assert all(full(s) == ext(s) for s in ext.family.members)
        assert is_finitely_additive(full) is None
    report(8, True, f"500 valuations, {perturbed} perturbations rejected")


@pytest.mark.criterion(9, "LP kernel agrees with vertex enumeration on 1000 systems")
def test_c9_lp_oracle():
    rng = random.Random(9)
    feasible = optimized = 0
    for _ in range(1000):
        s = rand_system(rng)
        out = lp.strict_feasible(s)
        want = feasible_by_vertices(s)
        assert isinstance(out, lp.Feasible) == want
        if want:
            feasible += 1
            assert not s.violations(out.point)
        if not s.has_strict:
            bounded = lp.system(s.variable_count, s.constraints + tuple(
                lp.constraint({i: 1}, lp.Relation.LE, 1) for i in range(s.variable_count)))
            obj = {i: Fraction(rng.randint(-4, 4), rng.randint(1, 4)) for i in range(s.variable_count)}
            res = lp.maximize(obj, bounded)
            best = max_by_vertices(obj, bounded)
            if best is None:
                assert isinstance(res, lp.Infeasible)
            else:
                assert res.value == best and not bounded.violations(res.point)
                optimized += 1
    report(9, True, f"1000 systems, {feasible} feasible, {optimized} optima matched")


@pytest.mark.criterion(10, "pairwise disagreement theories Gamma_2..Gamma_4 are Sat")
def test_c10_gamma_n():
    sizes = []
    with Timer() as t:
        for n in (2, 3, 4):
            gamma = gamma_pairs(n)
            res = satisfiable_theory(gamma)
            assert res
            assert all(check(res.witness, res.witness.world, g) for g in gamma)
            sizes.append(res.witness.states)
    ok = t.elapsed < 120
    report(10, ok, f"witness sizes {sizes}, {t.elapsed:.2f}s")
    assert ok
