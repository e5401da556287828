from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations, product

import pytest
from hypothesis import given, settings, strategies as st

from fdsys.counting import (
    code_count,
    code_count_identity_lhs,
    cycle_p0_float,
    cycle_p0_formula,
    cycle_p1_float,
    cycle_p1_formula,
    falling,
    formula_oracle,
    formula_value,
    loopsonly_graph,
    loopsonly_limits,
    p0_upper_bound,
    positive_stability_count,
    positive_stability_oracle,
    property_report,
    sweep_rows,
)
from fdsys.digraph import Digraph, add_loops, cycle_graph, empty_graph, path_graph
from fdsys.errors import BudgetExceeded
from fdsys.search import fix_class_counts

CYCLE_VALUES = {(2, 2): (Fraction(1, 8), Fraction(3, 4)), (3, 2): (Fraction(1, 16), Fraction(7, 8)),
                (2, 3): (Fraction(52, 243), Fraction(47, 81)), (3, 3): (Fraction(320, 2187), Fraction(517, 729))}


def code_count_oracle(t: int, n: int, q: int) -> int:
    words = list(product(range(q), repeat=n))
    return sum(1 for code in combinations(words, t)
               if all(all(a != b for a, b in zip(x, y)) for x, y in combinations(code, 2)))


@pytest.mark.parametrize("nq", sorted(CYCLE_VALUES))
def test_cycle_formulas_match_enumeration(nq):
    n, q = nq
    p0, p1 = CYCLE_VALUES[nq]
    assert cycle_p0_formula(n, q) == p0 and cycle_p1_formula(n, q) == p1
    fc = fix_class_counts(cycle_graph(n), q, False)
    assert (fc.p0, fc.p1) == (p0, p1)


def test_cycle_formula_examples():
    assert cycle_p0_formula(2, 2) == Fraction(1, 8)
    assert cycle_p1_formula(2, 2) == Fraction(3, 4)
    with pytest.raises(ValueError):
        cycle_p0_formula(1, 2)


def test_cycle_floats_approach_inverse_e():
    for q in (10**3, 10**4):
        for n in (2, 5):
            assert abs(cycle_p0_float(n, q) - math.exp(-1)) < 20 / q * n
            assert abs(cycle_p1_float(n, q) - math.exp(-1)) < 20 / q * n
    assert abs(cycle_p0_float(3, 3) - float(cycle_p0_formula(3, 3))) < 1e-12
    assert abs(cycle_p1_float(4, 7) - float(cycle_p1_formula(4, 7))) < 1e-12


def test_positive_count_examples():
    assert positive_stability_count(1, 2) == 1
    assert positive_stability_count(2, 2) == 3**4
    assert positive_stability_count(1, 3) == 1
    with pytest.raises(BudgetExceeded):
        positive_stability_count(10, 10, max_bits=1000)


@pytest.mark.parametrize("n,q", [(1, 2), (2, 2), (1, 3), (3, 2)])
def test_positive_count_matches_enumeration(n, q):
    assert positive_stability_oracle(n, q) == positive_stability_count(n, q)


def test_code_count_examples():
    assert code_count(1, 3, 2) == 8
    assert code_count(2, 2, 2) == 2
    assert code_count(3, 2, 2) == 0
    assert falling(5, 2) == 20 and falling(2, 3) == 0
    with pytest.raises(ValueError):
        code_count(0, 2, 2)


@pytest.mark.parametrize("t,n,q", [(2, 2, 2), (2, 2, 3), (3, 2, 3), (2, 3, 2), (2, 3, 3), (4, 2, 3)])
def test_code_count_matches_enumeration(t, n, q):
    assert code_count(t, n, q) == code_count_oracle(t, n, q)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(2, 7))
def test_code_count_identity(n, q):
    assert code_count_identity_lhs(n, q) == 1 - cycle_p0_formula(n, q)


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 6), st.integers(2, 7))
def test_cycle_proportions_are_probabilities(n, q):
    p0, p1 = cycle_p0_formula(n, q), cycle_p1_formula(n, q)
    assert 0 <= p0 <= 1 and 0 <= p1 <= 1 and p0 + p1 <= 1
    assert p0 <= p0_upper_bound(cycle_graph(n), q)


def test_p0_upper_bound_examples():
    assert p0_upper_bound(cycle_graph(3), 2) == Fraction(1, 2)
    assert p0_upper_bound(path_graph(3), 5) == 0
    assert p0_upper_bound(loopsonly_graph(2), 3) == Fraction(8, 9)


def test_loopsonly_limits():
    lim = loopsonly_limits(1)
    assert lim.p0 == pytest.approx(math.exp(-1))
    assert lim.p1 == pytest.approx(math.exp(-1))
    assert lim.p2 == pytest.approx(1 - 2 * math.exp(-1))
    lim = loopsonly_limits(2)
    assert lim.p0 + lim.p1 + lim.p2 == pytest.approx(1)
    assert lim.mean_instability == pytest.approx(2 * math.exp(-1))
    assert loopsonly_graph(2) == add_loops(empty_graph(2))
    with pytest.raises(ValueError):
        loopsonly_limits(0)


def test_property_report_exact_and_sampled():
    rep = property_report(cycle_graph(2), [2, 3], strict=False)
    assert rep["consistent"] and not rep["acyclic"]
    assert all(r["exact"] for r in rep["rows"])
    assert rep["rows"][0]["p0"] == Fraction(1, 8)
    rep = property_report(Digraph(2, [(1, 2)]), [2, 3], strict=True)
    assert rep["acyclic"] and rep["consistent"]
    assert all(r["p0"] == 0 and r["p1"] == 1 for r in rep["rows"])
    rep = property_report(cycle_graph(3), [5], strict=True, samples=2000, budget=10)
    assert not rep["rows"][0]["exact"] and rep["consistent"]


def test_formula_value_and_oracle():
    assert formula_value("cycle-p0", 2, 2) == Fraction(1, 8)
    assert formula_value("code-count", 2, 2, 2) == 2
    with pytest.raises(ValueError):
        formula_value("code-count", 2, 2)
    with pytest.raises(ValueError):
        formula_value("bogus", 2, 2)
    assert formula_oracle("cycle-p1", 2, 2) == Fraction(3, 4)
    assert formula_oracle("code-count", 2, 2) is None
    assert formula_oracle("cycle-p0", 6, 6, budget=100) is None


def test_sweep_rows_match():
    rows = sweep_rows("cycle-p0", [2, 3], [2, 3])
    assert len(rows) == 4 and all(r["match"] for r in rows)
    rows = sweep_rows("positive-count", [1, 2], [2])
    assert all(r["match"] for r in rows)
    rows = sweep_rows("cycle-p1", [2], [40])
    assert rows[0]["oracle"] is None and rows[0]["match"] is None
