"""Closed-form counts and fixed-point proportions, exact by default.

Floating versions exist only for large-``q`` comparisons against limits.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

from .digraph import Digraph, add_loops, cycle_graph, empty_graph, feedback_number
from .errors import BudgetExceeded
from .search import (
    FUNCTION_BUDGET,
    fix_class_counts,
    full_space_graph,
    monte_carlo_stats,
    space_size,
    space_statistics,
)

POSITIVE_COUNT_BITS = 2**24


def positive_stability_count(n: int, q: int, max_bits: int = POSITIVE_COUNT_BITS) -> int:
    """Number of ``f`` in ``F(n,q)`` with ``s(f) > 0``.

    Each state independently maps to one of the ``q^n - (q-1)^n`` images that
    agree with it somewhere, so the count is that number to the power ``q^n``.
    """
    if n < 1 or q < 2:
        raise ValueError("need n >= 1 and q >= 2")
    base = q**n - (q - 1) ** n
    exponent = q**n
    if exponent * base.bit_length() > max_bits:
        raise BudgetExceeded(f"result would need about {exponent * base.bit_length()} bits")
    return base**exponent


def positive_stability_oracle(n: int, q: int, budget: int = FUNCTION_BUDGET) -> int:
    """Brute-force count of ``f`` in ``F(n,q)`` with ``s(f) > 0``."""
    res, _, _ = space_statistics(full_space_graph(n), q, False, budget=budget)
    return res.s_positive


def falling(q: int, t: int) -> int:
    return math.prod(range(q - t + 1, q + 1)) if t <= q else 0


def code_count(t: int, n: int, q: int) -> int:
    """Codes in ``[q]^n`` of size ``t`` whose words differ in every coordinate (0 if ``t > q``)."""
    if t < 1:
        raise ValueError("t must be at least 1")
    return falling(q, t) ** n // math.factorial(t)


def _shrink(q: int, m: int) -> Fraction:
    """``prod_{i=1}^{m} (1 - i/q)``, 1 for ``m <= 0``."""
    return Fraction(falling(q - 1, m), q**m) if m > 0 else Fraction(1)


def _check_cycle(n: int, q: int) -> None:
    if n < 2 or q < 2:
        raise ValueError("need n >= 2 and q >= 2")


def cycle_p0_formula(n: int, q: int) -> Fraction:
    """Fixed-point-free proportion of ``F(C_n, q)``."""
    _check_cycle(n, q)
    return sum((Fraction((-1) ** t, math.factorial(t)) * _shrink(q, t - 1) ** n
                for t in range(q + 1)), Fraction(0))


def cycle_p1_formula(n: int, q: int) -> Fraction:
    """Proportion of ``F(C_n, q)`` with exactly one fixed point."""
    _check_cycle(n, q)
    return sum((Fraction((-1) ** s, math.factorial(s)) * _shrink(q, s) ** n
                for s in range(q + 1)), Fraction(0))


def _alternating_float(n: int, q: int, shift: int) -> float:
    # term_t = (-1)^t / t! * prod_{i=1}^{t-shift} (1 - i/q)^n, accumulated iteratively
    terms = []
    term = 1.0
    for t in range(q + 1):
        if t > 0:
            i = t - shift
            term *= -1.0 / t * ((1.0 - i / q) ** n if i >= 1 else 1.0)
        terms.append(term)
        if abs(term) < 1e-300:
            break
    return math.fsum(terms)


def cycle_p0_float(n: int, q: int) -> float:
    _check_cycle(n, q)
    return _alternating_float(n, q, 1)


def cycle_p1_float(n: int, q: int) -> float:
    _check_cycle(n, q)
    return _alternating_float(n, q, 0)


def code_count_identity_lhs(n: int, q: int) -> Fraction:
    """``sum_t (-1)^(t-1) code_count(t,n,q) q^(-nt)``, which equals ``1 - p0(C_n, q)``."""
    return sum((Fraction((-1) ** (t - 1) * code_count(t, n, q), q ** (n * t)) for t in range(1, q + 1)),
               Fraction(0))


def p0_upper_bound(D: Digraph, q: int) -> Fraction:
    """``1 - q^(-tau(D))``."""
    return 1 - Fraction(1, q ** feedback_number(D))


class LoopsOnlyLimits(NamedTuple):
    p0: float
    p1: float
    p2: float
    mean_instability: float


def loopsonly_limits(n: int) -> LoopsOnlyLimits:
    """Large-``q`` limits for the graph with ``n`` loops and no other arcs."""
    if n < 1:
        raise ValueError("n must be at least 1")
    e = math.exp(-1.0)
    return LoopsOnlyLimits(1 - (1 - e) ** n, math.exp(-n), (1 - e) ** n - math.exp(-n), n * e)


def loopsonly_graph(n: int) -> Digraph:
    return add_loops(empty_graph(n))


# -- property report -------------------------------------------------------

def property_report(D: Digraph, qs: Sequence[int], strict: bool = True, samples: int = 100_000,
                    seed: int = 0, budget: int = FUNCTION_BUDGET) -> dict:
    """``p0, p1, p2`` and mean instability per ``q``, exact when enumerable.

    Consistency flags are finite-``q`` facts implied by the average of one
    fixed point per function (``p2 <= p0``; ``p0 = 0`` iff ``p1 = 1`` iff mean
    instability is 0) and by acyclicity (``p0 = 0``).  Nothing is claimed
    about limits.
    """
    acyclic = feedback_number(D) == 0
    rows = []
    for q in qs:
        if space_size(D, q, strict) <= budget:
            fc = fix_class_counts(D, q, strict, budget=budget)
            row = {"q": q, "exact": True, "p0": fc.p0, "p1": fc.p1, "p2": fc.p2,
                   "mean_instability": fc.mean_instability}
            row["p2_le_p0"] = fc.p2 <= fc.p0
            row["p0_zero_iff_p1_one"] = (fc.p0 == 0) == (fc.p1 == 1)
            row["p0_zero_iff_no_instability"] = (fc.p0 == 0) == (fc.mean_instability == 0)
        else:
            mc = monte_carlo_stats(D, q, strict, samples, seed)
            row = {"q": q, "exact": False, "p0": mc.p0, "p1": mc.p1, "p2": mc.p2,
                   "mean_instability": mc.mean_instability,
                   "p0_se": mc.p0_se, "p2_se": mc.p2_se, "mean_instability_se": mc.mean_instability_se}
            row["p2_le_p0"] = mc.p2 <= mc.p0 + 3 * (mc.p0_se + mc.p2_se)
            row["p0_zero_iff_p1_one"] = (mc.p0 == 0) == (mc.p1 == 1)
            row["p0_zero_iff_no_instability"] = (mc.p0 == 0) == (mc.mean_instability == 0)
        row["acyclic_consistent"] = not acyclic or row["p0"] == 0
        rows.append(row)
    flags = ("p2_le_p0", "p0_zero_iff_p1_one", "p0_zero_iff_no_instability", "acyclic_consistent")
    return {"acyclic": acyclic, "rows": rows, "consistent": all(r[k] for r in rows for k in flags)}


# -- sweep tables ----------------------------------------------------------

FORMULAS = ("cycle-p0", "cycle-p1", "positive-count", "code-count")
SWEEP_COLUMNS = ("n", "q", "value", "float", "oracle", "match")


def formula_value(name: str, n: int, q: int, t: int | None = None) -> Fraction:
    if name == "cycle-p0":
        return cycle_p0_formula(n, q)
    if name == "cycle-p1":
        return cycle_p1_formula(n, q)
    if name == "positive-count":
        return Fraction(positive_stability_count(n, q))
    if name == "code-count":
        if t is None:
            raise ValueError("code-count needs t")
        return Fraction(code_count(t, n, q))
    raise ValueError(f"unknown formula {name!r}; choose from {', '.join(FORMULAS)}")


def formula_oracle(name: str, n: int, q: int, budget: int = 2**24) -> Fraction | None:
    """Enumeration value for the formula, or ``None`` when out of reach."""
    try:
        if name in ("cycle-p0", "cycle-p1"):
            fc = fix_class_counts(cycle_graph(n), q, False, budget=budget)
            return fc.p0 if name == "cycle-p0" else fc.p1
        if name == "positive-count":
            return Fraction(positive_stability_oracle(n, q, budget=budget))
    except BudgetExceeded:
        return None
    return None


def sweep_rows(name: str, ns: Sequence[int], qs: Sequence[int], t: int | None = None,
               oracle_budget: int = 2**24) -> list[dict]:
    rows = []
    for n in ns:
        for q in qs:
            v = formula_value(name, n, q, t)
            o = formula_oracle(name, n, q, oracle_budget)
            rows.append({"n": n, "q": q, "value": str(v), "float": float(v),
                         "oracle": None if o is None else str(o),
                         "match": None if o is None else o == v})
    return rows
