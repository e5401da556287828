"""Acceptance suite: one check per criterion, each reporting pass/fail with measured values."""
from __future__ import annotations

import logging
import math
import random
import time
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from . import constructions as C
from .counting import (
    code_count_identity_lhs,
    cycle_p0_float,
    cycle_p0_formula,
    cycle_p1_float,
    cycle_p1_formula,
    loopsonly_graph,
    loopsonly_limits,
    p0_upper_bound,
    positive_stability_count,
    positive_stability_oracle,
)
from .digraph import (
    Digraph,
    add_loops,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    disjoint_union,
    generate_small_digraphs,
    is_near_biclique,
    is_weakly_connected,
    out_star,
    random_digraph,
    sigma,
    sources,
    weak_components,
)
from .fds import instability, interaction_graph, is_monotone, stability
from .search import (
    extremal,
    fix_class_counts,
    full_space_graph,
    monotone_optimal_stability,
    monte_carlo_stats,
    sample_uniform,
)

log = logging.getLogger(__name__)

DEFAULT_MAX_N = 4


@dataclass(frozen=True)
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    seconds: float
    limit: float | None

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name} ({self.seconds:.1f}s): {self.detail}"


def _small(max_n: int, cap: int) -> list[Digraph]:
    return [D for n in range(1, min(cap, max_n) + 1) for D in generate_small_digraphs(n)]


def _random_graphs(count: int, n_max: int, seed: int = 0) -> list[Digraph]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, n_max)
        out.append(random_digraph(n, rng.choice([0.1, 0.2, 0.35, 0.5, 0.8]), rng))
    return out


def c01_complete(max_n: int) -> tuple[bool, str]:
    parts, ok = [], True
    for n, q in [(2, 2), (3, 2), (2, 3)]:
        s = extremal(complete_graph(n), q, "s[D,q]").value
        i = extremal(complete_graph(n), q, "i[D,q]").value
        cert = C.complete_graph_fn(n, q).check()
        good = s == n // q and i == n - -(-n // q) and cert["ok"]
        ok &= good
        parts.append(f"K{n},q={q}: s={s} i={i} construction={'ok' if cert['ok'] else 'BAD'}")
    return ok, "; ".join(parts)


def c02_sigma(max_n: int) -> tuple[bool, str]:
    ok, methods, checked = True, {}, 0
    for D in _small(max_n, 3):
        q = max(2, D.n - len(sources(D)))
        r = extremal(add_loops(D), q, "s[D,q]")
        methods[r.method] = methods.get(r.method, 0) + 1
        if r.value != D.n - sigma(D):
            ok = False
            log.warning("s[D°,%d] = %d != n - sigma for arcs %s", q, r.value, sorted(D.arcs))
        checked += 1
    rand_ok = 0
    graphs = _random_graphs(40, 6, seed=2)
    for D in graphs:
        q = max(2, D.n - len(sources(D)))
        cert = C.loopfull_stability_fn(D, q)
        res = cert.check()
        rand_ok += res["ok"]
    ok &= rand_ok == len(graphs)
    return ok, (f"{checked} small graphs exact (methods {methods}); "
                f"{rand_ok}/{len(graphs)} random constructions reach n - sigma with G(f) = D°")


def c03_instability(max_n: int) -> tuple[bool, str]:
    graphs = _small(max_n, 4)
    good = sum(C.loopfull_instability_fn(D, 3).check()["ok"] for D in graphs)
    return good == len(graphs), f"{good}/{len(graphs)} graphs with i(f) = n and G(f) = D°"


def c04_outstar(max_n: int) -> tuple[bool, str]:
    r = extremal(add_loops(out_star(4)), 2, "s[D,q]", method="full")
    return r.value == 2, f"s[D°,2] = {r.value} over {r.space_size} functions (n - 2 = 2)"


def _pipeline_graphs(max_n: int) -> list[tuple[Digraph, int]]:
    small = [D for D in generate_small_digraphs(min(4, max_n))]
    return [(D, 0) for D in small] + [(D, i) for i, D in enumerate(_random_graphs(200, 10, seed=1))]


def c05_halfn(max_n: int) -> tuple[bool, str]:
    graphs = _pipeline_graphs(max_n)
    bad = 0
    for D, seed in graphs:
        cert = C.halfn_stable_fn(D, seed)
        if not cert.check()["ok"]:
            bad += 1
            log.warning("half-n pipeline failed on %s", sorted(D.arcs))
    return bad == 0, f"{len(graphs) - bad}/{len(graphs)} graphs with G(f) = D° and s(f) >= n/2"


def c06_monotone(max_n: int) -> tuple[bool, str]:
    graphs = _pipeline_graphs(max_n)
    bad, conn_bad, discrepancies = 0, 0, 0
    for D, seed in graphs:
        cert = C.monotone_halfn_fn(D, seed)
        res = cert.check()
        if not (res["ok"] and is_monotone(cert.fds)):
            bad += 1
            log.warning("monotone pipeline failed on %s", sorted(D.arcs))
        s = stability(cert.fds)[0]
        if s < D.n // 2:
            if is_weakly_connected(D):
                conn_bad += 1
                log.warning("connected graph below floor(n/2): %s", sorted(D.arcs))
            else:
                discrepancies += 1
                log.info("disconnected graph below floor(n/2) (components %s): %s",
                         [len(c) for c in weak_components(D)], sorted(D.arcs))
    return bad == 0 and conn_bad == 0, (
        f"{len(graphs) - bad}/{len(graphs)} monotone with G(f) = D° and the component bound; "
        f"connected below floor(n/2): {conn_bad}; disconnected discrepancies logged: {discrepancies}")


def c07_bm(max_n: int) -> tuple[bool, str]:
    vals = {m: monotone_optimal_stability(C.bm_graph(m)).value for m in (1, 2, 3)}
    return all(v == m for m, v in vals.items()), f"s+[B_m°,2] = {vals}"


def c08_kmm(max_n: int) -> tuple[bool, str]:
    cert = C.kmm_stability_fn(2).check()
    mono = monotone_optimal_stability(complete_bipartite(2)).value
    s = cert["claims"][0]["measured"]
    return cert["ok"] and mono == 2, f"s(f) = {s} with G(f) = K°_2,2: {cert['graph_ok']}; s+ = {mono}"


def c09_near_biclique(max_n: int) -> tuple[bool, str]:
    graphs = _small(max_n, 4)
    mismatches, witnessed, attained = 0, 0, 0
    for D in graphs:
        best = monotone_optimal_stability(D).value
        w = is_near_biclique(D)
        if (best == D.n - 1) != (w is not None and bool(D.arcs)):
            mismatches += 1
            log.warning("near-biclique mismatch on %s", sorted(D.arcs))
        if w is not None:
            witnessed += 1
            attained += C.near_biclique_fn(D, w).check()["ok"]
    return mismatches == 0 and attained == witnessed, (
        f"{len(graphs)} graphs, {mismatches} mismatches, {attained}/{witnessed} witnesses attain n - 1")


def c10_positive_count(max_n: int) -> tuple[bool, str]:
    got = {(n, q): (positive_stability_count(n, q), positive_stability_oracle(n, q))
           for n, q in [(2, 2), (1, 2), (1, 3)]}
    ok = got[(2, 2)] == (81, 81) and got[(1, 2)] == (1, 1) and got[(1, 3)] == (1, 1)
    return ok, "; ".join(f"(n={n},q={q}) formula={a} brute={b}" for (n, q), (a, b) in got.items())


def _all_small_with_loops(max_n: int) -> list[Digraph]:
    return [D for n in range(1, min(3, max_n) + 1) for D in generate_small_digraphs(n, loopless=False)]


def c11_average_fixed(max_n: int) -> tuple[bool, str]:
    graphs = _all_small_with_loops(max_n)
    fix_bad = stab_bad = 0
    for D in graphs:
        fc = fix_class_counts(D, 2, True)
        fix_bad += fc.total_fixed != fc.space_size
        stab_bad += fc.mean_stability > Fraction(D.n, 2)
    return fix_bad == 0 and stab_bad == 0, (
        f"{len(graphs)} graphs: sum |Fix| != |F| on {fix_bad}; mean s > n/q on {stab_bad}")


def c12_p0_bound(max_n: int) -> tuple[bool, str]:
    graphs = _all_small_with_loops(max_n)
    over = sum(fix_class_counts(D, 2, True).p0 > p0_upper_bound(D, 2) for D in graphs)
    tight = {}
    for name, D in [("C2", cycle_graph(2)), ("C3", cycle_graph(3)),
                    ("C2+C2", disjoint_union(cycle_graph(2), cycle_graph(2)))]:
        tight[name] = (fix_class_counts(D, 2, True).p0, p0_upper_bound(D, 2))
    ok = over == 0 and all(a == b for a, b in tight.values())
    return ok, (f"{len(graphs)} graphs, bound exceeded on {over}; equality: "
                + ", ".join(f"{k} p0={a} bound={b}" for k, (a, b) in tight.items()))


def c13_cycle_formulas(max_n: int) -> tuple[bool, str]:
    ok, parts = True, []
    for n, q in [(2, 2), (3, 2), (2, 3), (3, 3)]:
        fc = fix_class_counts(cycle_graph(n), q, False)
        p0, p1 = cycle_p0_formula(n, q), cycle_p1_formula(n, q)
        ident = code_count_identity_lhs(n, q) == 1 - p0
        good = p0 == fc.p0 and p1 == fc.p1 and ident
        ok &= good
        parts.append(f"(n={n},q={q}) p0={p0} p1={p1}{'' if good else ' MISMATCH'}")
    e = math.exp(-1)
    worst = max(max(abs(cycle_p0_float(n, 10**4) - e), abs(cycle_p1_float(n, 10**4) - e)) for n in range(2, 7))
    ok &= worst < 1e-3
    parts.append(f"max |V - 1/e| at q=10^4, n=2..6: {worst:.2e}")
    return ok, "; ".join(parts)


def c14_double_alphabet(max_n: int) -> tuple[bool, str]:
    D = cycle_graph(3)
    bad = 0
    for seed in range(100):
        f = sample_uniform(D, 2, False, seed)
        g = C.double_alphabet(f, D)
        if instability(g)[0] < instability(f)[0] or interaction_graph(g) != D:
            bad += 1
    return bad == 0, f"{100 - bad}/100 lifts with i(g) >= i(f) and G(g) = C3"


def c15_monte_carlo(max_n: int) -> tuple[bool, str]:
    e = math.exp(-1)
    full = monte_carlo_stats(full_space_graph(2), 50, False, 100_000, seed=0)
    loops = monte_carlo_stats(loopsonly_graph(2), 50, True, 100_000, seed=0)
    target = loopsonly_limits(2).p0
    # every fixed-point-free map of [50] is non-constant, so all 49^50 are strict
    exact_q50 = 1 - (1 - Fraction(49**50, 50**50 - 50)) ** 2
    ok1 = abs(full.mean_instability - e) < 0.05
    z = abs(loops.p0 - target) / loops.p0_se
    ok2 = z <= 3
    return ok1 and ok2, (
        f"mean i over F(2,50) = {full.mean_instability:.4f} (1/e = {e:.4f}); "
        f"loops-only p0 = {loops.p0:.5f} +- {loops.p0_se:.5f}, limit {target:.5f}, "
        f"{z:.2f} SE away; exact value at q=50 is {float(exact_q50):.5f}")


def c16_degree_family(max_n: int) -> tuple[bool, str]:
    cert = C.degree_family(2, 1, 2)
    f = cert.fds
    dists = set(int(d) for d in np.asarray(f.distances))
    s = stability(f)[0]
    Dl = add_loops(Digraph(f.n, [tuple(a) for a in cert.notes["graph"]]))
    bound = C.degree_bound_holds(Dl, 2, s)
    ok = dists == {2} and s == 2 and bound and cert.check()["ok"]
    return ok, f"dH(x,f(x)) values {sorted(dists)}, s(f) = {s}, degree bound holds: {bound}"


CRITERIA: list[tuple[int, str, Callable[[int], tuple[bool, str]], float | None]] = [
    (1, "complete graphs exact", c01_complete, 10),
    (2, "loop-full stability n - sigma", c02_sigma, 120),
    (3, "loop-full instability n", c03_instability, 60),
    (4, "out-star tightness", c04_outstar, None),
    (5, "half-n stable pipeline", c05_halfn, 300),
    (6, "monotone pipeline", c06_monotone, None),
    (7, "B_m monotone optimum", c07_bm, 30),
    (8, "K_m,m stability", c08_kmm, None),
    (9, "near-biclique characterization", c09_near_biclique, 300),
    (10, "positive-stability count", c10_positive_count, None),
    (11, "average one fixed point", c11_average_fixed, None),
    (12, "p0 bound and tightness", c12_p0_bound, None),
    (13, "cycle formulas", c13_cycle_formulas, None),
    (14, "alphabet doubling", c14_double_alphabet, None),
    (15, "Monte Carlo limits", c15_monte_carlo, 120),
    (16, "degree family", c16_degree_family, None),
]


def select(suite: str) -> list[int]:
    """``"all"`` or a comma-separated list of criterion numbers."""
    if suite == "all":
        return [c[0] for c in CRITERIA]
    try:
        picked = [int(s) for s in suite.split(",")]
    except ValueError:
        raise ValueError(f"unknown suite {suite!r}") from None
    known = {c[0] for c in CRITERIA}
    if not set(picked) <= known:
        raise ValueError(f"unknown criteria {sorted(set(picked) - known)}")
    return picked


def run_criterion(number: int, max_n: int = DEFAULT_MAX_N) -> CriterionResult:
    _, name, fn, limit = next(c for c in CRITERIA if c[0] == number)
    start = time.perf_counter()
    passed, detail = fn(max_n)
    seconds = time.perf_counter() - start
    if limit is not None and seconds >= limit:
        passed = False
        detail += f"; exceeded the {limit}s runtime limit"
    return CriterionResult(number, name, passed, detail, seconds, limit)


def run_suite(suite: str = "all", max_n: int = DEFAULT_MAX_N) -> list[CriterionResult]:
    return [run_criterion(k, max_n) for k in select(suite)]
