from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import digraphs
from fdsys import constructions as C
from fdsys.digraph import (
    Digraph,
    NearBicliqueWitness,
    OutCycleShape,
    add_loops,
    branch,
    cofunctional_spanning_subgraph,
    complete_bipartite,
    complete_graph,
    cycle_graph,
    empty_graph,
    fork,
    is_near_biclique,
    out_star,
    recognize_out_cycle,
    sigma,
    weak_components,
)
from fdsys.fds import (
    Fds,
    LocalFunction,
    all_states,
    dual_local,
    identity_fds,
    instability,
    interaction_graph,
    is_monotone,
    stability,
    xi_set,
)
from fdsys.search import sample_uniform

FIGURE = OutCycleShape((1, 2, 3, 4, 5, 6), (1, 3, 4), (7, 8, 9))


def measured(cert, kind="s"):
    return stability(cert.fds)[0] if kind == "s" else instability(cert.fds)[0]


def test_complete_graph_fn_examples():
    for n, q, s, i in [(3, 2, 1, 1), (2, 2, 1, 1), (4, 4, 1, 3)]:
        cert = C.complete_graph_fn(n, q)
        assert cert.check()["ok"]
        assert measured(cert) == s and measured(cert, "i") == i


def test_double_alphabet_examples():
    f = Fds(2, [LocalFunction(2, (2,), (0, 1)), LocalFunction(2, (1,), (1, 0))])
    assert instability(f)[0] == 1
    g = C.double_alphabet(f, cycle_graph(2))
    assert g.q == 4 and interaction_graph(g) == cycle_graph(2) and instability(g)[0] >= 1
    with pytest.raises(ValueError):
        C.double_alphabet(f, empty_graph(2))


def test_double_alphabet_sources_constant_second_component():
    D = Digraph(2, [(1, 2)])
    f = Fds(2, [LocalFunction.constant(2, 0), LocalFunction(2, (1,), (1, 0))])
    g = C.double_alphabet(f, D)
    assert g.local(1).table == (2,)
    assert interaction_graph(g) == D


def test_loopfull_stability_fn_examples():
    cert = C.loopfull_stability_fn(cycle_graph(3), 3)
    assert cert.check()["ok"] and measured(cert) == 2
    cert = C.loopfull_stability_fn(empty_graph(3), 2)
    assert cert.fds == identity_fds(3, 2)
    cert = C.loopfull_stability_fn(out_star(4), 3)
    assert cert.check()["ok"] and measured(cert) == 3 == 4 - sigma(out_star(4))
    with pytest.raises(ValueError):
        C.loopfull_stability_fn(complete_graph(4), 3)


def test_loopfull_instability_fn_examples():
    for D in (cycle_graph(2), empty_graph(3), complete_graph(3)):
        cert = C.loopfull_instability_fn(D, 3)
        assert cert.check()["ok"] and measured(cert, "i") == D.n
        assert interaction_graph(cert.fds) == add_loops(D)
    with pytest.raises(ValueError):
        C.loopfull_instability_fn(cycle_graph(2), 2)


def test_degree_family_examples():
    cert = C.degree_family(2, 1, 2)
    assert cert.fds.n == 4 and measured(cert) == 2
    assert set(cert.fds.distances.tolist()) == {2}
    assert cert.check()["ok"]
    cert = C.degree_family(1, 1, 2)
    assert cert.fds.n == 2 and measured(cert) == 1 and cert.check()["ok"]


@pytest.mark.parametrize("t,delta,q", [(1, 1, 3), (2, 1, 3), (1, 2, 2), (2, 2, 2)])
def test_degree_family_every_state_has_t_wrong(t, delta, q):
    cert = C.degree_family(t, delta, q)
    assert cert.check()["ok"]
    assert set(cert.fds.distances.tolist()) == {t}
    D = add_loops(Digraph(cert.fds.n, [tuple(a) for a in cert.notes["graph"]]))
    assert C.degree_bound_holds(D, q, measured(cert))


def test_outcycle_boolean_fn_examples():
    pure = recognize_out_cycle(cycle_graph(4))
    cert = C.outcycle_boolean_fn(pure)
    assert cert.check()["ok"] and measured(cert) >= 2
    cert = C.outcycle_boolean_fn(FIGURE)
    assert cert.check()["ok"] and measured(cert) >= 5
    cert = C.outcycle_boolean_fn(OutCycleShape((1,)))
    assert cert.fds == identity_fds(1, 2)


def test_outcycle_shapes_all_certified():
    rng = random.Random(3)
    for _ in range(60):
        k = rng.randint(1, 7)
        B = sorted(rng.sample(range(k), rng.randint(0, min(k, 1 if k == 1 else k))))
        A = tuple(range(1, k + 1))
        shape = OutCycleShape(A, tuple(A[b] for b in B), tuple(range(k + 1, k + 1 + len(B))))
        for fn in (C.outcycle_boolean_fn, C.monotone_outcycle_fn):
            cert = fn(shape)
            assert cert.check()["ok"], (shape, fn.__name__)
        assert is_monotone(C.monotone_outcycle_fn(shape).fds)


def test_lifts_on_single_vertex():
    f = identity_fds(1, 2)
    H = empty_graph(1)
    for lift, op in ((C.lift_fork, fork), (C.lift_branch, branch)):
        g = lift(f, H, 1)
        assert g.n == 3 and stability(g)[0] == 2
        assert interaction_graph(g) == add_loops(op(H, 1))
    with pytest.raises(ValueError):
        C.lift_fork(f, H, 2)


@settings(max_examples=40, deadline=None)
@given(digraphs(max_n=6, cofunctional=True))
def test_lifts_add_exactly_one(H):
    f = C.halfn_stable_fn(H).fds
    assert interaction_graph(f) == add_loops(H)
    for a in (1, H.n):
        for lift, op in ((C.lift_fork, fork), (C.lift_branch, branch)):
            g = lift(f, H, a)
            assert stability(g)[0] == stability(f)[0] + 1
            assert interaction_graph(g) == add_loops(op(H, a))


def test_lift_supergraph_examples():
    f = C.outcycle_boolean_fn(recognize_out_cycle(cycle_graph(3))).fds
    assert C.lift_supergraph(f, cycle_graph(3), cycle_graph(3)) == f
    g = C.lift_supergraph(f, cycle_graph(3), complete_graph(3))
    assert interaction_graph(g) == add_loops(complete_graph(3)) and stability(g)[0] >= stability(f)[0] == 2
    D = Digraph(3, [(1, 2), (2, 3), (3, 2), (1, 3)])
    H = cofunctional_spanning_subgraph(D)
    fH = C.halfn_stable_fn(H).fds
    g = C.lift_supergraph(fH, H, D)
    assert g.local(1) == LocalFunction.identity(2, 1)
    with pytest.raises(ValueError):
        C.lift_supergraph(f, complete_graph(3), cycle_graph(3))


@settings(max_examples=40, deadline=None)
@given(digraphs(max_n=8))
def test_lift_supergraph_never_enlarges_wrong_sets(D):
    H = cofunctional_spanning_subgraph(D, seed=1)
    f = C.halfn_stable_fn(H).fds
    g = C.lift_supergraph(f, H, D)
    X = all_states(D.n, 2)
    wrong_f = f.image != X
    wrong_g = g.image != X
    assert not np.any(wrong_g & ~wrong_f)
    assert interaction_graph(g) == add_loops(D)


def test_halfn_examples():
    cert = C.halfn_stable_fn(complete_bipartite(2))
    assert cert.check()["ok"] and measured(cert) >= 2
    assert C.halfn_stable_fn(empty_graph(4)).fds == identity_fds(4, 2)
    assert C.halfn_stable_fn(complete_graph(5), seed=3).check()["ok"]


def _restrict(f: Fds, comp: list[int]) -> Fds:
    index = {v: i + 1 for i, v in enumerate(comp)}
    locs = [LocalFunction(2, tuple(index[u] for u in f.local(v).support), f.local(v).table) for v in comp]
    return Fds(2, locs)


@settings(max_examples=40, deadline=None)
@given(digraphs(max_n=8))
def test_halfn_composes_over_components(D):
    f = C.halfn_stable_fn(D).fds
    total = 0
    for comp in weak_components(D):
        part = _restrict(f, comp)
        sub, _ = D.induced(comp)
        assert interaction_graph(part) == add_loops(sub)
        assert 2 * stability(part)[0] >= len(comp)
        total += stability(part)[0]
    assert stability(f)[0] == total


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=8))
def test_halfn_certificate(D):
    assert C.halfn_stable_fn(D, seed=D.n).check()["ok"]


def test_phi_psi_examples():
    phi, psi = C.phi_local(2, [1, 3]), C.psi_local(2, [1, 3])
    assert len(xi_set(phi, 2)) == 1 and len(xi_set(psi, 2)) == 1
    for loc in (phi, psi):
        f = Fds(2, [LocalFunction.identity(2, 1), loc, LocalFunction.identity(2, 3)])
        assert is_monotone(f)
    assert dual_local(phi) == psi
    with pytest.raises(ValueError):
        C.phi_local(1, [])


def test_monotone_outcycle_examples():
    cert = C.monotone_outcycle_fn(recognize_out_cycle(cycle_graph(3)))
    assert measured(cert) == 2 and set(cert.notes["types"].values()) == {"phi"}
    cert = C.monotone_outcycle_fn(FIGURE)
    assert cert.check()["ok"] and measured(cert) >= 4 and is_monotone(cert.fds)


def test_monotone_halfn_examples():
    assert C.monotone_halfn_fn(empty_graph(3)).fds == identity_fds(3, 2)
    cert = C.monotone_halfn_fn(complete_graph(4))
    assert cert.check()["ok"] and is_monotone(cert.fds) and cert.notes["floor_half_n_met"]


@settings(max_examples=60, deadline=None)
@given(digraphs(max_n=8))
def test_monotone_halfn_certificate(D):
    cert = C.monotone_halfn_fn(D, seed=2)
    assert cert.check()["ok"] and is_monotone(cert.fds)


def test_kmm_examples():
    for m in (1, 2, 3):
        cert = C.kmm_stability_fn(m)
        assert cert.check()["ok"] and measured(cert) == 2 * m - 1
        assert interaction_graph(cert.fds) == add_loops(complete_bipartite(m))


def test_near_biclique_fn_examples():
    for D, s in ((complete_graph(3), 2), (complete_graph(2), 1)):
        cert = C.near_biclique_fn(D, is_near_biclique(D))
        assert cert.check()["ok"] and measured(cert) == s and is_monotone(cert.fds)
    D = Digraph(3, [(1, 2), (1, 3)])
    w = is_near_biclique(D)
    cert = C.near_biclique_fn(D, w)
    assert cert.fds.local(1) == LocalFunction.identity(2, 1)
    assert all(cert.fds.image[:, 0] == all_states(3, 2)[:, 0])
    bad = NearBicliqueWitness(frozenset({1, 2}), frozenset({2, 3}), frozenset())
    with pytest.raises(ValueError):
        C.near_biclique_fn(complete_graph(3), bad)


def test_bm_graph_examples():
    assert C.bm_graph(1).arcs == {(1, 2), (2, 1), (1, 3)}
    assert C.bm_graph(2).n == 5 and len(C.bm_graph(2).arcs) == 5


def test_certificate_detects_false_claims():
    cert = C.complete_graph_fn(3, 2)
    wrong = C.ConstructionCertificate(cert.fds, complete_graph(3), (C.Claim("s", "=", 2),))
    assert not wrong.check()["ok"]
    wrong_graph = C.ConstructionCertificate(cert.fds, cycle_graph(3), cert.claims)
    assert not wrong_graph.check()["graph_ok"]


@settings(max_examples=40, deadline=None)
@given(digraphs(max_n=6))
def test_loopfull_constructions_on_random_graphs(D):
    q = max(2, D.n - len([v for v in D.vertices if not D.in_neighbours(v)]))
    assert C.loopfull_stability_fn(D, q).check()["ok"]
    if D.n <= 5:
        assert C.loopfull_instability_fn(D, 3).check()["ok"]


def test_double_alphabet_on_sampled_functions():
    D = cycle_graph(3)
    for seed in range(30):
        f = sample_uniform(D, 2, False, seed)
        g = C.double_alphabet(f, D)
        assert instability(g)[0] >= instability(f)[0] and interaction_graph(g) == D
