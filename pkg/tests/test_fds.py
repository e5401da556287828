from __future__ import annotations

import itertools

import pytest
from hypothesis import given, strategies as st

from fdsys.digraph import Digraph, add_loops, cycle_graph, empty_graph, feedback_number
from fdsys.fds import (
    Fds,
    LocalFunction,
    StateVector,
    delta_set,
    dual,
    dual_local,
    evaluate,
    fds_from_callables,
    fixed_points,
    guessing_code,
    hamming,
    identity_fds,
    instability,
    interaction_graph,
    is_identity,
    is_monotone,
    stability,
    xi_set,
)
from fdsys.constructions import phi_local, psi_local


@st.composite
def random_fds(draw, max_n: int = 4, qs=(2, 3)):
    n = draw(st.integers(1, max_n))
    q = draw(st.sampled_from(qs))
    locs = []
    for _ in range(n):
        sup = sorted(draw(st.sets(st.integers(1, n), max_size=min(n, 3))))
        table = draw(st.lists(st.integers(0, q - 1), min_size=q ** len(sup), max_size=q ** len(sup)))
        locs.append(LocalFunction(q, tuple(sup), tuple(table)))
    return Fds(q, locs)


def states(n, q):
    return [StateVector.from_rank(q, n, r) for r in range(q**n)]


def shift(n, q):
    return fds_from_callables(n, q, [(v,) for v in range(1, n + 1)],
                              [lambda x, v=v: x[v] + 1 for v in range(1, n + 1)])


def k_formula(n, q):
    return fds_from_callables(n, q, [[u for u in range(1, n + 1) if u != v] for v in range(1, n + 1)],
                              [lambda x, v=v: v - sum(x.values()) for v in range(1, n + 1)])


def naive_distances(f):
    return [hamming(x, evaluate(f, x)) for x in states(f.n, f.q)]


def test_state_vector_rank_round_trip():
    for r in range(27):
        assert StateVector.from_rank(3, 3, r).rank == r
    x = StateVector(3, (0, 1, 2))
    assert x[1] == 0 and x[3] == 2 and x.rank == 0 + 3 + 18
    with pytest.raises(ValueError):
        StateVector(2, (0, 2))


def test_local_function_validation():
    with pytest.raises(ValueError):
        LocalFunction(2, (1,), (0, 1, 0))
    with pytest.raises(ValueError):
        LocalFunction(2, (2, 1), (0, 1, 0, 1))
    with pytest.raises(ValueError):
        Fds(2, [LocalFunction(2, (3,), (0, 1))])


def test_evaluate_examples():
    x = StateVector(3, (2, 0, 1))
    assert evaluate(identity_fds(3, 3), x) == x
    assert evaluate(shift(3, 3), StateVector(3, (0, 0, 0))) == StateVector(3, (1, 1, 1))
    assert evaluate(k_formula(3, 2), StateVector(2, (0, 0, 0))) == StateVector(2, (1, 0, 1))
    with pytest.raises(ValueError):
        evaluate(identity_fds(2, 2), x)


def test_interaction_graph_examples():
    const = Fds(2, [LocalFunction.constant(2, 1)] * 3)
    assert interaction_graph(const) == empty_graph(3)
    assert interaction_graph(identity_fds(3, 2)) == add_loops(empty_graph(3))
    f = fds_from_callables(2, 2, [(1, 2), (1,)], [lambda x: x[2], lambda x: x[1]])
    assert interaction_graph(f) == cycle_graph(2)


def test_hamming_examples():
    x = StateVector(2, (0, 1, 1))
    assert hamming(x, x) == 0
    assert hamming(StateVector(2, (0, 0, 0)), StateVector(2, (1, 1, 1))) == 3
    a, b = StateVector(3, (0, 1, 2)), StateVector(3, (0, 1, 0))
    assert hamming(a, b) == 1 and delta_set(a, b) == {3}
    with pytest.raises(ValueError):
        hamming(a, StateVector(2, (0, 1, 0)))


def test_stability_instability_examples():
    assert stability(identity_fds(3, 2))[0] == 3
    assert stability(shift(3, 3))[0] == 0
    assert stability(k_formula(3, 2))[0] == 1
    assert instability(identity_fds(3, 2))[0] == 0
    assert instability(shift(3, 3))[0] == 3
    assert instability(k_formula(3, 2))[0] == 1


def test_witness_is_smallest_rank():
    f = k_formula(3, 2)
    value, x = stability(f)
    d = naive_distances(f)
    assert x.rank == min(r for r, v in enumerate(d) if 3 - v == value)


def test_fixed_points_examples():
    assert len(fixed_points(identity_fds(2, 3))) == 9
    assert fixed_points(shift(2, 3)) == []
    f = fds_from_callables(2, 2, [(2,), (1,)], [lambda x: 1 - x[2], lambda x: x[1]])
    assert fixed_points(f) == []


def test_monotone_and_dual_examples():
    assert is_monotone(identity_fds(3, 2))
    assert not is_monotone(Fds(2, [LocalFunction(2, (1,), (1, 0))]))
    phi = phi_local(1, [2, 3])
    assert is_monotone(Fds(2, [phi, LocalFunction.identity(2, 2), LocalFunction.identity(2, 3)]))
    assert dual(identity_fds(3, 2)) == identity_fds(3, 2)
    assert dual_local(phi) == psi_local(1, [2, 3])
    with pytest.raises(ValueError):
        is_monotone(identity_fds(2, 3))


def test_xi_set_examples():
    assert xi_set(LocalFunction.identity(2, 1), 1) == frozenset()
    flip = LocalFunction(2, (1,), (1, 0))
    assert xi_set(flip, 1) == {(0,), (1,)}
    assert xi_set(phi_local(1, [2, 3]), 1) == {(0, 1, 1)}
    assert xi_set(psi_local(2, [1, 3]), 2) == {(0, 1, 0)}
    with pytest.raises(ValueError):
        xi_set(LocalFunction(2, (2,), (0, 1)), 1)


def test_guessing_code_examples():
    assert guessing_code(identity_fds(3, 2)) == {StateVector(2, (0, 0, 0))}
    const = Fds(3, [LocalFunction.constant(3, 2)] * 2)
    assert len(guessing_code(const)) == 9
    for e1, e2 in itertools.product((0, 1), repeat=2):
        f = fds_from_callables(2, 2, [(2,), (1,)], [lambda x, e=e1: x[2] + e, lambda x, e=e2: x[1] + e])
        assert len(guessing_code(f)) >= 2


def test_json_round_trip():
    f = k_formula(3, 3)
    assert Fds.from_json(f.to_json()) == f
    with pytest.raises(ValueError):
        Fds.from_dict({"n": 2, "q": 2, "locals": [{"support": [], "table": [0]}]})


@given(random_fds())
def test_distances_match_naive_scan(f):
    assert list(f.distances) == naive_distances(f)


@given(random_fds())
def test_stability_instability_basic_laws(f):
    s, i = stability(f)[0], instability(f)[0]
    assert s + i <= f.n
    assert (i == 0) == bool(fixed_points(f))
    assert (s == f.n) == is_identity(f)


@given(random_fds(qs=(2,)))
def test_dual_preserves_graph_and_stability(f):
    g = dual(f)
    assert interaction_graph(g) == interaction_graph(f)
    assert stability(g)[0] == stability(f)[0]
    assert dual(g) == f


@given(random_fds())
def test_guessing_code_size_bound(f):
    tau = feedback_number(interaction_graph(f))
    assert len(guessing_code(f)) >= f.q ** (f.n - tau)


@given(random_fds())
def test_tables_rederived_from_evaluations(f):
    for v, loc in enumerate(f.locals, 1):
        for idx in range(len(loc.table)):
            coords = [0] * f.n
            for u, val in loc.assignment(idx).items():
                coords[u - 1] = val
            assert evaluate(f, StateVector(f.q, tuple(coords)))[v] == loc.table[idx]


@given(random_fds())
def test_interaction_graph_matches_definition(f):
    arcs = set()
    for v, loc in enumerate(f.locals, 1):
        for x in states(f.n, f.q):
            for u in range(1, f.n + 1):
                for a in range(f.q):
                    y = list(x.coords)
                    y[u - 1] = a
                    if loc(x) != loc(y):
                        arcs.add((u, v))
    assert interaction_graph(f) == Digraph(f.n, arcs)
