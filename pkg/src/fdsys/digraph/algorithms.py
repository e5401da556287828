"""Exact structural quantities: sources, girth, feedback number, sigma."""
from __future__ import annotations

from collections import deque
from itertools import combinations

import networkx as nx

from ..errors import BudgetExceeded
from .graph import Digraph

TAU_LIMIT = 20
SIGMA_LIMIT = 24
INFINITE = float("inf")


def sources(D: Digraph) -> frozenset[int]:
    return frozenset(v for v in D.vertices if not D.in_neighbours(v))


def add_loops(D: Digraph) -> Digraph:
    """The loop-full graph obtained by adding a loop at every vertex."""
    if not D.is_loopless():
        raise ValueError("add_loops expects a loopless graph")
    return Digraph(D.n, set(D.arcs) | {(v, v) for v in D.vertices})


def remove_loops(D: Digraph) -> Digraph:
    return Digraph(D.n, [(u, v) for u, v in D.arcs if u != v])


def is_cofunctional(D: Digraph) -> bool:
    return D.max_in_degree() <= 1


def subgraph_leq(H: Digraph, D: Digraph) -> bool:
    """``H <= D``: spanning subgraph whose sources are all sources of ``D``."""
    if H.n != D.n:
        raise ValueError("graphs have different vertex counts")
    if not H.arcs <= D.arcs:
        return False
    return sources(H) <= sources(D)


def to_networkx(D: Digraph) -> nx.DiGraph:
    G = nx.DiGraph()
    G.add_nodes_from(D.vertices)
    G.add_edges_from(D.arcs)
    return G


def weak_components(D: Digraph) -> list[list[int]]:
    """Weakly connected components, each sorted, ordered by smallest vertex."""
    comps = [sorted(c) for c in nx.weakly_connected_components(to_networkx(D))]
    return sorted(comps)


def is_weakly_connected(D: Digraph) -> bool:
    return D.n > 0 and len(weak_components(D)) == 1


def girth(D: Digraph) -> float:
    """Length of a shortest directed cycle (loops have length 1); ``inf`` if acyclic."""
    if any(u == v for u, v in D.arcs):
        return 1
    best = INFINITE
    for s in D.vertices:
        dist = {s: 0}
        queue = deque([s])
        while queue:
            u = queue.popleft()
            if dist[u] + 1 >= best:
                break
            for w in D.out_neighbours(u):
                if w == s:
                    best = min(best, dist[u] + 1)
                elif w not in dist:
                    dist[w] = dist[u] + 1
                    queue.append(w)
    return best


def _acyclic_mask(succ: list[int], alive: int) -> bool:
    """Kahn's algorithm on the subgraph induced by the bitmask ``alive``."""
    indeg = {}
    for v in range(len(succ)):
        if alive >> v & 1:
            indeg.setdefault(v, 0)
            m = succ[v] & alive
            while m:
                w = (m & -m).bit_length() - 1
                indeg[w] = indeg.get(w, 0) + 1
                m &= m - 1
    stack = [v for v, d in indeg.items() if d == 0]
    seen = 0
    while stack:
        v = stack.pop()
        seen += 1
        m = succ[v] & alive
        while m:
            w = (m & -m).bit_length() - 1
            indeg[w] -= 1
            if indeg[w] == 0:
                stack.append(w)
            m &= m - 1
    return seen == len(indeg)


def _cyclic_core(D: Digraph) -> set[int]:
    """Vertices left after repeatedly deleting sources and sinks."""
    alive = set(D.vertices)
    changed = True
    while changed:
        changed = False
        for v in sorted(alive):
            if not any(u in alive for u in D.in_neighbours(v)) or not any(w in alive for w in D.out_neighbours(v)):
                alive.discard(v)
                changed = True
    return alive


def feedback_number(D: Digraph, limit: int = TAU_LIMIT) -> int:
    """Minimum feedback vertex set size, by subset search in increasing size."""
    if D.n > limit:
        raise BudgetExceeded(f"feedback_number limited to n <= {limit}, got {D.n}")
    core = _cyclic_core(D)
    forced = {v for v in core if D.has_loop(v)}
    rest = sorted(core - forced)
    if not rest:
        return len(forced)
    index = {v: i for i, v in enumerate(rest)}
    succ = [0] * len(rest)
    for v in rest:
        for w in D.out_neighbours(v):
            if w in index:
                succ[index[v]] |= 1 << index[w]
    full = (1 << len(rest)) - 1
    for k in range(len(rest) + 1):
        for removed in combinations(range(len(rest)), k):
            mask = full
            for i in removed:
                mask &= ~(1 << i)
            if _acyclic_mask(succ, mask):
                return len(forced) + k
    raise AssertionError("unreachable: removing every vertex leaves an acyclic graph")


def closed_in_neighbourhood(D: Digraph, v: int) -> frozenset[int]:
    return frozenset(D.in_neighbours(v)) | {v}


def sigma_conflict_graph(D: Digraph) -> nx.Graph:
    """Simple graph on non-sources; adjacent iff closed in-neighbourhoods meet."""
    S = sources(D)
    cand = [v for v in D.vertices if v not in S]
    nbhd = {v: closed_in_neighbourhood(D, v) for v in cand}
    G = nx.Graph()
    G.add_nodes_from(cand)
    for u, v in combinations(cand, 2):
        if nbhd[u] & nbhd[v]:
            G.add_edge(u, v)
    return G


def sigma(D: Digraph, limit: int = SIGMA_LIMIT) -> int:
    """Largest set of non-sources with pairwise disjoint closed in-neighbourhoods.

    Computed as a maximum independent set of :func:`sigma_conflict_graph`,
    i.e. a maximum clique of its complement.
    """
    if not D.is_loopless():
        raise ValueError("sigma expects a loopless graph")
    if D.n > limit:
        raise BudgetExceeded(f"sigma limited to n <= {limit}, got {D.n}")
    G = sigma_conflict_graph(D)
    if G.number_of_nodes() == 0:
        return 0
    clique, _ = nx.max_weight_clique(nx.complement(G), weight=None)
    return len(clique)
