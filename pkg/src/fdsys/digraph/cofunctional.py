"""Co-functional graphs: out-cycles, fork/branch build plans, spanning subgraphs.

A graph is co-functional when every vertex has in-degree at most one.  A
weakly connected co-functional graph is then either an out-tree or a single
directed cycle with out-trees hanging from it.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field

import networkx as nx

from .algorithms import is_cofunctional, sources, to_networkx, weak_components
from .graph import Arc, Digraph


@dataclass(frozen=True)
class OutCycleShape:
    """A cycle ``A`` (or single vertex) with pendant leaves ``C`` hanging off ``B``.

    ``B[j]`` is the cycle vertex carrying the pendant ``C[j]``; ``B`` is listed
    in cycle order.
    """

    A: tuple[int, ...]
    B: tuple[int, ...] = ()
    C: tuple[int, ...] = ()

    @property
    def k(self) -> int:
        return len(self.A)

    @property
    def l(self) -> int:
        return len(self.B)

    @property
    def vertices(self) -> tuple[int, ...]:
        return self.A + self.C

    def arcs(self) -> set[Arc]:
        out: set[Arc] = set()
        if self.k >= 2:
            out |= {(self.A[i], self.A[(i + 1) % self.k]) for i in range(self.k)}
        out |= set(zip(self.B, self.C))
        return out

    def pendant_of(self) -> dict[int, int]:
        return dict(zip(self.B, self.C))

    def validate(self) -> None:
        if self.k < 1:
            raise ValueError("out-cycle needs at least one cycle vertex")
        if len(self.B) != len(self.C) or self.l > self.k:
            raise ValueError("B and C must pair up, with |B| <= |A|")
        if set(self.A) & set(self.C) or len(set(self.vertices)) != len(self.vertices):
            raise ValueError("A and C must be disjoint and duplicate-free")
        pos = {a: i for i, a in enumerate(self.A)}
        if any(b not in pos for b in self.B):
            raise ValueError("B must be a subset of A")
        if [pos[b] for b in self.B] != sorted(pos[b] for b in self.B):
            raise ValueError("B must be listed in cycle order")

    def to_digraph(self) -> tuple[Digraph, list[int]]:
        """The out-cycle as a standalone graph relabelled ``1..n`` (ascending labels)."""
        labels = sorted(self.vertices)
        index = {v: i + 1 for i, v in enumerate(labels)}
        return Digraph(len(labels), [(index[u], index[v]) for u, v in self.arcs()]), labels


@dataclass(frozen=True)
class Fork:
    anchor: int
    u: int
    v: int

    def arcs(self) -> list[Arc]:
        return [(self.anchor, self.u), (self.anchor, self.v)]


@dataclass(frozen=True)
class Branch:
    anchor: int
    u: int
    v: int

    def arcs(self) -> list[Arc]:
        return [(self.anchor, self.u), (self.u, self.v)]


@dataclass(frozen=True)
class BuildPlan:
    """An out-cycle base followed by fork/branch steps, in build order."""

    base: OutCycleShape
    steps: tuple[Fork | Branch, ...] = field(default=())

    @property
    def vertices(self) -> list[int]:
        vs = list(self.base.vertices)
        for st in self.steps:
            vs += [st.u, st.v]
        return vs

    def arcs(self) -> set[Arc]:
        out = self.base.arcs()
        for st in self.steps:
            out |= set(st.arcs())
        return out


def replay(plans: list[BuildPlan], n: int) -> Digraph:
    """Rebuild the graph on ``1..n`` described by one plan per component."""
    arcs: set[Arc] = set()
    for p in plans:
        arcs |= p.arcs()
    return Digraph(n, arcs)


def fork(D: Digraph, a: int) -> Digraph:
    """Append fresh vertices ``n+1`` and ``n+2`` as out-neighbours of ``a``."""
    if not 1 <= a <= D.n:
        raise ValueError(f"anchor {a} not in graph")
    u, v = D.n + 1, D.n + 2
    return Digraph(D.n + 2, set(D.arcs) | set(Fork(a, u, v).arcs()))


def branch(D: Digraph, a: int) -> Digraph:
    """Append the path ``a -> n+1 -> n+2``."""
    if not 1 <= a <= D.n:
        raise ValueError(f"anchor {a} not in graph")
    u, v = D.n + 1, D.n + 2
    return Digraph(D.n + 2, set(D.arcs) | set(Branch(a, u, v).arcs()))


# -- recognition and decomposition on vertex subsets -----------------------

class _Forest:
    """Mutable co-functional graph on an explicit vertex set (parent pointers)."""

    def __init__(self, vertices, arcs):
        self.vertices = set(vertices)
        self.parent: dict[int, int | None] = {v: None for v in self.vertices}
        self.children: dict[int, set[int]] = {v: set() for v in self.vertices}
        for u, v in arcs:
            if self.parent[v] is not None:
                raise ValueError("graph is not co-functional")
            self.parent[v] = u
            self.children[u].add(v)

    def remove(self, *vs: int) -> None:
        for v in vs:
            p = self.parent.pop(v)
            if p is not None and p in self.children:
                self.children[p].discard(v)
            for c in self.children.pop(v):
                self.parent[c] = None
            self.vertices.discard(v)

    def cycle(self) -> list[int] | None:
        """The unique cycle of a connected component, listed along its arcs."""
        start = min(self.vertices)
        seen: dict[int, int] = {}
        walk = []
        v: int | None = start
        while v is not None and v not in seen:
            seen[v] = len(walk)
            walk.append(v)
            v = self.parent[v]
        if v is None:
            return None
        back = walk[seen[v]:]
        back.reverse()
        return back

    def root(self) -> int:
        v = min(self.vertices)
        while self.parent[v] is not None:
            v = self.parent[v]
        return v


def _recognize(F: _Forest) -> OutCycleShape | None:
    cyc = F.cycle()
    if cyc is None:
        r = F.root()
        if len(F.vertices) == 1:
            return OutCycleShape((r,))
        if len(F.vertices) == 2:
            (c,) = F.children[r]
            return OutCycleShape((r,), (r,), (c,))
        return None
    i0 = cyc.index(min(cyc))
    A = tuple(cyc[i0:] + cyc[:i0])
    on_cycle = set(A)
    B, C = [], []
    for a in A:
        pend = F.children[a] - on_cycle
        if len(pend) > 1:
            return None
        for c in pend:
            if F.children[c]:
                return None
            B.append(a)
            C.append(c)
    if len(on_cycle) + len(C) != len(F.vertices):
        return None
    return OutCycleShape(A, tuple(B), tuple(C))


def recognize_out_cycle(D: Digraph) -> OutCycleShape | None:
    """Return the out-cycle decomposition of ``D``, or ``None`` if it is not one.

    ``D`` must be weakly connected and co-functional.  The cycle is listed
    starting from its smallest label.
    """
    if not is_cofunctional(D):
        raise ValueError("recognize_out_cycle expects a co-functional graph")
    if D.n == 0 or len(weak_components(D)) != 1:
        raise ValueError("recognize_out_cycle expects a weakly connected graph")
    return _recognize(_Forest(D.vertices, D.arcs))


def _decompose_component(F: _Forest) -> BuildPlan:
    peeled: list[Fork | Branch] = []
    while True:
        shape = _recognize(F)
        if shape is not None:
            break
        cyc = F.cycle()
        on_cycle = set(cyc) if cyc else set()
        leaves = {v for v in F.vertices if not F.children[v]}
        step: Fork | Branch | None = None
        for s in sorted(F.vertices):
            leaf_kids = sorted(F.children[s] & leaves)
            if len(leaf_kids) >= 2:
                step = Fork(s, leaf_kids[0], leaf_kids[1])
                break
        if step is None:
            for s in sorted(F.vertices):
                kids = F.children[s]
                if (s not in on_cycle and kids and kids <= leaves
                        and F.parent[s] is not None):
                    (v,) = kids
                    step = Branch(F.parent[s], s, v)
                    break
        if step is None:
            raise AssertionError("co-functional component admits no fork or branch peel")
        F.remove(step.v, step.u)
        peeled.append(step)
    peeled.reverse()
    return BuildPlan(shape, tuple(peeled))


def decompose_cofunctional(D: Digraph) -> list[BuildPlan]:
    """Write each weak component of ``D`` as an out-cycle plus fork/branch steps.

    Peeling rules, applied until the residue is an out-cycle: fork at the
    smallest vertex with two or more leaf out-neighbours (taking its two
    smallest leaves); otherwise branch off the smallest non-cycle vertex whose
    single out-neighbour is a leaf.
    """
    if not is_cofunctional(D):
        raise ValueError("decompose_cofunctional expects a co-functional graph")
    plans = []
    for comp in weak_components(D):
        cs = set(comp)
        arcs = [(u, v) for u, v in D.arcs if u in cs]
        plans.append(_decompose_component(_Forest(comp, arcs)))
    return plans


def _dfs_tree(D: Digraph, root: int, alive: set[int]) -> tuple[set[int], list[Arc]]:
    """Recursive-order DFS out-tree from ``root`` inside ``alive``."""
    visited = {root}
    tree: list[Arc] = []
    stack = [(root, iter(D.out_neighbours(root)))]
    while stack:
        u, it = stack[-1]
        for w in it:
            if w in alive and w not in visited:
                visited.add(w)
                tree.append((u, w))
                stack.append((w, iter(D.out_neighbours(w))))
                break
        else:
            stack.pop()
    return visited, tree


def initial_strong_components(D: Digraph) -> list[list[int]]:
    """Strong components with no arc entering from outside, ordered by smallest vertex."""
    G = to_networkx(D)
    cond = nx.condensation(G)
    comps = [sorted(cond.nodes[c]["members"]) for c in cond.nodes if cond.in_degree(c) == 0]
    return sorted(comps)


def cofunctional_spanning_subgraph(D: Digraph, seed: int = 0) -> Digraph:
    """A co-functional ``H`` with ``H <= D``.

    For each initial strong component (by smallest vertex) take a DFS out-tree
    from its smallest vertex over the not-yet-covered vertices, and close it
    with one arc into the root when the root is not a source of ``D``.  The
    closing arc comes from the root's in-neighbour ranked first by a
    permutation of ``1..n`` drawn from ``seed``.
    """
    if not D.is_loopless():
        raise ValueError("cofunctional_spanning_subgraph expects a loopless graph")
    order = list(D.vertices)
    random.Random(seed).shuffle(order)
    rank = {v: i for i, v in enumerate(order)}
    srcs = sources(D)
    alive = set(D.vertices)
    arcs: list[Arc] = []
    for comp in initial_strong_components(D):
        root = comp[0]
        covered, tree = _dfs_tree(D, root, alive)
        arcs += tree
        if root not in srcs:
            u = min(D.in_neighbours(root), key=rank.__getitem__)
            arcs.append((u, root))
        alive -= covered
    assert not alive, "every vertex is reachable from an initial strong component"
    return Digraph(D.n, arcs)
