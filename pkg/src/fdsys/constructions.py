"""Explicit FDS constructions with machine-checkable (in)stability guarantees.

Each public builder returns a :class:`ConstructionCertificate`; calling
:meth:`ConstructionCertificate.check` recomputes the interaction graph and the
brute-force (in)stability and compares them with the claims.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from .digraph import (
    Branch,
    Digraph,
    Fork,
    NearBicliqueWitness,
    OutCycleShape,
    add_loops,
    check_near_biclique,
    cofunctional_spanning_subgraph,
    complete_bipartite,
    complete_graph,
    decompose_cofunctional,
    sigma,
    sources,
    subgraph_leq,
    weak_components,
)
from .digraph.cofunctional import BuildPlan
from .fds import Fds, LocalFunction, instability, interaction_graph, stability

log = logging.getLogger(__name__)

PHI, PSI = "phi", "psi"


@dataclass(frozen=True)
class Claim:
    kind: str  # "s" or "i"
    direction: str  # ">=" or "="
    value: Fraction

    def holds(self, measured: int) -> bool:
        return measured >= self.value if self.direction == ">=" else measured == self.value

    def __str__(self) -> str:
        return f"{self.kind}(f) {self.direction} {self.value}"


@dataclass(frozen=True)
class ConstructionCertificate:
    fds: Fds
    claimed_graph: Digraph
    claims: tuple[Claim, ...]
    notes: dict = field(default_factory=dict, compare=False)

    @property
    def claimed_bound(self) -> Claim:
        return self.claims[0]

    def check(self) -> dict:
        """Brute-force verification of the graph and every claim."""
        graph_ok = interaction_graph(self.fds) == self.claimed_graph
        rows = []
        for c in self.claims:
            measured = stability(self.fds)[0] if c.kind == "s" else instability(self.fds)[0]
            rows.append({"claim": str(c), "measured": measured, "ok": c.holds(measured)})
        return {"graph_ok": graph_ok, "claims": rows, "ok": graph_ok and all(r["ok"] for r in rows)}

    def to_dict(self) -> dict:
        return {"fds": self.fds.to_dict(), "claimed_graph": sorted(map(list, self.claimed_graph.arcs)),
                "claims": [{"kind": c.kind, "direction": c.direction, "value": str(c.value)} for c in self.claims],
                "notes": self.notes}


def _claim(kind: str, direction: str, value) -> Claim:
    return Claim(kind, direction, Fraction(value))


def _fds(q: int, n: int, locs: dict[int, LocalFunction]) -> Fds:
    return Fds(q, [locs[v] for v in range(1, n + 1)])


# -- monotone locals -------------------------------------------------------

def phi_local(v: int, nbhd: Iterable[int]) -> LocalFunction:
    """``x_v or AND_{u in nbhd} x_u``: wrong only at ``x_v = 0`` with all neighbours 1."""
    nb = sorted(set(nbhd) - {v})
    if not nb:
        raise ValueError("phi needs a non-empty neighbourhood")
    return LocalFunction.from_callable(2, nb + [v], lambda x: x[v] | all(x[u] for u in nb))


def psi_local(v: int, nbhd: Iterable[int]) -> LocalFunction:
    """``x_v and OR_{u in nbhd} x_u``: wrong only at ``x_v = 1`` with all neighbours 0."""
    nb = sorted(set(nbhd) - {v})
    if not nb:
        raise ValueError("psi needs a non-empty neighbourhood")
    return LocalFunction.from_callable(2, nb + [v], lambda x: x[v] & any(x[u] for u in nb))


def _typed_local(kind: str | None, v: int, D: Digraph) -> LocalFunction:
    if kind is None:
        return LocalFunction.identity(2, v)
    return (phi_local if kind == PHI else psi_local)(v, D.in_neighbours(v))


# -- complete graphs and alphabet doubling ---------------------------------

def complete_graph_fn(n: int, q: int) -> ConstructionCertificate:
    """``f_v(x) = v - sum_{u != v} x_u (mod q)`` on ``K_n``."""
    if n < 2 or q < 2:
        raise ValueError("need n >= 2 and q >= 2")
    locs = {}
    for v in range(1, n + 1):
        others = [u for u in range(1, n + 1) if u != v]
        locs[v] = LocalFunction.from_callable(q, others, lambda x, v=v: v - sum(x.values()))
    return ConstructionCertificate(
        _fds(q, n, locs), complete_graph(n),
        (_claim("s", "=", n // q), _claim("i", "=", n - -(-n // q))))


def double_alphabet(f: Fds, D: Digraph) -> Fds:
    """Lift ``f`` over ``[q]`` with ``G(f) <= D`` to ``g`` over ``[2q]`` with ``G(g) = D``.

    A symbol ``y`` of ``[2q]`` is read as ``(y mod q, y // q)``; the first
    component follows ``f`` and the second is the AND of the in-neighbours'
    second components (1 at sources).
    """
    if not D.is_loopless():
        raise ValueError("double_alphabet expects a loopless graph")
    if not interaction_graph(f).arcs <= D.arcs:
        raise ValueError("G(f) must be contained in D")
    q = f.q
    locs = {}
    for v in D.vertices:
        fv = f.local(v)
        nb = D.in_neighbours(v)

        def g(x, fv=fv, nb=nb):
            low = [0] * f.n
            for u in nb:
                low[u - 1] = x[u] % q
            high = all(x[u] // q for u in nb)
            return fv(low) + q * high

        locs[v] = LocalFunction.from_callable(2 * q, nb, g)
    return _fds(2 * q, D.n, locs)


# -- loop-full graphs, large alphabets -------------------------------------

def loopfull_stability_fn(D: Digraph, q: int) -> ConstructionCertificate:
    """``f_v = x_v + 1{x_N(v) = (r_v - 1, ..., r_v - 1)}`` on ``D°``, sources fixed.

    ``r_v`` ranks the non-sources ``1..n-|S|`` in label order, so distinct
    wrong vertices cannot share an in-neighbour and ``s(f) = n - sigma(D)``.
    """
    if not D.is_loopless():
        raise ValueError("loopfull_stability_fn expects a loopless graph")
    S = sources(D)
    free = [v for v in D.vertices if v not in S]
    if q < len(free):
        raise ValueError(f"need q >= n - |S| = {len(free)}")
    rank = {v: i for i, v in enumerate(free)}
    Dl = add_loops(D)
    locs = {}
    for v in D.vertices:
        if v in S:
            locs[v] = LocalFunction.identity(q, v)
            continue
        c = rank[v]
        locs[v] = LocalFunction.from_callable(
            q, Dl.in_neighbours(v), lambda x, v=v, c=c: x[v] + all(val == c for val in x.values()))
    return ConstructionCertificate(_fds(q, D.n, locs), Dl, (_claim("s", "=", D.n - sigma(D)),))


def loopfull_instability_fn(D: Digraph, q: int) -> ConstructionCertificate:
    """``f_v = x_v + 1 + 1{x_N(v) = 0}`` (sources: ``x_v + 1``); every vertex always moves."""
    if not D.is_loopless():
        raise ValueError("loopfull_instability_fn expects a loopless graph")
    if q < 3:
        raise ValueError("need q >= 3")
    S = sources(D)
    Dl = add_loops(D)
    locs = {}
    for v in D.vertices:
        if v in S:
            locs[v] = LocalFunction.from_callable(q, (v,), lambda x, v=v: x[v] + 1)
        else:
            locs[v] = LocalFunction.from_callable(
                q, Dl.in_neighbours(v), lambda x, v=v: x[v] + 1 + all(val == 0 for val in x.values()))
    return ConstructionCertificate(_fds(q, D.n, locs), Dl, (_claim("i", "=", D.n),))


def degree_family(t: int, delta: int, q: int) -> ConstructionCertificate:
    """Graph on ``n = t q^delta`` vertices whose arcs all leave ``A = {1..delta}``.

    Vertex ``c_{i,j}`` (label ``(i-1) q^delta + j``) flips exactly when
    ``x_A`` equals the ``j``-th pattern in rank order, so every state has
    exactly ``t`` wrong guesses.  With ``delta = 1`` and ``q = 2`` the local
    at vertex 1 is constant, so the certified graph lacks that one loop.
    """
    if t < 1 or delta < 1 or q < 2:
        raise ValueError("need t >= 1, delta >= 1, q >= 2")
    block = q**delta
    n = t * block
    A = list(range(1, delta + 1))
    D = Digraph(n, [(a, v) for a in A for v in range(1, n + 1) if v != a])
    Dl = add_loops(D)
    locs = {}
    for v in range(1, n + 1):
        j = (v - 1) % block
        target = [(j // q**i) % q for i in range(delta)]
        locs[v] = LocalFunction.from_callable(
            q, Dl.in_neighbours(v), lambda x, v=v, target=target: x[v] + ([x[a] for a in A] == target))
    claimed = Dl
    if delta == 1 and q == 2:
        claimed = Dl.without_arcs([(1, 1)])
    return ConstructionCertificate(_fds(q, n, locs), claimed, (_claim("s", "=", n - t),),
                                   {"graph": sorted(map(list, D.arcs)), "t": t, "delta": delta})


def degree_bound_holds(D_loopfull: Digraph, q: int, s: int) -> bool:
    """``q^maxindeg(D°) >= n / (n - s)`` (vacuous when ``s = n``)."""
    n = D_loopfull.n
    if s >= n:
        return True
    return Fraction(q ** D_loopfull.max_in_degree()) >= Fraction(n, n - s)


# -- Boolean lower bound pipeline ------------------------------------------

def _outcycle_locals(shape: OutCycleShape) -> dict[int, LocalFunction]:
    shape.validate()
    A, pend = shape.A, shape.pendant_of()
    locs: dict[int, LocalFunction] = {}
    if shape.k == 1:
        a = A[0]
        locs[a] = LocalFunction.identity(2, a)
    else:
        for i, a in enumerate(A):
            prev = A[i - 1]
            if prev in pend:
                locs[a] = LocalFunction.from_callable(2, (prev, a), lambda x, a=a, p=prev: x[a] | (1 - x[p]))
            else:
                locs[a] = LocalFunction.from_callable(2, (prev, a), lambda x, a=a, p=prev: x[a] | x[p])
    for b, c in pend.items():
        locs[c] = LocalFunction.from_callable(2, (b, c), lambda x, b=b, c=c: x[c] & (1 - x[b]))
    return locs


def _shape_graph(shape: OutCycleShape) -> Digraph:
    n = len(shape.vertices)
    if sorted(shape.vertices) != list(range(1, n + 1)):
        raise ValueError("shape vertices must be exactly 1..n")
    return Digraph(n, shape.arcs())


def outcycle_boolean_fn(shape: OutCycleShape) -> ConstructionCertificate:
    """Out-cycle function whose wrong set is always independent in a Hamiltonian cycle.

    Cycle vertices follow ``x_a or x_prev`` (``x_a or not x_prev`` after a
    vertex with a pendant), pendants follow ``x_c and not x_parent``.
    """
    D = _shape_graph(shape)
    f = _fds(2, D.n, _outcycle_locals(shape))
    return ConstructionCertificate(f, add_loops(D), (_claim("s", ">=", Fraction(D.n, 2)),))


def _fork_locals(a: int, u: int, v: int) -> dict[int, LocalFunction]:
    return {u: psi_local(u, (a,)), v: phi_local(v, (a,))}


def _branch_locals(a: int, u: int, v: int) -> dict[int, LocalFunction]:
    return {u: psi_local(u, (a,)), v: psi_local(v, (u,))}


def _check_on(f: Fds, H: Digraph) -> None:
    if f.q != 2:
        raise ValueError("lifts are Boolean")
    if f.n != H.n or interaction_graph(f) != add_loops(H):
        raise ValueError("f must have interaction graph exactly H°")


def lift_fork(f: Fds, H: Digraph, a: int) -> Fds:
    """Extend ``f`` on ``H°`` to the fork at ``a``: ``g_u = x_u and x_a``, ``g_v = x_v or x_a``."""
    if not 1 <= a <= H.n:
        raise ValueError(f"anchor {a} not in graph")
    _check_on(f, H)
    return Fds(2, list(f.locals) + [v for _, v in sorted(_fork_locals(a, H.n + 1, H.n + 2).items())])


def lift_branch(f: Fds, H: Digraph, a: int) -> Fds:
    """Extend ``f`` on ``H°`` to the branch at ``a``: ``g_u = x_u and x_a``, ``g_v = x_v and x_u``."""
    if not 1 <= a <= H.n:
        raise ValueError(f"anchor {a} not in graph")
    _check_on(f, H)
    return Fds(2, list(f.locals) + [v for _, v in sorted(_branch_locals(a, H.n + 1, H.n + 2).items())])


def lift_supergraph(f: Fds, H: Digraph, D: Digraph) -> Fds:
    """Move ``f`` from ``H°`` to ``D°`` without enlarging any wrong set.

    Sources keep their state; a non-source ``u`` flips only when ``f_u``
    flips and every new in-neighbour reads 1.
    """
    if not subgraph_leq(H, D):
        raise ValueError("H must satisfy H <= D")
    _check_on(f, H)
    Hl, Dl = add_loops(H), add_loops(D)
    S = sources(D)
    locs = {}
    for v in D.vertices:
        if v in S:
            locs[v] = LocalFunction.identity(2, v)
            continue
        fv = f.local(v)
        extra = [a for a in Dl.in_neighbours(v) if a not in Hl.in_neighbours(v)]
        if not extra:
            locs[v] = fv
            continue

        def g(x, v=v, fv=fv, extra=extra):
            full = [0] * D.n
            for u, val in x.items():
                full[u - 1] = val
            flip = fv(full) ^ x[v]
            return x[v] ^ (flip & all(x[a] for a in extra))

        locs[v] = LocalFunction.from_callable(2, Dl.in_neighbours(v), g)
    return _fds(2, D.n, locs)


def _plan_locals(plan: BuildPlan) -> dict[int, LocalFunction]:
    locs = _outcycle_locals(plan.base)
    for st in plan.steps:
        locs.update((_fork_locals if isinstance(st, Fork) else _branch_locals)(st.anchor, st.u, st.v))
    return locs


def halfn_stable_fn(D: Digraph, seed: int = 0) -> ConstructionCertificate:
    """``f`` with ``G(f) = D°`` and ``s(f) >= n/2`` for any loopless ``D``.

    Pipeline: co-functional ``H <= D``, fork/branch plan per component of
    ``H``, out-cycle base function, lifts along the plan, then the lift from
    ``H°`` to ``D°``.
    """
    if not D.is_loopless():
        raise ValueError("halfn_stable_fn expects a loopless graph")
    H = cofunctional_spanning_subgraph(D, seed)
    locs: dict[int, LocalFunction] = {}
    for plan in decompose_cofunctional(H):
        locs.update(_plan_locals(plan))
    f = lift_supergraph(_fds(2, D.n, locs), H, D)
    return ConstructionCertificate(f, add_loops(D), (_claim("s", ">=", Fraction(D.n, 2)),),
                                   {"H": sorted(map(list, H.arcs))})


# -- monotone pipeline -----------------------------------------------------

def _monotone_outcycle_types(shape: OutCycleShape) -> dict[int, str | None]:
    shape.validate()
    pend = shape.pendant_of()
    if shape.k == 1:
        types: dict[int, str | None] = {shape.A[0]: None}
        types.update({c: PHI for c in shape.C})
        return types
    if shape.l == 0:
        return {a: PHI for a in shape.A}
    start = shape.A.index(shape.B[0])
    A = shape.A[start:] + shape.A[:start]
    types = {A[0]: PHI}
    other = {PHI: PSI, PSI: PHI}
    for i, a in enumerate(A):
        if a in pend:
            types[pend[a]] = types[a]
            if i + 1 < len(A):
                types[A[i + 1]] = other[types[a]]
        elif i + 1 < len(A):
            types[A[i + 1]] = types[a]
    return types


def monotone_outcycle_fn(shape: OutCycleShape) -> ConstructionCertificate:
    """Monotone out-cycle function from phi/psi locals; ``s(f) >= floor(n/2)``.

    A pure cycle uses phi everywhere (stability ``ceil(n/2)``).  Otherwise the
    cycle is read from its first pendant-carrying vertex, which gets phi;
    a pendant copies its parent's type, the successor of a pendant-carrying
    vertex takes the opposite type, and other successors copy their
    predecessor.
    """
    D = _shape_graph(shape)
    types = _monotone_outcycle_types(shape)
    f = _fds(2, D.n, {v: _typed_local(types[v], v, D) for v in D.vertices})
    bound = -(-D.n // 2) if shape.l == 0 and shape.k >= 2 else D.n // 2
    return ConstructionCertificate(f, add_loops(D), (_claim("s", ">=", bound),), {"types": types})


def monotone_halfn_fn(D: Digraph, seed: int = 0) -> ConstructionCertificate:
    """Monotone ``f`` with ``G(f) = D°`` built like :func:`halfn_stable_fn`.

    The certified bound is the sum of ``floor(n_i/2)`` over the weak
    components of ``D``; whether ``floor(n/2)`` is also met is recorded in
    ``notes`` and logged when it is not.
    """
    if not D.is_loopless():
        raise ValueError("monotone_halfn_fn expects a loopless graph")
    H = cofunctional_spanning_subgraph(D, seed)
    types: dict[int, str | None] = {}
    for plan in decompose_cofunctional(H):
        types.update(_monotone_outcycle_types(plan.base))
        for st in plan.steps:
            if isinstance(st, Fork):
                types[st.u], types[st.v] = PSI, PHI
            else:
                types[st.u], types[st.v] = PSI, PSI
    S = sources(D)
    f = _fds(2, D.n, {v: _typed_local(None if v in S else types[v], v, D) for v in D.vertices})
    comp_bound = sum(len(c) // 2 for c in weak_components(D))
    s = stability(f)[0]
    notes = {"H": sorted(map(list, H.arcs)), "types": {v: types[v] for v in D.vertices if v not in S},
             "floor_half_n": D.n // 2, "component_bound": comp_bound,
             "floor_half_n_met": s >= D.n // 2}
    if s < D.n // 2:
        log.info("monotone pipeline below floor(n/2): n=%d s=%d arcs=%s", D.n, s, sorted(D.arcs))
    return ConstructionCertificate(f, add_loops(D), (_claim("s", ">=", comp_bound),), notes)


# -- bicliques -------------------------------------------------------------

def kmm_stability_fn(m: int) -> ConstructionCertificate:
    """Stability ``2m - 1`` on ``K_{m,m}°`` (``L = 1..m``, ``R = m+1..2m``, ``r_i = m + i``)."""
    if m < 1:
        raise ValueError("need m >= 1")
    D = complete_bipartite(m)
    L = list(range(1, m + 1))
    R = list(range(m + 1, 2 * m + 1))
    locs = {}
    for i in range(m):
        li, ri = L[i], R[i]
        locs[li] = LocalFunction.from_callable(
            2, [li] + R,
            lambda x, li=li, ri=ri: x[li] ^ (x[li] == 1 and x[ri] == 1 and all(x[r] == 0 for r in R if r != ri)))
        locs[ri] = LocalFunction.from_callable(
            2, L + [ri],
            lambda x, li=li, ri=ri: x[ri] ^ (x[ri] == 1 and x[li] == 0 and all(x[l] == 1 for l in L if l != li)))
    return ConstructionCertificate(_fds(2, 2 * m, locs), add_loops(D), (_claim("s", "=", 2 * m - 1),))


def near_biclique_fn(D: Digraph, witness: NearBicliqueWitness) -> ConstructionCertificate:
    """phi on ``A``, psi on ``B``, identity on sources: stability ``n - 1``."""
    if witness.S != sources(D) or not check_near_biclique(D, witness.A, witness.B):
        raise ValueError("invalid near-biclique witness")
    types = {v: PHI if v in witness.A else PSI if v in witness.B else None for v in D.vertices}
    f = _fds(2, D.n, {v: _typed_local(types[v], v, D) for v in D.vertices})
    return ConstructionCertificate(f, add_loops(D), (_claim("s", "=", D.n - 1),))


def bm_graph(m: int) -> Digraph:
    """Cycle ``1 -> 2 -> ... -> 2m -> 1`` plus the pendant arc ``1 -> 2m+1``."""
    if m < 1:
        raise ValueError("need m >= 1")
    n = 2 * m + 1
    return Digraph(n, [(i, i + 1) for i in range(1, 2 * m)] + [(2 * m, 1), (1, n)])
