"""Recognition of near-bicliques."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

from ..errors import BudgetExceeded
from .algorithms import closed_in_neighbourhood, sources
from .graph import Digraph

NEAR_BICLIQUE_LIMIT = 24


@dataclass(frozen=True)
class NearBicliqueWitness:
    A: frozenset[int]
    B: frozenset[int]
    S: frozenset[int]


def check_near_biclique(D: Digraph, A, B) -> bool:
    """Check the four near-biclique properties for the partition ``(A, B, sources)``."""
    A, B, S = frozenset(A), frozenset(B), sources(D)
    if A & B or A & S or B & S or (A | B | S) != frozenset(D.vertices):
        return False
    for side in (A, B):
        for x, y in combinations(sorted(side), 2):
            if not (D.has_arc(x, y) or D.has_arc(y, x)):
                return False
    rest = sorted(A | B)
    for x, y in combinations(rest, 2):
        if not closed_in_neighbourhood(D, x) & closed_in_neighbourhood(D, y):
            return False
    for a in A:
        for b in B:
            if not set(D.in_neighbours(a)) & set(D.in_neighbours(b)):
                return False
    return True


def is_near_biclique(D: Digraph, limit: int = NEAR_BICLIQUE_LIMIT) -> NearBicliqueWitness | None:
    """Find ``(A, B, S)`` making ``D`` a non-empty near-biclique, or return ``None``.

    Independent pairs of non-sources must land on opposite sides, and pairs
    with no common in-neighbour must land on the same side.  Both are parity
    constraints, so the search is a 2-colouring with parities; each
    constraint component puts its smallest vertex in ``A``.
    """
    if not D.is_loopless():
        raise ValueError("is_near_biclique expects a loopless graph")
    if D.n > limit:
        raise BudgetExceeded(f"is_near_biclique limited to n <= {limit}, got {D.n}")
    if not D.arcs:
        return None
    S = sources(D)
    rest = [v for v in D.vertices if v not in S]
    for x, y in combinations(rest, 2):
        if not closed_in_neighbourhood(D, x) & closed_in_neighbourhood(D, y):
            return None
    # parity 1: opposite sides; parity 0: same side
    cons: dict[int, list[tuple[int, int]]] = {v: [] for v in rest}
    for x, y in combinations(rest, 2):
        if not (D.has_arc(x, y) or D.has_arc(y, x)):
            cons[x].append((y, 1))
            cons[y].append((x, 1))
        elif not set(D.in_neighbours(x)) & set(D.in_neighbours(y)):
            cons[x].append((y, 0))
            cons[y].append((x, 0))
    colour: dict[int, int] = {}
    for start in rest:
        if start in colour:
            continue
        colour[start] = 0
        stack = [start]
        while stack:
            x = stack.pop()
            for y, par in cons[x]:
                want = colour[x] ^ par
                if y not in colour:
                    colour[y] = want
                    stack.append(y)
                elif colour[y] != want:
                    return None
    A = frozenset(v for v in rest if colour[v] == 0)
    B = frozenset(v for v in rest if colour[v] == 1)
    assert check_near_biclique(D, A, B)
    return NearBicliqueWitness(A, B, S)
