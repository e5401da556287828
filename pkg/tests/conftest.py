from __future__ import annotations

from hypothesis import strategies as st

from fdsys.digraph import Digraph


@st.composite
def digraphs(draw, min_n: int = 1, max_n: int = 6, loops: bool = False, cofunctional: bool = False):
    n = draw(st.integers(min_n, max_n))
    pairs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if loops or u != v]
    if cofunctional:
        arcs = []
        for v in range(1, n + 1):
            u = draw(st.integers(0, n))
            if u and u != v:
                arcs.append((u, v))
        return Digraph(n, arcs)
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Digraph(n, [a for a, keep in zip(pairs, mask) if keep])
