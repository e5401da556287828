"""The :class:`Digraph` value type, its text format and standard generators.

Vertices are labelled ``1..n``.  Loops are allowed.  Graphs are immutable;
every operation that changes the arc set returns a new graph.
"""
from __future__ import annotations

import hashlib
from itertools import product
from typing import Iterable, Iterator

from ..errors import BudgetExceeded, GraphFormatError

Arc = tuple[int, int]


class Digraph:
    """A directed graph on ``{1, ..., n}`` with in-neighbourhood lists kept sorted."""

    __slots__ = ("n", "arcs", "_in", "_out")

    def __init__(self, n: int, arcs: Iterable[Arc] = ()):
        if n < 0:
            raise ValueError("vertex count must be non-negative")
        arc_list = [(int(u), int(v)) for u, v in arcs]
        arc_set = frozenset(arc_list)
        if len(arc_set) != len(arc_list):
            raise ValueError("duplicate arcs")
        for u, v in arc_set:
            if not (1 <= u <= n and 1 <= v <= n):
                raise ValueError(f"arc ({u}, {v}) has an endpoint outside 1..{n}")
        ins: list[list[int]] = [[] for _ in range(n + 1)]
        outs: list[list[int]] = [[] for _ in range(n + 1)]
        for u, v in arc_set:
            ins[v].append(u)
            outs[u].append(v)
        self.n = n
        self.arcs = arc_set
        self._in = tuple(tuple(sorted(x)) for x in ins)
        self._out = tuple(tuple(sorted(x)) for x in outs)

    # -- basic queries -----------------------------------------------------
    @property
    def vertices(self) -> range:
        return range(1, self.n + 1)

    def in_neighbours(self, v: int) -> tuple[int, ...]:
        return self._in[v]

    def out_neighbours(self, v: int) -> tuple[int, ...]:
        return self._out[v]

    def in_degree(self, v: int) -> int:
        return len(self._in[v])

    def out_degree(self, v: int) -> int:
        return len(self._out[v])

    def max_in_degree(self) -> int:
        return max((len(self._in[v]) for v in self.vertices), default=0)

    def has_arc(self, u: int, v: int) -> bool:
        return (u, v) in self.arcs

    def has_loop(self, v: int) -> bool:
        return (v, v) in self.arcs

    def is_loopless(self) -> bool:
        return all(u != v for u, v in self.arcs)

    def is_loopfull(self) -> bool:
        return all((v, v) in self.arcs for v in self.vertices)

    def sorted_arcs(self) -> list[Arc]:
        return sorted(self.arcs)

    # -- value semantics ---------------------------------------------------
    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Digraph):
            return NotImplemented
        return self.n == other.n and self.arcs == other.arcs

    def __hash__(self) -> int:
        return hash((self.n, self.arcs))

    def __repr__(self) -> str:
        return f"Digraph({self.n}, {self.sorted_arcs()})"

    # -- derived graphs ----------------------------------------------------
    def induced(self, keep: Iterable[int]) -> tuple[Digraph, list[int]]:
        """Induced subgraph on ``keep``, relabelled ``1..k`` in ascending order.

        Returns the graph and the list mapping new label ``i`` to
        ``labels[i - 1]`` in the original graph.
        """
        labels = sorted(set(keep))
        index = {v: i + 1 for i, v in enumerate(labels)}
        arcs = [(index[u], index[v]) for u, v in self.arcs if u in index and v in index]
        return Digraph(len(labels), arcs), labels

    def relabel(self, mapping: dict[int, int]) -> Digraph:
        """Apply a permutation ``old -> new`` of ``1..n``."""
        return Digraph(self.n, [(mapping[u], mapping[v]) for u, v in self.arcs])

    def without_arcs(self, drop: Iterable[Arc]) -> Digraph:
        return Digraph(self.n, self.arcs - set(drop))

    def digest(self) -> str:
        """Short stable hash of the canonical text form."""
        return hashlib.sha256(to_text(self).encode()).hexdigest()[:16]


# -- text format -----------------------------------------------------------

def parse_text(text: str) -> Digraph:
    """Parse the ``n <count>`` / ``u v`` graph format.

    Lines starting with ``#`` are comments and blank lines are skipped.
    Duplicate arcs are an error.
    """
    n = None
    arcs: list[Arc] = []
    seen: set[Arc] = set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(" ")
        if n is None:
            if len(parts) != 2 or parts[0] != "n" or not parts[1].isdigit():
                raise GraphFormatError(f"line {lineno}: expected 'n <count>', got {raw!r}")
            n = int(parts[1])
            continue
        if len(parts) != 2 or not (parts[0].isdigit() and parts[1].isdigit()):
            raise GraphFormatError(f"line {lineno}: expected 'u v', got {raw!r}")
        arc = (int(parts[0]), int(parts[1]))
        if not (1 <= arc[0] <= n and 1 <= arc[1] <= n):
            raise GraphFormatError(f"line {lineno}: vertex out of range 1..{n}")
        if arc in seen:
            raise GraphFormatError(f"line {lineno}: duplicate arc {arc}")
        seen.add(arc)
        arcs.append(arc)
    if n is None:
        raise GraphFormatError("missing 'n <count>' header")
    return Digraph(n, arcs)


def to_text(D: Digraph) -> str:
    lines = [f"n {D.n}"] + [f"{u} {v}" for u, v in D.sorted_arcs()]
    return "\n".join(lines) + "\n"


def read_graph(path) -> Digraph:
    with open(path, encoding="ascii") as fh:
        return parse_text(fh.read())


def write_graph(D: Digraph, path) -> None:
    with open(path, "w", encoding="ascii") as fh:
        fh.write(to_text(D))


# -- generators ------------------------------------------------------------

def empty_graph(n: int) -> Digraph:
    return Digraph(n)


def cycle_graph(n: int) -> Digraph:
    """The directed cycle 1 -> 2 -> ... -> n -> 1 (a loop when n = 1)."""
    return Digraph(n, [(v, v % n + 1) for v in range(1, n + 1)])


def path_graph(n: int) -> Digraph:
    return Digraph(n, [(v, v + 1) for v in range(1, n)])


def complete_graph(n: int, loops: bool = False) -> Digraph:
    return Digraph(n, [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if loops or u != v])


def out_star(n: int) -> Digraph:
    return Digraph(n, [(1, v) for v in range(2, n + 1)])


def complete_bipartite(m: int) -> Digraph:
    """K_{m,m} as edges: L = 1..m, R = m+1..2m, arcs both ways between sides."""
    arcs = []
    for i in range(1, m + 1):
        for j in range(m + 1, 2 * m + 1):
            arcs += [(i, j), (j, i)]
    return Digraph(2 * m, arcs)


def disjoint_union(*graphs: Digraph) -> Digraph:
    arcs: list[Arc] = []
    offset = 0
    for G in graphs:
        arcs += [(u + offset, v + offset) for u, v in G.arcs]
        offset += G.n
    return Digraph(offset, arcs)


def random_digraph(n: int, p: float, rng, loops: bool = False) -> Digraph:
    """Erdos-Renyi style digraph; ``rng`` is a :class:`random.Random`."""
    arcs = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1)
            if (loops or u != v) and rng.random() < p]
    return Digraph(n, arcs)


EXHAUSTIVE_MAX_N = 4


def generate_small_digraphs(n: int, loopless: bool = True) -> Iterator[Digraph]:
    """Every digraph on ``n`` vertices, in the order of the arc bitmask.

    Yields ``2^(n(n-1))`` graphs when ``loopless`` and ``2^(n^2)`` otherwise.
    """
    if n > EXHAUSTIVE_MAX_N:
        raise BudgetExceeded(f"exhaustive digraph generation is limited to n <= {EXHAUSTIVE_MAX_N}")
    slots = [(u, v) for u in range(1, n + 1) for v in range(1, n + 1) if not loopless or u != v]
    for bits in product((0, 1), repeat=len(slots)):
        yield Digraph(n, [a for a, b in zip(slots, reversed(bits)) if b])
