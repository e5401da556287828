"""Finite dynamical systems ``f : [q]^n -> [q]^n`` stored as per-vertex truth tables.

A local function keeps an ordered support (ascending vertex labels) and a
table indexed by the base-``q`` rank of the support assignment, first
support vertex least significant.  States use the same convention:
``rank(x) = sum(x_v * q^(v-1))``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from functools import cached_property, lru_cache
from itertools import product
from typing import Callable, Iterable, Sequence

import numpy as np

from .digraph import Digraph
from .errors import BudgetExceeded

STATE_BUDGET = 2**26


def check_state_budget(n: int, q: int, budget: int | None = None) -> None:
    budget = STATE_BUDGET if budget is None else budget
    if q**n > budget:
        raise BudgetExceeded(f"q^n = {q}^{n} exceeds the state budget {budget}")


@lru_cache(maxsize=64)
def all_states(n: int, q: int) -> np.ndarray:
    """Array of shape ``(q^n, n)``; row ``r`` holds the coordinates of rank ``r``."""
    ranks = np.arange(q**n, dtype=np.int64)
    cols = [(ranks // q**i) % q for i in range(n)]
    out = np.stack(cols, axis=1) if n else np.zeros((1, 0), dtype=np.int64)
    out.setflags(write=False)
    return out


def assignments(q: int, d: int) -> Iterable[tuple[int, ...]]:
    """All of ``[q]^d`` in rank order (first position least significant)."""
    for t in product(range(q), repeat=d):
        yield t[::-1]


@dataclass(frozen=True)
class StateVector:
    q: int
    coords: tuple[int, ...]

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("alphabet size must be at least 2")
        if any(not 0 <= c < self.q for c in self.coords):
            raise ValueError(f"coordinates must lie in [0, {self.q})")

    @classmethod
    def from_rank(cls, q: int, n: int, rank: int) -> StateVector:
        if not 0 <= rank < q**n:
            raise ValueError("rank out of range")
        return cls(q, tuple((rank // q**i) % q for i in range(n)))

    @property
    def n(self) -> int:
        return len(self.coords)

    @property
    def rank(self) -> int:
        return sum(c * self.q**i for i, c in enumerate(self.coords))

    def __getitem__(self, v: int) -> int:
        """Coordinate of vertex ``v`` (1-based)."""
        return self.coords[v - 1]

    def __len__(self) -> int:
        return len(self.coords)

    def __str__(self) -> str:
        sep = "" if self.q <= 10 else ","
        return sep.join(map(str, self.coords))


@dataclass(frozen=True)
class LocalFunction:
    q: int
    support: tuple[int, ...]
    table: tuple[int, ...]

    def __post_init__(self):
        if list(self.support) != sorted(set(self.support)):
            raise ValueError("support must be strictly ascending")
        if len(self.table) != self.q ** len(self.support):
            raise ValueError(f"table length {len(self.table)} != q^|support| = {self.q ** len(self.support)}")
        if any(not 0 <= t < self.q for t in self.table):
            raise ValueError("table entries must lie in [q]")

    @classmethod
    def from_callable(cls, q: int, support: Iterable[int], fn: Callable[[dict[int, int]], int]) -> LocalFunction:
        """Tabulate ``fn`` which receives ``{vertex: value}`` for the support."""
        sup = tuple(sorted(support))
        table = tuple(int(fn(dict(zip(sup, a)))) % q for a in assignments(q, len(sup)))
        return cls(q, sup, table)

    @classmethod
    def constant(cls, q: int, value: int) -> LocalFunction:
        return cls(q, (), (value % q,))

    @classmethod
    def identity(cls, q: int, v: int) -> LocalFunction:
        return cls(q, (v,), tuple(range(q)))

    def index(self, x: Sequence[int] | StateVector) -> int:
        """Rank of the support restriction of a full state (1-based vertices)."""
        coords = x.coords if isinstance(x, StateVector) else x
        return sum(coords[u - 1] * self.q**i for i, u in enumerate(self.support))

    def __call__(self, x: Sequence[int] | StateVector) -> int:
        return self.table[self.index(x)]

    @cached_property
    def array(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)

    def essential_inputs(self) -> tuple[int, ...]:
        d = len(self.support)
        if d == 0:
            return ()
        cube = self.array.reshape((self.q,) * d, order="F")
        return tuple(u for i, u in enumerate(self.support)
                     if np.any(cube.max(axis=i) != cube.min(axis=i)))

    def assignment(self, idx: int) -> dict[int, int]:
        return {u: (idx // self.q**i) % self.q for i, u in enumerate(self.support)}


class Fds:
    """An FDS as ``n`` local functions over a common alphabet."""

    def __init__(self, q: int, locals_: Sequence[LocalFunction]):
        self.q = q
        self.n = len(locals_)
        self.locals = tuple(locals_)
        for v, f in enumerate(self.locals, 1):
            if f.q != q:
                raise ValueError(f"local {v} has alphabet {f.q}, expected {q}")
            if any(not 1 <= u <= self.n for u in f.support):
                raise ValueError(f"local {v} reads a vertex outside 1..{self.n}")

    def local(self, v: int) -> LocalFunction:
        return self.locals[v - 1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Fds):
            return NotImplemented
        return self.q == other.q and self.locals == other.locals

    def __hash__(self) -> int:
        return hash((self.q, self.locals))

    def __repr__(self) -> str:
        return f"Fds(n={self.n}, q={self.q})"

    def __call__(self, x: StateVector) -> StateVector:
        return evaluate(self, x)

    @cached_property
    def image(self) -> np.ndarray:
        """``f(x)`` for every state, shape ``(q^n, n)``."""
        check_state_budget(self.n, self.q)
        X = all_states(self.n, self.q)
        img = np.empty_like(X)
        for v, f in enumerate(self.locals):
            idx = np.zeros(len(X), dtype=np.int64)
            for i, u in enumerate(f.support):
                idx += X[:, u - 1] * self.q**i
            img[:, v] = f.array[idx]
        img.setflags(write=False)
        return img

    @cached_property
    def distances(self) -> np.ndarray:
        """``dH(x, f(x))`` for every state in rank order."""
        return (self.image != all_states(self.n, self.q)).sum(axis=1)

    def to_dict(self) -> dict:
        return {"n": self.n, "q": self.q,
                "locals": [{"support": list(f.support), "table": list(f.table)} for f in self.locals]}

    @classmethod
    def from_dict(cls, data: dict) -> Fds:
        q = int(data["q"])
        locs = [LocalFunction(q, tuple(d["support"]), tuple(d["table"])) for d in data["locals"]]
        if len(locs) != int(data["n"]):
            raise ValueError("n does not match the number of locals")
        return cls(q, locs)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> Fds:
        return cls.from_dict(json.loads(text))


def identity_fds(n: int, q: int) -> Fds:
    return Fds(q, [LocalFunction.identity(q, v) for v in range(1, n + 1)])


def fds_from_callables(n: int, q: int, supports: Sequence[Iterable[int]], fns) -> Fds:
    return Fds(q, [LocalFunction.from_callable(q, s, fn) for s, fn in zip(supports, fns)])


# -- operations ------------------------------------------------------------

def _check_state(f: Fds, x: StateVector) -> None:
    if x.q != f.q or len(x) != f.n:
        raise ValueError(f"state over [{x.q}]^{len(x)} does not match FDS over [{f.q}]^{f.n}")


def evaluate(f: Fds, x: StateVector) -> StateVector:
    _check_state(f, x)
    return StateVector(f.q, tuple(loc(x) for loc in f.locals))


def interaction_graph(f: Fds) -> Digraph:
    """Arc ``(u, v)`` iff ``f_v`` depends essentially on ``x_u``."""
    return Digraph(f.n, [(u, v) for v, loc in enumerate(f.locals, 1) for u in loc.essential_inputs()])


def delta_set(x: StateVector, y: StateVector) -> frozenset[int]:
    if x.q != y.q or len(x) != len(y):
        raise ValueError("states must share n and q")
    return frozenset(v for v, (a, b) in enumerate(zip(x.coords, y.coords), 1) if a != b)


def hamming(x: StateVector, y: StateVector) -> int:
    return len(delta_set(x, y))


def stability(f: Fds) -> tuple[int, StateVector]:
    """``min_x (n - dH(x, f(x)))`` with the smallest-rank minimiser."""
    r = int(np.argmax(f.distances))
    return f.n - int(f.distances[r]), StateVector.from_rank(f.q, f.n, r)


def instability(f: Fds) -> tuple[int, StateVector]:
    """``min_x dH(x, f(x))`` with the smallest-rank minimiser."""
    r = int(np.argmin(f.distances))
    return int(f.distances[r]), StateVector.from_rank(f.q, f.n, r)


def fixed_points(f: Fds) -> list[StateVector]:
    return [StateVector.from_rank(f.q, f.n, int(r)) for r in np.flatnonzero(f.distances == 0)]


def is_identity(f: Fds) -> bool:
    return bool(np.all(f.distances == 0))


def _require_boolean(f: Fds, what: str) -> None:
    if f.q != 2:
        raise ValueError(f"{what} is only defined for q = 2")


def is_monotone(f: Fds) -> bool:
    """Whether ``x <= y`` implies ``f(x) <= f(y)``, checked on covering pairs."""
    _require_boolean(f, "monotonicity")
    img = f.image
    ranks = np.arange(2**f.n)
    for i in range(f.n):
        low = ranks[(ranks >> i) & 1 == 0]
        if np.any(img[low] > img[low + (1 << i)]):
            return False
    return True


def dual_local(loc: LocalFunction) -> LocalFunction:
    """``x -> not loc(not x)`` on the same support."""
    if loc.q != 2:
        raise ValueError("duals are only defined for q = 2")
    full = len(loc.table) - 1
    return LocalFunction(2, loc.support, tuple(1 - loc.table[full - r] for r in range(len(loc.table))))


def dual(f: Fds) -> Fds:
    _require_boolean(f, "the dual")
    return Fds(2, [dual_local(loc) for loc in f.locals])


def xi_set(f: Fds | LocalFunction, v: int) -> frozenset[tuple[int, ...]]:
    """Support assignments on which ``f_v`` disagrees with ``x_v``.

    Assignments are tuples in support order.  ``v`` must read its own state.
    """
    loc = f.local(v) if isinstance(f, Fds) else f
    if v not in loc.support:
        raise ValueError(f"vertex {v} is not in its own support")
    pos = loc.support.index(v)
    out = set()
    for idx, a in enumerate(assignments(loc.q, len(loc.support))):
        if loc.table[idx] != a[pos]:
            out.add(a)
    return frozenset(out)


def guessing_code(f: Fds) -> frozenset[StateVector]:
    """``{phi(x) - x}`` where ``phi(x) = f(x) - f(0)`` componentwise mod ``q``."""
    X = all_states(f.n, f.q)
    phi = (f.image - f.image[0]) % f.q
    ranks = ((phi - X) % f.q) @ (f.q ** np.arange(f.n, dtype=np.int64))
    return frozenset(StateVector.from_rank(f.q, f.n, int(r)) for r in np.unique(ranks))
