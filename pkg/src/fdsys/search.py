"""Exhaustive enumeration of function spaces and the extremal / fixed-point statistics.

Every space is a Cartesian product of per-vertex choices.  For each vertex we
precompute a 0/1 matrix ``W[choice, state]`` that is 1 when that choice makes
the vertex guess wrong at that state; summing rows across vertices gives
``dH(x, f(x))`` for every function and state at once.  Functions are indexed
lexicographically with vertex 1 varying slowest.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb, prod
from typing import Iterator, Sequence

import numpy as np

from .digraph import Digraph, complete_graph, sources
from .errors import BudgetExceeded
from .fds import Fds, LocalFunction, StateVector, all_states, check_state_budget, instability, stability

FUNCTION_BUDGET = 2**31
TABLE_BUDGET = 2**22
CHUNK_CELLS = 2**22

KINDS = ("s(D,q)", "i(D,q)", "s[D,q]", "i[D,q]", "s+[D°,2]")


def kind_name(measure: str, strict: bool) -> str:
    """``("s", True) -> "s[D,q]"``; ``"s+"`` maps to the monotone kind."""
    if measure == "s+":
        return "s+[D°,2]"
    if measure not in ("s", "i"):
        raise ValueError(f"unknown measure {measure!r}")
    return f"{measure}[D,q]" if strict else f"{measure}(D,q)"


# -- local spaces ----------------------------------------------------------

def local_space_size(d: int, q: int, strict: bool) -> int:
    """Number of ``[q]^d -> [q]`` tables, or of those depending on every input."""
    if not strict:
        return q ** (q**d)
    return sum((-1) ** (d - k) * comb(d, k) * q ** (q**k) for k in range(d + 1))


def _essential_rows(tables: np.ndarray, q: int, d: int) -> np.ndarray:
    """Mask of rows (tables) that depend essentially on all ``d`` inputs."""
    if d == 0:
        return np.ones(len(tables), dtype=bool)
    cube = tables.reshape((len(tables),) + (q,) * d)
    keep = np.ones(len(tables), dtype=bool)
    for ax in range(1, d + 1):
        varies = cube.max(axis=ax) != cube.min(axis=ax)
        keep &= varies.reshape(len(tables), -1).any(axis=1)
    return keep


def local_tables(d: int, q: int, strict: bool, budget: int = TABLE_BUDGET) -> np.ndarray:
    """All tables as rows, ordered by table rank ``sum(table[i] * q^i)``."""
    total = q ** (q**d)
    if total > budget:
        raise BudgetExceeded(f"{total} tables of arity {d} over [{q}] exceed the table budget {budget}")
    ranks = np.arange(total, dtype=np.int64)
    tables = np.stack([(ranks // q**i) % q for i in range(q**d)], axis=1)
    if strict:
        tables = tables[_essential_rows(tables, q, d)]
    return tables


def local_space(d: int, q: int, strict: bool, support: Sequence[int] | None = None) -> Iterator[LocalFunction]:
    sup = tuple(range(1, d + 1)) if support is None else tuple(support)
    if len(sup) != d:
        raise ValueError("support length must equal d")
    for row in local_tables(d, q, strict):
        yield LocalFunction(q, sup, tuple(int(t) for t in row))


def space_size(D: Digraph, q: int, strict: bool) -> int:
    return prod(local_space_size(D.in_degree(v), q, strict) for v in D.vertices)


def function_space(D: Digraph, q: int, strict: bool, budget: int = FUNCTION_BUDGET) -> Iterator[Fds]:
    """Iterate ``F[D,q]`` (strict) or ``F(D,q)`` with vertex 1's table varying slowest."""
    size = space_size(D, q, strict)
    if size > budget:
        raise BudgetExceeded(f"function space of size {size} exceeds budget {budget}")
    per_vertex = [list(local_space(D.in_degree(v), q, strict, D.in_neighbours(v))) for v in D.vertices]

    def rec(i: int, acc: list[LocalFunction]):
        if i == D.n:
            yield Fds(q, acc)
            return
        for loc in per_vertex[i]:
            yield from rec(i + 1, acc + [loc])

    yield from rec(0, [])


# -- the product scan ------------------------------------------------------

def _support_index(support: Sequence[int], n: int, q: int) -> np.ndarray:
    X = all_states(n, q)
    idx = np.zeros(len(X), dtype=np.int64)
    for i, u in enumerate(support):
        idx += X[:, u - 1] * q**i
    return idx


def wrong_matrix(tables: np.ndarray, support: Sequence[int], v: int, n: int, q: int) -> np.ndarray:
    """``W[t, x] = 1`` iff table ``t`` at state ``x`` differs from ``x_v``."""
    X = all_states(n, q)
    return (tables[:, _support_index(support, n, q)] != X[:, v - 1]).astype(np.int16)


@dataclass
class ScanResult:
    """Aggregates over a scanned product space; merged in index order."""

    count: int = 0
    f0: int = 0
    f1: int = 0
    f2: int = 0
    total_fixed: int = 0
    sum_stability: int = 0
    sum_instability: int = 0
    s_positive: int = 0
    best_s: int = -1
    best_s_index: int = -1
    best_i: int = -1
    best_i_index: int = -1

    def merge(self, other: ScanResult) -> None:
        self.count += other.count
        self.f0 += other.f0
        self.f1 += other.f1
        self.f2 += other.f2
        self.total_fixed += other.total_fixed
        self.sum_stability += other.sum_stability
        self.sum_instability += other.sum_instability
        self.s_positive += other.s_positive
        # ties keep the earlier (smaller) global index
        if other.best_s > self.best_s:
            self.best_s, self.best_s_index = other.best_s, other.best_s_index
        if other.best_i > self.best_i:
            self.best_i, self.best_i_index = other.best_i, other.best_i_index


def _suffix_matrix(Ws: Sequence[np.ndarray], start: int) -> np.ndarray:
    acc = np.zeros((1, Ws[0].shape[1]), dtype=np.int16)
    for W in Ws[start:]:
        acc = (acc[:, None, :] + W[None, :, :]).reshape(-1, W.shape[1])
    return acc


def _split_point(sizes: Sequence[int], states: int) -> int:
    """Smallest ``k`` whose suffix block fits in ``CHUNK_CELLS`` (always ``k <= n-1``)."""
    rows = max(1, CHUNK_CELLS // states)
    k = len(sizes) - 1
    while k > 0 and prod(sizes[k - 1:]) <= rows:
        k -= 1
    return k


def _scan_range(Ws: Sequence[np.ndarray], lo: int, hi: int) -> ScanResult:
    """Scan prefix indices ``lo..hi-1`` (prefix = vertices before the split point)."""
    n = len(Ws)
    sizes = [len(W) for W in Ws]
    k = _split_point(sizes, Ws[0].shape[1])
    suffix = _suffix_matrix(Ws, k)
    block = len(suffix)
    res = ScanResult()
    for p in range(lo, hi):
        row = np.zeros(Ws[0].shape[1], dtype=np.int16)
        rem = p
        for v in range(k - 1, -1, -1):
            rem, c = divmod(rem, sizes[v])
            row = row + Ws[v][c]
        dist = suffix + row
        mx = dist.max(axis=1)
        mn = dist.min(axis=1)
        nfix = (dist == 0).sum(axis=1)
        res.count += block
        res.f0 += int(np.count_nonzero(nfix == 0))
        res.f1 += int(np.count_nonzero(nfix == 1))
        res.f2 += int(np.count_nonzero(nfix >= 2))
        res.total_fixed += int(nfix.sum())
        res.sum_stability += int((n - mx).sum())
        res.sum_instability += int(mn.sum())
        res.s_positive += int(np.count_nonzero(mx < n))
        j = int(np.argmin(mx))
        if n - int(mx[j]) > res.best_s:
            res.best_s, res.best_s_index = n - int(mx[j]), p * block + j
        j = int(np.argmax(mn))
        if int(mn[j]) > res.best_i:
            res.best_i, res.best_i_index = int(mn[j]), p * block + j
    return res


def _scan_job(args) -> ScanResult:
    Ws, lo, hi = args
    return _scan_range(Ws, lo, hi)


def scan_product(Ws: Sequence[np.ndarray], workers: int = 1, budget: int = FUNCTION_BUDGET) -> ScanResult:
    """Aggregate statistics over every combination of one row per matrix."""
    sizes = [len(W) for W in Ws]
    total = prod(sizes)
    if total > budget:
        raise BudgetExceeded(f"function space of size {total} exceeds budget {budget}")
    if not Ws:
        raise ValueError("empty vertex set")
    if total == 0:
        return ScanResult()
    k = _split_point(sizes, Ws[0].shape[1])
    n_prefix = prod(sizes[:k])
    if workers <= 1 or n_prefix < 2:
        return _scan_range(Ws, 0, n_prefix)
    bounds = np.linspace(0, n_prefix, min(workers, n_prefix) + 1).astype(int)
    jobs = [(Ws, int(a), int(b)) for a, b in zip(bounds[:-1], bounds[1:])]
    res = ScanResult()
    with ProcessPoolExecutor(max_workers=workers) as ex:
        for part in ex.map(_scan_job, jobs):
            res.merge(part)
    return res


def _unrank(index: int, sizes: Sequence[int]) -> list[int]:
    out = []
    for s in reversed(sizes):
        index, c = divmod(index, s)
        out.append(c)
    return out[::-1]


# -- reports ---------------------------------------------------------------

@dataclass(frozen=True)
class ExtremalReport:
    kind: str
    value: int
    witness_fn: Fds
    witness_state: StateVector
    space_size: int
    method: str = "full"

    def to_dict(self) -> dict:
        return {"kind": self.kind, "value": self.value, "space_size": self.space_size,
                "method": self.method, "witness": self.witness_fn.to_dict(),
                "witness_state": list(self.witness_state.coords)}


@dataclass(frozen=True)
class FixCounts:
    f0: int
    f1: int
    f2: int
    space_size: int
    total_fixed: int = field(default=0, compare=False)
    sum_stability: int = field(default=0, compare=False)
    sum_instability: int = field(default=0, compare=False)

    def __post_init__(self):
        if self.f0 + self.f1 + self.f2 != self.space_size:
            raise ValueError("class counts do not add up to the space size")

    @property
    def p0(self) -> Fraction:
        return Fraction(self.f0, self.space_size)

    @property
    def p1(self) -> Fraction:
        return Fraction(self.f1, self.space_size)

    @property
    def p2(self) -> Fraction:
        return Fraction(self.f2, self.space_size)

    @property
    def mean_fixed(self) -> Fraction:
        return Fraction(self.total_fixed, self.space_size)

    @property
    def mean_stability(self) -> Fraction:
        return Fraction(self.sum_stability, self.space_size)

    @property
    def mean_instability(self) -> Fraction:
        return Fraction(self.sum_instability, self.space_size)

    def to_dict(self) -> dict:
        return {"f0": self.f0, "f1": self.f1, "f2": self.f2, "space_size": self.space_size,
                "p0": str(self.p0), "p1": str(self.p1), "p2": str(self.p2),
                "mean_fixed": str(self.mean_fixed), "mean_stability": str(self.mean_stability),
                "mean_instability": str(self.mean_instability)}


def _space_matrices(D: Digraph, q: int, strict: bool, table_filter=None):
    check_state_budget(D.n, q)
    supports, tables, Ws = [], [], []
    for v in D.vertices:
        sup = D.in_neighbours(v)
        T = local_tables(len(sup), q, strict)
        if table_filter is not None:
            T = T[[table_filter(row, sup, v) for row in T]]
        supports.append(sup)
        tables.append(T)
        Ws.append(wrong_matrix(T, sup, v, D.n, q))
    return supports, tables, Ws


def _fds_at(index: int, supports, tables, q: int) -> Fds:
    picks = _unrank(index, [len(T) for T in tables])
    return Fds(q, [LocalFunction(q, tuple(s), tuple(int(t) for t in T[c]))
                   for s, T, c in zip(supports, tables, picks)])


def space_statistics(D: Digraph, q: int, strict: bool, workers: int = 1,
                     budget: int = FUNCTION_BUDGET) -> tuple[ScanResult, list, list]:
    if space_size(D, q, strict) > budget:
        raise BudgetExceeded(f"function space of size {space_size(D, q, strict)} exceeds budget {budget}")
    supports, tables, Ws = _space_matrices(D, q, strict)
    return scan_product(Ws, workers, budget), supports, tables


def fix_class_counts(D: Digraph, q: int, strict: bool, workers: int = 1,
                     budget: int = FUNCTION_BUDGET) -> FixCounts:
    """Exact numbers of functions with 0, 1 and at least 2 fixed points."""
    res, _, _ = space_statistics(D, q, strict, workers, budget)
    return FixCounts(res.f0, res.f1, res.f2, res.count, res.total_fixed,
                     res.sum_stability, res.sum_instability)


def _loopfull_pattern_search(D: Digraph, q: int, workers: int, budget: int) -> ExtremalReport:
    """Exact ``s[D,q]`` for loop-full ``D`` via one wrong-guess pattern per vertex.

    Stability only depends on the sets of neighbourhood patterns on which
    each vertex guesses wrong, and shrinking those sets never lowers it.
    Every strict local of a vertex with another in-neighbour has a non-empty
    set, and any single pattern is realised strictly by
    ``x_v + 1{x_N(v) = z}``; vertices reading only themselves take the
    identity.  So the maximum over singletons is the maximum over ``F[D,q]``.
    """
    check_state_budget(D.n, q)
    X = all_states(D.n, q)
    Ws, supports, choices = [], [], []
    for v in D.vertices:
        sup = D.in_neighbours(v)
        supports.append(sup)
        if len(sup) == 1:
            choices.append(None)
            Ws.append(np.zeros((1, len(X)), dtype=np.int16))
            continue
        idx = _support_index(sup, D.n, q)
        Ws.append((np.arange(q ** len(sup))[:, None] == idx[None, :]).astype(np.int16))
        choices.append(q ** len(sup))
    res = scan_product(Ws, workers, budget)
    picks = _unrank(res.best_s_index, [len(W) for W in Ws])
    locs = []
    for v, sup, c, z in zip(D.vertices, supports, choices, picks):
        if c is None:
            locs.append(LocalFunction.identity(q, v))
        else:
            pos = sup.index(v)
            table = []
            for r in range(q ** len(sup)):
                xv = (r // q**pos) % q
                table.append((xv + (r == z)) % q)
            locs.append(LocalFunction(q, tuple(sup), tuple(table)))
    f = Fds(q, locs)
    value, state = stability(f)
    assert value == res.best_s
    return ExtremalReport("s[D,q]", value, f, state, space_size(D, q, True), method="pattern")


def extremal(D: Digraph, q: int, kind: str, method: str = "auto", workers: int = 1,
             budget: int = FUNCTION_BUDGET) -> ExtremalReport:
    """Exact maximum of ``s`` or ``i`` over ``F(D,q)`` / ``F[D,q]`` with the first witness.

    ``method="pattern"`` (loop-full ``D``, kind ``s[D,q]`` only) uses the
    reduced search of :func:`_loopfull_pattern_search`; ``"auto"`` picks it
    when full enumeration would exceed the budget.
    """
    if kind == "s+[D°,2]":
        return monotone_optimal_stability(D, workers=workers, budget=budget)
    if kind not in KINDS:
        raise ValueError(f"unknown kind {kind!r}")
    strict = kind.startswith(("s[", "i["))
    measure = kind[0]
    size = space_size(D, q, strict)
    use_pattern = method == "pattern" or (
        method == "auto" and size > budget and kind == "s[D,q]" and D.n > 0 and D.is_loopfull())
    if use_pattern:
        if kind != "s[D,q]" or not D.is_loopfull():
            raise ValueError("pattern search applies to s[D,q] on loop-full graphs")
        return _loopfull_pattern_search(D, q, workers, budget)
    res, supports, tables = space_statistics(D, q, strict, workers, budget)
    if res.count == 0:
        raise ValueError("the function space is empty")
    index = res.best_s_index if measure == "s" else res.best_i_index
    f = _fds_at(index, supports, tables, q)
    value, state = stability(f) if measure == "s" else instability(f)
    return ExtremalReport(kind, value, f, state, res.count)


# -- monotone search -------------------------------------------------------

def phi_psi_wrong(D: Digraph) -> tuple[np.ndarray, np.ndarray]:
    """Rows per vertex: where ``x_v or AND N(v)`` and ``x_v and OR N(v)`` guess wrong."""
    X = all_states(D.n, 2)
    wphi = np.zeros((D.n, len(X)), dtype=np.int16)
    wpsi = np.zeros((D.n, len(X)), dtype=np.int16)
    for v in D.vertices:
        nb = list(D.in_neighbours(v))
        if not nb:
            continue
        xn = X[:, [u - 1 for u in nb]]
        wphi[v - 1] = (X[:, v - 1] == 0) & np.all(xn == 1, axis=1)
        wpsi[v - 1] = (X[:, v - 1] == 1) & np.all(xn == 0, axis=1)
    return wphi, wpsi


def monotone_assignment_fds(D: Digraph, use_psi: dict[int, bool]) -> Fds:
    """Sources keep their state; every other vertex is ``phi`` or ``psi`` on ``N(v) + v``."""
    from .constructions import phi_local, psi_local
    locs = []
    for v in D.vertices:
        nb = D.in_neighbours(v)
        if not nb:
            locs.append(LocalFunction.identity(2, v))
        else:
            locs.append(psi_local(v, nb) if use_psi[v] else phi_local(v, nb))
    return Fds(2, locs)


def monotone_optimal_stability(D: Digraph, workers: int = 1, budget: int = FUNCTION_BUDGET) -> ExtremalReport:
    """Exact ``s+[D°,2]``: best phi/psi assignment to the non-sources of loopless ``D``."""
    if not D.is_loopless():
        raise ValueError("monotone_optimal_stability expects a loopless graph")
    check_state_budget(D.n, 2)
    S = sources(D)
    free = [v for v in D.vertices if v not in S]
    if 2 ** len(free) * 2**D.n > budget:
        raise BudgetExceeded("phi/psi assignment space exceeds the budget")
    wphi, wpsi = phi_psi_wrong(D)
    Ws = [np.stack([wphi[v - 1], wpsi[v - 1]]) if v in free else wphi[v - 1][None, :] for v in D.vertices]
    if D.n == 0:
        raise ValueError("empty vertex set")
    res = scan_product(Ws, workers, budget)
    picks = _unrank(res.best_s_index, [len(W) for W in Ws])
    f = monotone_assignment_fds(D, {v: bool(c) for v, c in zip(D.vertices, picks)})
    value, state = stability(f)
    assert value == res.best_s
    return ExtremalReport("s+[D°,2]", value, f, state, 2 ** len(free), method="phi-psi")


def _table_is_monotone(row: np.ndarray, d: int) -> bool:
    for i in range(d):
        for r in range(2**d):
            if not r >> i & 1 and row[r] > row[r | 1 << i]:
                return False
    return True


def monotone_oracle_stability(D: Digraph, max_in_degree: int = 3, budget: int = FUNCTION_BUDGET) -> int:
    """Maximum stability over every monotone ``f`` with ``G(f) = D°``, by full enumeration."""
    from .digraph import add_loops
    Dl = add_loops(D)
    if Dl.max_in_degree() > max_in_degree:
        raise BudgetExceeded(f"monotone oracle limited to in-degree <= {max_in_degree} in D°")
    _, _, Ws = _space_matrices(Dl, 2, True, lambda row, sup, v: _table_is_monotone(row, len(sup)))
    return scan_product(Ws, 1, budget).best_s


# -- sampling --------------------------------------------------------------

def full_space_graph(n: int) -> Digraph:
    """The complete graph with loops, so that ``F(n,q)`` is ``F(K_n°, q)``."""
    return complete_graph(n, loops=True)


MAX_REJECTIONS = 10_000


def _sample_tables(rng: np.random.Generator, count: int, d: int, q: int, strict: bool) -> np.ndarray:
    T = rng.integers(0, q, size=(count, q**d), dtype=np.int64)
    if not strict or d == 0:
        return T
    bad = ~_essential_rows(T, q, d)
    tries = 0
    while bad.any():
        tries += 1
        if tries > MAX_REJECTIONS:
            raise RuntimeError("rejection sampling of strict local functions did not terminate")
        T[bad] = rng.integers(0, q, size=(int(bad.sum()), q**d), dtype=np.int64)
        bad[bad] = ~_essential_rows(T[bad], q, d)
    return T


def sample_uniform(D: Digraph, q: int, strict: bool, seed: int = 0) -> Fds:
    """A uniformly random member of ``F[D,q]`` (strict) or ``F(D,q)``."""
    rng = np.random.default_rng(seed)
    locs = []
    for v in D.vertices:
        sup = D.in_neighbours(v)
        row = _sample_tables(rng, 1, len(sup), q, strict)[0]
        locs.append(LocalFunction(q, sup, tuple(int(t) for t in row)))
    return Fds(q, locs)


@dataclass(frozen=True)
class MonteCarloStats:
    samples: int
    p0: float
    p0_se: float
    p1: float
    p1_se: float
    p2: float
    p2_se: float
    mean_instability: float
    mean_instability_se: float
    mean_stability: float
    mean_stability_se: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def monte_carlo_stats(D: Digraph, q: int, strict: bool, samples: int, seed: int = 0,
                      batch: int = 2000) -> MonteCarloStats:
    """Estimates of ``p0, p1, p2`` and mean (in)stability over uniform samples.

    Standard errors use the normal approximation.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    check_state_budget(D.n, q)
    rng = np.random.default_rng(seed)
    X = all_states(D.n, q)
    idx = [_support_index(D.in_neighbours(v), D.n, q) for v in D.vertices]
    nfix_all, inst_all, stab_all = [], [], []
    done = 0
    while done < samples:
        b = min(batch, samples - done)
        dist = np.zeros((b, len(X)), dtype=np.int16)
        for v in D.vertices:
            T = _sample_tables(rng, b, D.in_degree(v), q, strict)
            dist += T[:, idx[v - 1]] != X[:, v - 1]
        nfix_all.append((dist == 0).sum(axis=1))
        inst_all.append(dist.min(axis=1))
        stab_all.append(D.n - dist.max(axis=1))
        done += b
    nfix = np.concatenate(nfix_all)
    inst = np.concatenate(inst_all).astype(float)
    stab = np.concatenate(stab_all).astype(float)

    def prop(mask):
        p = float(mask.mean())
        return p, math.sqrt(p * (1 - p) / samples)

    def mean(a):
        se = float(a.std(ddof=1)) / math.sqrt(samples) if samples > 1 else 0.0
        return float(a.mean()), se

    p0, p0se = prop(nfix == 0)
    p1, p1se = prop(nfix == 1)
    p2, p2se = prop(nfix >= 2)
    mi, mise = mean(inst)
    ms, msse = mean(stab)
    return MonteCarloStats(samples, p0, p0se, p1, p1se, p2, p2se, mi, mise, ms, msse)
