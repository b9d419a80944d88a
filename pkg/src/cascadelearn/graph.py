"""Contagion graphs and the exact structural analyses used to certify them.

Vertices are the integers ``0..n-1``. Every edge carries an infection
probability strictly inside ``(0, 1)``.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

DEFAULT_EXPANSION_BUDGET = 10**8

# Snaps a near-integer ratio before the ceiling in min_girth_required.
GUARD_BAND = 1e-9


class GraphError(ValueError):
    """Invalid graph construction or vertex reference."""


class EnumerationBudgetExceeded(RuntimeError):
    """Exhaustive path enumeration needed more node expansions than allowed."""


class GrowthConditionError(ValueError):
    """The growth condition ``1 <= rho < 1/(1 - delta)`` does not hold."""


Edge = tuple[int, int]


def _key(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


class ContagionGraph:
    """Immutable undirected graph with per-edge infection probabilities."""

    def __init__(self, n: int, edges: Mapping[Edge, float] | Iterable[tuple[int, int, float]]):
        if n < 0:
            raise GraphError(f"vertex count must be non-negative, got {n}")
        items = edges.items() if isinstance(edges, Mapping) else (((a, b), p) for a, b, p in edges)
        probs: dict[Edge, float] = {}
        for (a, b), p in items:
            a, b, p = int(a), int(b), float(p)
            if not (0 <= a < n and 0 <= b < n):
                raise GraphError(f"edge ({a}, {b}) has an endpoint outside 0..{n - 1}")
            if a == b:
                raise GraphError(f"self-loop at vertex {a}")
            key = _key(a, b)
            if key in probs:
                raise GraphError(f"duplicate edge {key}")
            if not 0.0 < p < 1.0:
                raise GraphError(f"edge {key} has probability {p}; must lie strictly in (0, 1)")
            probs[key] = p
        self._n = n
        self._probs = dict(sorted(probs.items()))
        adj: list[list[int]] = [[] for _ in range(n)]
        for a, b in self._probs:
            adj[a].append(b)
            adj[b].append(a)
        self._adj = tuple(tuple(sorted(nb)) for nb in adj)

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return len(self._probs)

    @property
    def edges(self) -> dict[Edge, float]:
        """Copy of the ``(min, max) -> probability`` map, in canonical order."""
        return dict(self._probs)

    def edge_set(self) -> frozenset[Edge]:
        return frozenset(self._probs)

    def neighbors(self, v: int) -> tuple[int, ...]:
        self._check_vertex(v)
        return self._adj[v]

    def degree(self, v: int) -> int:
        return len(self.neighbors(v))

    def has_edge(self, u: int, v: int) -> bool:
        return _key(u, v) in self._probs

    def probability(self, u: int, v: int) -> float:
        try:
            return self._probs[_key(u, v)]
        except KeyError:
            raise GraphError(f"({u}, {v}) is not an edge") from None

    @property
    def alpha(self) -> float:
        """Smallest infection probability (1.0 for an edgeless graph)."""
        return min(self._probs.values(), default=1.0)

    @property
    def beta(self) -> float:
        """Largest infection probability (0.0 for an edgeless graph)."""
        return max(self._probs.values(), default=0.0)

    @property
    def delta(self) -> float:
        """Contagion parameter ``min(alpha, 1 - beta)``; 1.0 when there are no edges."""
        return min(self.alpha, 1.0 - self.beta)

    @cached_property
    def directed_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Both orientations of every edge, sorted by (source, target).

        Returns ``(src, dst, prob)`` arrays; used by the batched cascade engine.
        """
        pairs = sorted((a, b) for a in range(self._n) for b in self._adj[a])
        src = np.array([a for a, _ in pairs], dtype=np.intp)
        dst = np.array([b for _, b in pairs], dtype=np.intp)
        prob = np.array([self._probs[_key(a, b)] for a, b in pairs], dtype=np.float64)
        return src, dst, prob

    def _check_vertex(self, v: int) -> None:
        if not 0 <= v < self._n:
            raise GraphError(f"vertex {v} outside 0..{self._n - 1}")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ContagionGraph):
            return NotImplemented
        return self._n == other._n and self._probs == other._probs

    def __hash__(self) -> int:
        return hash((self._n, tuple(self._probs.items())))

    def __repr__(self) -> str:
        return f"ContagionGraph(n={self._n}, m={self.m}, delta={self.delta:.4g})"


# --------------------------------------------------------------------------
# Girth

@dataclass(frozen=True)
class FiniteGirth:
    length: int

    @property
    def even_lower_bound(self) -> int:
        """Largest even integer not exceeding the girth."""
        return self.length - (self.length % 2)

    def at_least(self, bound: float) -> bool:
        return self.length >= bound

    def __str__(self) -> str:
        return str(self.length)


@dataclass(frozen=True)
class InfiniteGirth:
    """Girth of a forest: no cycle exists, so every bound is met."""

    @property
    def even_lower_bound(self) -> float:
        return math.inf

    def at_least(self, bound: float) -> bool:
        return True

    def __str__(self) -> str:
        return "inf"


GirthValue = FiniteGirth | InfiniteGirth


def shortest_path_distance(g: ContagionGraph, u: int, v: int) -> int | None:
    """Hop distance from ``u`` to ``v``, or ``None`` if ``v`` is unreachable."""
    g._check_vertex(u)
    g._check_vertex(v)
    return bfs_distances(g, u).get(v)


def bfs_distances(g: ContagionGraph, source: int) -> dict[int, int]:
    g._check_vertex(source)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        x = queue.popleft()
        for y in g._adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    return dist


def girth(g: ContagionGraph) -> GirthValue:
    """Exact length of the shortest cycle via a BFS from every vertex.

    A non-tree edge ``(x, y)`` met during the BFS from ``r`` closes a closed
    walk of length ``d(x) + d(y) + 1`` through ``r``; the minimum over all
    roots is attained by a root lying on a shortest cycle.
    """
    best = math.inf
    for root in range(g.n):
        dist = {root: 0}
        parent = {root: -1}
        queue = deque([root])
        while queue:
            x = queue.popleft()
            if 2 * dist[x] >= best:
                break
            for y in g._adj[x]:
                if y not in dist:
                    dist[y] = dist[x] + 1
                    parent[y] = x
                    queue.append(y)
                elif parent[x] != y:
                    best = min(best, dist[x] + dist[y] + 1)
    return InfiniteGirth() if best == math.inf else FiniteGirth(int(best))


# --------------------------------------------------------------------------
# Simple paths

class _Budget:
    __slots__ = ("left", "limit")

    def __init__(self, limit: int):
        self.left = limit
        self.limit = limit

    def spend(self) -> None:
        self.left -= 1
        if self.left < 0:
            raise EnumerationBudgetExceeded(f"more than {self.limit} node expansions needed")


def _paths_by_length(g: ContagionGraph, source: int, max_len: int, budget: _Budget,
                     target: int | None = None) -> np.ndarray:
    """counts[v, d] = number of simple paths with d edges from ``source`` to ``v``."""
    counts = np.zeros((g.n, max_len + 1), dtype=np.int64)
    adj = g._adj
    on_path = [False] * g.n
    on_path[source] = True
    # Iterative DFS: stack of (vertex, depth, neighbor iterator).
    stack = [(source, 0, iter(adj[source]))]
    while stack:
        x, depth, it = stack[-1]
        nxt = next(it, None)
        if nxt is None:
            stack.pop()
            on_path[x] = False
            continue
        if on_path[nxt]:
            continue
        budget.spend()
        counts[nxt, depth + 1] += 1
        if depth + 1 < max_len and nxt != target:
            on_path[nxt] = True
            stack.append((nxt, depth + 1, iter(adj[nxt])))
    on_path[source] = False
    return counts


def count_simple_paths(g: ContagionGraph, u: int, v: int, d: int,
                       budget: int = DEFAULT_EXPANSION_BUDGET) -> int:
    """Number of simple paths with exactly ``d`` edges between ``u`` and ``v``."""
    g._check_vertex(u)
    g._check_vertex(v)
    if u == v:
        raise GraphError("count_simple_paths needs distinct endpoints")
    if d < 1:
        raise GraphError(f"path length must be >= 1, got {d}")
    if d > g.n - 1:
        return 0
    counts = _paths_by_length(g, u, d, _Budget(budget), target=v)
    return int(counts[v, d])


@dataclass(frozen=True)
class PathGrowthRate:
    rho: float
    witness_d: int
    witness_count: int
    # p_d for d = 1..n-1 (index 0 is d = 1).
    counts: tuple[int, ...] = ()


def max_path_counts(g: ContagionGraph, budget: int = DEFAULT_EXPANSION_BUDGET) -> list[int]:
    """``p_d`` for ``d = 1..n-1``: the most simple ``d``-edge paths joining any two distinct vertices."""
    max_len = max(g.n - 1, 0)
    best = np.zeros(max_len + 1, dtype=np.int64)
    shared = _Budget(budget)
    for source in range(g.n):
        if not g._adj[source]:
            continue
        counts = _paths_by_length(g, source, max_len, shared)
        best = np.maximum(best, counts.max(axis=0))
    return [int(c) for c in best[1:]]


def path_growth_rate(g: ContagionGraph, budget: int = DEFAULT_EXPANSION_BUDGET) -> PathGrowthRate:
    """Exact ``rho = max_d p_d ** (1/d)`` by exhaustive enumeration.

    Candidates are compared with integer arithmetic (``a**(1/i) > b**(1/j)``
    iff ``a**j > b**i``), so the witness is exact; ties go to the smallest
    ``d``. An edgeless graph reports ``rho = 1`` with ``witness_count = 0``.
    """
    counts = max_path_counts(g, budget)
    wd, wc = 1, 0
    for d, c in enumerate(counts, start=1):
        if c == 0:
            continue
        if wc == 0 or c**wd > wc**d:
            wd, wc = d, c
    rho = 1.0 if wc == 0 else float(wc) ** (1.0 / wd)
    return PathGrowthRate(rho=rho, witness_d=wd, witness_count=wc, counts=tuple(counts))


def max_degree(g: ContagionGraph) -> int:
    return max((len(nb) for nb in g._adj), default=0)


def min_girth_required(delta: float, rho: float) -> int:
    """Smallest even girth for which long active paths are rare enough.

    Evaluates ``2 * ceil((2 ln(delta/2) + ln(1 - r)) / ln r)`` with
    ``r = rho * (1 - delta)``. Requires ``0 < delta <= 1`` and
    ``1 <= rho < 1/(1 - delta)``.
    """
    if not 0.0 < delta <= 1.0:
        raise ValueError(f"delta must lie in (0, 1], got {delta}")
    r = rho * (1.0 - delta)
    if rho < 1.0 or r >= 1.0:
        raise GrowthConditionError(
            f"need 1 <= rho < 1/(1 - delta); got rho={rho}, delta={delta}")
    if r == 0.0:
        return 0
    ratio = (2.0 * math.log(delta / 2.0) + math.log(1.0 - r)) / math.log(r)
    nearest = round(ratio)
    if abs(ratio - nearest) <= GUARD_BAND:
        ratio = float(nearest)
    return 2 * math.ceil(ratio)


# --------------------------------------------------------------------------
# Edge-list I/O

def format_edge_list(g: ContagionGraph) -> str:
    lines = [f"{g.n} {g.m}"]
    lines += [f"{a} {b} {p!r}" for (a, b), p in g.edges.items()]
    return "\n".join(lines) + "\n"


def format_edge_set(n: int, edges: Iterable[Edge]) -> str:
    """Canonical ``u v`` listing for a learned edge set (no probabilities)."""
    canon = sorted({_key(a, b) for a, b in edges})
    lines = [f"{n} {len(canon)}"] + [f"{a} {b}" for a, b in canon]
    return "\n".join(lines) + "\n"


def _data_lines(text: str) -> list[list[str]]:
    rows = []
    for line in text.splitlines():
        line = line.strip()
        if line and not line.startswith("#"):
            rows.append(line.split())
    return rows


def parse_edge_list(text: str) -> ContagionGraph:
    rows = _data_lines(text)
    if not rows or len(rows[0]) != 2:
        raise GraphError("edge list must start with a 'n m' header")
    n, m = int(rows[0][0]), int(rows[0][1])
    body = rows[1:]
    if len(body) != m:
        raise GraphError(f"header announces {m} edges, found {len(body)}")
    edges = []
    for row in body:
        if len(row) != 3:
            raise GraphError(f"expected 'u v p', got {' '.join(row)!r}")
        edges.append((int(row[0]), int(row[1]), float(row[2])))
    return ContagionGraph(n, edges)


def parse_edge_set(text: str) -> tuple[int, frozenset[Edge]]:
    """Read ``u v`` (or ``u v p``) rows; probabilities are ignored."""
    rows = _data_lines(text)
    if not rows or len(rows[0]) != 2:
        raise GraphError("edge list must start with a 'n m' header")
    n = int(rows[0][0])
    return n, frozenset(_key(int(r[0]), int(r[1])) for r in rows[1:])


def read_edge_list(path: str | Path) -> ContagionGraph:
    return parse_edge_list(Path(path).read_text())


def write_edge_list(g: ContagionGraph, path: str | Path) -> None:
    Path(path).write_text(format_edge_list(g))
