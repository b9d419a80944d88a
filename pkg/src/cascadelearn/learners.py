"""Structure learners built on single-seed query rounds.

Every learner follows the same outer loop: for each vertex ``u`` it asks
the oracle for ``m`` cascades seeded at ``{u}`` and keeps, for every vertex
``v``, the set ``R_u(v)`` of rounds in which ``v`` ended up infected. The
learners differ only in how they turn those records into edges.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Edge
from .oracle import QueryOracle

DEFAULT_CHERNOFF_CONSTANT = 32.0
# Refuse per-vertex round counts that could never be simulated.
MAX_ROUNDS = 10**8


@dataclass(frozen=True)
class LearnerConfig:
    delta_lb: float
    delta_fail: float = 0.1
    m_override: int | None = None
    chernoff_constant: float = DEFAULT_CHERNOFF_CONSTANT

    def __post_init__(self):
        if not 0.0 < self.delta_lb <= 1.0:
            raise ValueError(f"delta_lb must lie in (0, 1], got {self.delta_lb}")
        if not 0.0 < self.delta_fail < 1.0:
            raise ValueError(f"delta_fail must lie in (0, 1), got {self.delta_fail}")
        if self.chernoff_constant <= 0:
            raise ValueError("chernoff_constant must be positive")
        if self.m_override is not None and self.m_override < 1:
            raise ValueError("m_override must be >= 1")


@dataclass
class RoundRecords:
    """Infection indicators for ``m`` rounds seeded at ``seed``.

    ``infected[i, v]`` is true iff ``v`` was infected in round ``i``; so
    ``R_u(v)`` is the set of rows where column ``v`` is set.
    """

    seed: int
    infected: np.ndarray

    @property
    def m(self) -> int:
        return self.infected.shape[0]

    @property
    def n(self) -> int:
        return self.infected.shape[1]

    def rounds(self, v: int) -> frozenset[int]:
        """``R_u(v)`` as a set of 0-based round indices."""
        return frozenset(np.flatnonzero(self.infected[:, v]).tolist())

    def counts(self) -> np.ndarray:
        """``|R_u(v)|`` for every ``v``."""
        return self.infected.sum(axis=0)

    def difference_counts(self) -> np.ndarray:
        """``D[v, w] = |R_u(v) \\ R_u(w)|`` for every pair."""
        x = self.infected.astype(np.float64)
        co = np.rint(x.T @ x).astype(np.int64)
        return co.diagonal()[:, None] - co


def collect_rounds(oracle: QueryOracle, u: int, m: int) -> RoundRecords:
    if m < 1:
        raise ValueError(f"m must be >= 1, got {m}")
    return RoundRecords(seed=u, infected=oracle.query_single_seed(u, m))


def rounds_for_large_girth(n: int, config: LearnerConfig) -> int:
    """Per-vertex rounds ``ceil(c * ln(3 n^3 / delta_fail) / delta_lb^4)``.

    Hoeffding with deviation ``delta^2 m / 8`` around each side of the gap,
    union-bounded over fewer than ``3 n^3`` ordered triples.
    """
    if config.m_override is not None:
        return config.m_override
    n = max(n, 1)
    return math.ceil(config.chernoff_constant * math.log(3 * n**3 / config.delta_fail)
                     / config.delta_lb**4)


def rounds_for_tree(n: int, config: LearnerConfig) -> int:
    """Per-vertex rounds ``ceil(ln(n^3 / delta_fail) / delta_lb^2)`` for the tree learner.

    On a tree the subset test can only err on a true edge ``(u, v)`` when no
    round separates ``v`` from some ``w``; each round does so with
    probability at least ``delta^2``.
    """
    if config.m_override is not None:
        return config.m_override
    n = max(n, 1)
    return math.ceil(math.log(n**3 / config.delta_fail) / config.delta_lb**2)


def rounds_for_bounded_degree(n: int, config: LearnerConfig, max_deg: int) -> int:
    """Per-vertex rounds ``ceil(ln(n^2 / delta_fail) / delta_lb^(2 D))``."""
    if config.m_override is not None:
        return config.m_override
    n = max(n, 1)
    return math.ceil(math.log(n**2 / config.delta_fail) / config.delta_lb ** (2 * max_deg))


def _edge(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


def tree_neighbors(records: RoundRecords) -> set[int]:
    """Vertices ``v`` with nonempty ``R_u(v)`` not contained in any ``R_u(w)``, ``w`` outside ``{u, v}``."""
    u = records.seed
    counts = records.counts()
    diff = records.difference_counts()
    out = set()
    for v in range(records.n):
        if v == u or counts[v] == 0:
            continue
        if np.all(np.delete(diff[v], [u, v]) > 0):
            out.add(v)
    return out


def large_girth_neighbors(records: RoundRecords, delta_lb: float) -> set[int]:
    """Vertices ``v`` with ``|R_u(v) \\ R_u(w)| > 3 delta^2 m / 8`` for every ``w`` outside ``{u, v}``.

    ``|R_u(v)|`` itself must also clear the threshold, which only matters
    when no third vertex exists.
    """
    u = records.seed
    threshold = large_girth_threshold(records.m, delta_lb)
    counts = records.counts()
    diff = records.difference_counts()
    out = set()
    for v in range(records.n):
        if v == u or counts[v] <= threshold:
            continue
        if np.all(np.delete(diff[v], [u, v]) > threshold):
            out.add(v)
    return out


def large_girth_threshold(m: int, delta_lb: float) -> float:
    return 3.0 * delta_lb**2 * m / 8.0


def bounded_degree_neighbors(records: RoundRecords) -> set[int]:
    """Vertices seen as the only other infected vertex in some round."""
    u = records.seed
    pairs = records.infected[records.infected.sum(axis=1) == 2]
    if pairs.size == 0:
        return set()
    hits = pairs.any(axis=0)
    hits[u] = False
    return set(np.flatnonzero(hits).tolist())


def _learn(oracle: QueryOracle, m: int, decide) -> frozenset[Edge]:
    if m > MAX_ROUNDS:
        raise ValueError(f"{m} rounds per vertex exceeds the limit of {MAX_ROUNDS}")
    edges: set[Edge] = set()
    for u in range(oracle.n):
        records = collect_rounds(oracle, u, m)
        edges.update(_edge(u, v) for v in decide(records))
    return frozenset(edges)


def learn_tree_ahk(oracle: QueryOracle, config: LearnerConfig) -> frozenset[Edge]:
    m = rounds_for_tree(oracle.n, config)
    return _learn(oracle, m, tree_neighbors)


def learn_large_girth(oracle: QueryOracle, config: LearnerConfig) -> frozenset[Edge]:
    m = rounds_for_large_girth(oracle.n, config)
    return _learn(oracle, m, lambda rec: large_girth_neighbors(rec, config.delta_lb))


def learn_bounded_degree(oracle: QueryOracle, config: LearnerConfig, max_deg: int) -> frozenset[Edge]:
    if max_deg < 0:
        raise ValueError(f"max_deg must be non-negative, got {max_deg}")
    m = rounds_for_bounded_degree(oracle.n, config, max_deg)
    return _learn(oracle, m, bounded_degree_neighbors)


LEARNERS = {
    "tree_ahk": learn_tree_ahk,
    "large_girth": learn_large_girth,
    "bounded_degree": learn_bounded_degree,
}


def rounds_per_vertex(name: str, n: int, config: LearnerConfig, max_deg: int | None = None) -> int:
    if name == "tree_ahk":
        return rounds_for_tree(n, config)
    if name == "large_girth":
        return rounds_for_large_girth(n, config)
    if name == "bounded_degree":
        if max_deg is None:
            raise ValueError("bounded_degree needs max_deg")
        return rounds_for_bounded_degree(n, config, max_deg)
    raise ValueError(f"unknown learner {name!r}")
