"""Active query oracle: seed sets in, infected sets out."""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .cascade import simulate_cascade, simulate_rounds
from .graph import ContagionGraph
from .rng import RandomStream


class BudgetExhausted(RuntimeError):
    pass


class QueryOracle:
    """Holds the hidden graph and answers cascade queries against it.

    Learners see only ``n``, ``delta`` (a lower bound on the contagion
    parameter) and the infected sets returned by queries. Every query runs
    on a fresh substream so answers do not depend on the order in which
    different seed vertices are queried.
    """

    def __init__(self, graph: ContagionGraph, stream: RandomStream,
                 budget: int | None = None, delta: float | None = None):
        if delta is not None and not 0.0 < delta <= graph.delta:
            raise ValueError(f"delta lower bound {delta} must lie in (0, {graph.delta}]")
        self._graph = graph
        self._stream = stream
        self._budget = budget
        self._delta = graph.delta if delta is None else delta
        self._used = 0
        self._batches: dict[int, int] = {}

    @property
    def n(self) -> int:
        return self._graph.n

    @property
    def delta(self) -> float:
        return self._delta

    @property
    def budget(self) -> int | None:
        return self._budget

    def queries_used(self) -> int:
        return self._used

    def _reserve(self, count: int) -> None:
        if self._budget is not None and self._used + count > self._budget:
            raise BudgetExhausted(
                f"{count} more queries requested, {self._budget - self._used} left of {self._budget}")

    def query(self, seeds: Iterable[int]) -> frozenset[int]:
        """Run one cascade from ``seeds`` and return the infected set."""
        seeds = list(seeds)
        self._reserve(1)
        stream = self._stream.substream(context="query", index=self._used)
        outcome = simulate_cascade(self._graph, seeds, stream)
        self._used += 1
        return outcome.infected

    def query_single_seed(self, u: int, rounds: int) -> np.ndarray:
        """``rounds`` queries with seed set ``{u}``, as a ``(rounds, n)`` boolean matrix.

        Row ``i`` is the infected set of round ``i``. The substream is keyed by
        ``u`` and by how many batches have already been drawn for ``u``.
        """
        self._reserve(rounds)
        batch = self._batches.get(u, 0)
        stream = self._stream.substream(context="single-seed", vertex=u, index=batch)
        infected = simulate_rounds(self._graph, [u], rounds, stream) >= 0
        self._batches[u] = batch + 1
        self._used += rounds
        return infected
