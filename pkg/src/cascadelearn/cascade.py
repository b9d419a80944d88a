"""Independent cascade simulation.

Two engines share the same semantics:

* :func:`simulate_cascade` runs one cascade, draws a coin only when an
  attempt actually happens, and keeps an audit log of the edges that
  transmitted.
* :func:`simulate_rounds` runs many independent cascades from the same
  seed set at once with numpy and returns the infection step of every
  vertex in every round. Learners and the Monte Carlo checks use it.

At step ``t`` every vertex infected at ``t - 1`` tries each neighbour that
was still uninfected when the step began. Vertices infected in the same
step never try each other afterwards, so each edge sees at most one
attempt per direction and at most one direction is ever attempted.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .graph import ContagionGraph, GraphError, GrowthConditionError
from .rng import RandomStream

NOT_INFECTED = -1


@dataclass(frozen=True)
class CascadeOutcome:
    infected: frozenset[int]
    infection_step: dict[int, int]
    active_edges: list[tuple[int, int]] = field(default_factory=list)

    def trace_lines(self) -> list[str]:
        """One ``t u v`` line per active edge, ``t`` being the step ``v`` was infected."""
        return [f"{self.infection_step[v]} {u} {v}" for u, v in self.active_edges]


def _check_seeds(g: ContagionGraph, seeds: Iterable[int]) -> list[int]:
    out = sorted(set(int(s) for s in seeds))
    for s in out:
        if not 0 <= s < g.n:
            raise GraphError(f"seed vertex {s} outside 0..{g.n - 1}")
    return out


def simulate_cascade(g: ContagionGraph, seeds: Iterable[int], stream: RandomStream) -> CascadeOutcome:
    """Run one cascade from ``seeds``.

    Frontier vertices attempt neighbours in ascending ``(frontier, neighbour)``
    order. When several succeed on the same vertex in one step, the audit log
    credits the lowest-id infector.
    """
    seed_list = _check_seeds(g, seeds)
    rng = stream.python_random()
    step = {s: 0 for s in seed_list}
    active: list[tuple[int, int]] = []
    frontier = seed_list
    t = 0
    while frontier:
        t += 1
        newly: dict[int, int] = {}
        for x in frontier:
            for y in g._adj[x]:
                if y in step:
                    continue
                if rng.random() < g.probability(x, y) and y not in newly:
                    newly[y] = x
        for y, x in sorted(newly.items(), key=lambda kv: (kv[1], kv[0])):
            step[y] = t
            active.append((x, y))
        frontier = sorted(newly)
    return CascadeOutcome(infected=frozenset(step), infection_step=step, active_edges=active)


def replay_steps(seeds: Iterable[int], active_edges: Iterable[tuple[int, int]]) -> dict[int, int]:
    """Rebuild infection steps from seeds and an audit log."""
    step = {s: 0 for s in seeds}
    for u, v in active_edges:
        step[v] = step[u] + 1
    return step


def simulate_rounds(g: ContagionGraph, seeds: Iterable[int], rounds: int,
                    stream: RandomStream) -> np.ndarray:
    """Run ``rounds`` independent cascades from ``seeds``.

    Returns an ``int16`` array of shape ``(rounds, n)`` holding the step at
    which each vertex was infected, or ``NOT_INFECTED``. Coins are drawn per
    attempted edge direction, in (round, source, target) order.
    """
    seed_list = _check_seeds(g, seeds)
    if rounds < 0:
        raise ValueError(f"rounds must be non-negative, got {rounds}")
    n = g.n
    steps = np.full((rounds, n), NOT_INFECTED, dtype=np.int16)
    if rounds == 0 or not seed_list:
        return steps
    steps[:, seed_list] = 0
    src, dst, prob = g.directed_arrays
    if src.size == 0:
        return steps
    gen = stream.generator()

    infected = steps >= 0
    live = np.arange(rounds)
    frontier = infected.copy()
    t = 0
    while live.size:
        t += 1
        attempt = frontier[:, src] & ~infected[live][:, dst]
        rows, cols = np.nonzero(attempt)
        hit = gen.random(rows.size) < prob[cols]
        rows, targets = rows[hit], dst[cols[hit]]
        newly = np.zeros((live.size, n), dtype=bool)
        newly[rows, targets] = True
        steps[live[rows], targets] = t
        infected[live[rows], targets] = True
        keep = newly.any(axis=1)
        frontier = newly[keep]
        live = live[keep]
    return steps


def path_active_probability_bound(rho: float, delta: float, k: int) -> float:
    """Upper bound ``r**k / (1 - r)``, ``r = rho * (1 - delta)``, on infection along paths of length >= k."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    r = rho * (1.0 - delta)
    if r >= 1.0:
        raise GrowthConditionError(f"rho * (1 - delta) = {r} must be below 1")
    return r**k / (1.0 - r)
