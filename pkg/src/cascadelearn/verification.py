"""Monte Carlo checks of the probability bounds behind the large-girth learner.

Each check simulates ``trials`` cascades seeded at ``{u}``, estimates the
probability of one event, and compares it with the closed-form bound. A
verdict is ``within`` when the estimate is on the right side of the bound
after allowing three standard errors.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Any, Iterable

import numpy as np

from .cascade import path_active_probability_bound, simulate_rounds
from .generators import CertificationReport, certify_for_algorithm1
from .graph import (
    ContagionGraph,
    FiniteGirth,
    GirthValue,
    bfs_distances,
    count_simple_paths,
    girth,
    path_growth_rate,
)
from .rng import RandomStream

SIGMA_MULTIPLIER = 3.0


class PreconditionError(ValueError):
    """The vertices handed to a check do not satisfy the bound's hypothesis."""


@dataclass(frozen=True)
class BoundCheckReport:
    lemma: str
    graph: str
    vertices: tuple[int, ...]
    trials: int
    hits: int
    bound: float
    kind: str  # "upper" or "lower"
    in_scope: bool = True
    notes: tuple[str, ...] = field(default=())

    @property
    def estimate(self) -> float:
        return self.hits / self.trials if self.trials else 0.0

    @property
    def std_error(self) -> float:
        if not self.trials:
            return 0.0
        p = self.estimate
        return math.sqrt(p * (1.0 - p) / self.trials)

    @property
    def verdict(self) -> str:
        slack = SIGMA_MULTIPLIER * self.std_error
        if self.kind == "upper":
            ok = self.estimate <= self.bound + slack
        else:
            ok = self.estimate >= self.bound - slack
        return "within" if ok else "violation"

    @property
    def ok(self) -> bool:
        return self.verdict == "within"

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["vertices"] = list(self.vertices)
        d["notes"] = list(self.notes)
        d.update(estimate=self.estimate, std_error=self.std_error, verdict=self.verdict)
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


CSV_FIELDS = ["lemma", "graph", "vertices", "trials", "hits", "estimate", "std_error",
              "bound", "kind", "verdict", "in_scope"]


def reports_to_csv(reports: Iterable[BoundCheckReport]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for r in reports:
        d = r.to_dict()
        d["vertices"] = " ".join(map(str, r.vertices))
        writer.writerow([d[k] for k in CSV_FIELDS])
    return buf.getvalue()


def long_path_bound_holds(rho: float, delta: float, g: GirthValue) -> bool:
    """Whether long active paths (length >= ceil(g/2)) are bounded by ``delta^2 / 4``."""
    if not isinstance(g, FiniteGirth):
        return True
    k = math.ceil(g.length / 2)
    return path_active_probability_bound(rho, delta, k) <= delta**2 / 4


def _describe(g: ContagionGraph) -> str:
    return f"n={g.n} m={g.m} delta={g.delta:.6g}"


def _scope(g: ContagionGraph, delta: float, cert: CertificationReport | None) -> tuple[bool, tuple[str, ...]]:
    cert = cert if cert is not None else certify_for_algorithm1(g, delta)
    if cert.passed:
        return True, ()
    return False, ("outside guarantee scope",) + cert.notes


def _infected(g: ContagionGraph, u: int, trials: int, stream: RandomStream) -> np.ndarray:
    return simulate_rounds(g, [u], trials, stream.substream(context="verify", vertex=u))


def check_lemma2(g: ContagionGraph, u: int, v: int, k: int, trials: int, stream: RandomStream,
                 rho: float | None = None, delta: float | None = None) -> BoundCheckReport:
    """Probability that ``v`` is infected by a transmission chain of length >= ``k``.

    Measured on the audit trail: with a single seed, ``v``'s chain length is
    the step at which it was infected.
    """
    if u == v:
        raise PreconditionError("u and v must differ")
    delta = g.delta if delta is None else delta
    rho = path_growth_rate(g).rho if rho is None else rho
    bound = path_active_probability_bound(rho, delta, k)
    steps = _infected(g, u, trials, stream)
    hits = int(np.count_nonzero(steps[:, v] >= k))
    return BoundCheckReport(
        lemma="lemma2", graph=_describe(g), vertices=(u, v, k), trials=trials, hits=hits,
        bound=bound, kind="upper", notes=("event: infection step of v >= k",))


def check_lemma3(g: ContagionGraph, u: int, v: int, w: int, trials: int, stream: RandomStream,
                 delta: float | None = None,
                 certification: CertificationReport | None = None) -> BoundCheckReport:
    """Adjacent ``(u, v)``: ``Pr[v infected, w not] >= 7 delta^2 / 8``."""
    if not g.has_edge(u, v):
        raise PreconditionError(f"({u}, {v}) is not an edge")
    if w in (u, v):
        raise PreconditionError("w must differ from u and v")
    delta = g.delta if delta is None else delta
    in_scope, notes = _scope(g, delta, certification)
    steps = _infected(g, u, trials, stream)
    hits = int(np.count_nonzero((steps[:, v] >= 0) & (steps[:, w] < 0)))
    return BoundCheckReport(
        lemma="lemma3", graph=_describe(g), vertices=(u, v, w), trials=trials, hits=hits,
        bound=7.0 * delta**2 / 8.0, kind="lower", in_scope=in_scope, notes=notes)


def second_vertex_on_shortest_path(g: ContagionGraph, u: int, v: int) -> int:
    dist_v = bfs_distances(g, v)
    d = dist_v.get(u)
    if d is None or d < 2:
        raise PreconditionError(f"{v} is not at distance >= 2 from {u}")
    candidates = [x for x in g.neighbors(u) if dist_v.get(x) == d - 1]
    if len(candidates) != 1:
        raise PreconditionError(f"shortest path from {u} to {v} is not unique")
    return candidates[0]


def check_lemma4(g: ContagionGraph, u: int, v: int, trials: int, stream: RandomStream,
                 delta: float | None = None,
                 certification: CertificationReport | None = None) -> BoundCheckReport:
    """Close non-adjacent pair: ``Pr[v infected, w not] <= delta^2 / 4`` for ``w`` after ``u`` on the shortest path.

    Closeness means ``1 < d(u, v) < g'/2`` with ``g'`` the even lower bound of the girth.
    """
    d = bfs_distances(g, u).get(v)
    half = girth(g).even_lower_bound / 2
    if d is None or not 1 < d < half:
        raise PreconditionError(f"need 1 < d(u, v) < {half}, got d = {d}")
    if count_simple_paths(g, u, v, d) != 1:
        raise PreconditionError(f"shortest path from {u} to {v} is not unique")
    w = second_vertex_on_shortest_path(g, u, v)
    delta = g.delta if delta is None else delta
    in_scope, notes = _scope(g, delta, certification)
    steps = _infected(g, u, trials, stream)
    hits = int(np.count_nonzero((steps[:, v] >= 0) & (steps[:, w] < 0)))
    return BoundCheckReport(
        lemma="lemma4", graph=_describe(g), vertices=(u, v, w), trials=trials, hits=hits,
        bound=delta**2 / 4.0, kind="upper", in_scope=in_scope, notes=notes)


def check_lemma5(g: ContagionGraph, u: int, v: int, trials: int, stream: RandomStream,
                 delta: float | None = None,
                 certification: CertificationReport | None = None) -> BoundCheckReport:
    """Far pair, ``d(u, v) >= g'/2`` or unreachable: ``Pr[v infected] <= delta^2 / 4``."""
    if u == v or g.has_edge(u, v):
        raise PreconditionError("u and v must be distinct and non-adjacent")
    d = bfs_distances(g, u).get(v)
    half = girth(g).even_lower_bound / 2
    if d is not None and d < half:
        raise PreconditionError(f"need d(u, v) >= {half}, got {d}")
    delta = g.delta if delta is None else delta
    in_scope, notes = _scope(g, delta, certification)
    steps = _infected(g, u, trials, stream)
    hits = int(np.count_nonzero(steps[:, v] >= 0))
    return BoundCheckReport(
        lemma="lemma5", graph=_describe(g), vertices=(u, v), trials=trials, hits=hits,
        bound=delta**2 / 4.0, kind="upper", in_scope=in_scope, notes=notes)
