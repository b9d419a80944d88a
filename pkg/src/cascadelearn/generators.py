"""Seeded constructors for the graph families used in experiments and tests."""

from __future__ import annotations

import heapq
import math
from dataclasses import asdict, dataclass, field
from typing import Any

import numpy as np

from .graph import (
    DEFAULT_EXPANSION_BUDGET,
    ContagionGraph,
    GirthValue,
    GrowthConditionError,
    girth,
    max_degree,
    min_girth_required,
    path_growth_rate,
)
from .rng import RandomStream

FAMILIES = (
    "tree",
    "path",
    "star",
    "cycle",
    "star_cycle_H",
    "generalized_theta",
    "bounded_degree_random",
    "erdos_renyi",
)

MAX_PAIRING_RESTARTS = 100


class GeneratorError(ValueError):
    pass


@dataclass(frozen=True)
class GraphFamilySpec:
    family: str
    n: int = 0
    p_lo: float = 0.45
    p_hi: float = 0.55
    seed: int = 0
    degree: int | None = None
    lengths: tuple[int, ...] = ()
    edge_prob: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "lengths", tuple(int(x) for x in self.lengths))

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> GraphFamilySpec:
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise GeneratorError(f"unknown graph spec keys: {sorted(unknown)}")
        return cls(**data)

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["lengths"] = list(self.lengths)
        return d

    def validate(self) -> None:
        if self.family not in FAMILIES:
            raise GeneratorError(f"unknown family {self.family!r}; choose from {', '.join(FAMILIES)}")
        if not 0.0 < self.p_lo <= self.p_hi < 1.0:
            raise GeneratorError(f"need 0 < p_lo <= p_hi < 1, got [{self.p_lo}, {self.p_hi}]")
        f, n = self.family, self.n
        if f in ("tree", "path", "star") and n < 1:
            raise GeneratorError(f"{f} needs n >= 1")
        if f == "cycle" and n < 3:
            raise GeneratorError("cycle needs n >= 3")
        if f == "star_cycle_H" and n < 3:
            raise GeneratorError("star_cycle_H needs n >= 3")
        if f == "generalized_theta":
            if len(self.lengths) < 2 or min(self.lengths) < 2:
                raise GeneratorError("generalized_theta needs at least two path lengths, each >= 2")
        if f == "bounded_degree_random":
            if self.degree is None or self.degree < 1 or n < self.degree + 1:
                raise GeneratorError("bounded_degree_random needs 1 <= degree < n")
            if (n * self.degree) % 2:
                raise GeneratorError("bounded_degree_random needs n * degree even")
        if f == "erdos_renyi":
            if n < 1 or self.edge_prob is None or not 0.0 <= self.edge_prob <= 1.0:
                raise GeneratorError("erdos_renyi needs n >= 1 and edge_prob in [0, 1]")


def _probabilities(rng: np.random.Generator, count: int, lo: float, hi: float) -> list[float]:
    if lo == hi:
        return [lo] * count
    return rng.uniform(lo, hi, size=count).tolist()


def _prufer_tree(n: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    seq = rng.integers(0, n, size=n - 2).tolist()
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    edges = []
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    edges.append((heapq.heappop(leaves), heapq.heappop(leaves)))
    return edges


def _star_cycle(n: int) -> list[tuple[int, int]]:
    # v0 = 0; star leaves 1..n-1; cycle 0, n, n+1, ..., 2n-2, back to 0.
    star = [(0, i) for i in range(1, n)]
    ring = [0] + list(range(n, 2 * n - 1))
    cycle = [(ring[i], ring[(i + 1) % n]) for i in range(n)]
    return star + cycle


def _theta(lengths: tuple[int, ...]) -> tuple[int, list[tuple[int, int]]]:
    # Hubs are 0 and 1; each path contributes (length - 1) interior vertices.
    edges = []
    nxt = 2
    for length in lengths:
        chain = [0] + list(range(nxt, nxt + length - 1)) + [1]
        nxt += length - 1
        edges += list(zip(chain, chain[1:]))
    return nxt, edges


def _random_regular(n: int, d: int, rng: np.random.Generator) -> list[tuple[int, int]]:
    """Configuration-model pairing, restarting whenever a loop or multi-edge appears."""
    for _ in range(MAX_PAIRING_RESTARTS):
        stubs = np.repeat(np.arange(n), d)
        rng.shuffle(stubs)
        pairs = stubs.reshape(-1, 2)
        seen = set()
        ok = True
        for a, b in pairs.tolist():
            key = (min(a, b), max(a, b))
            if a == b or key in seen:
                ok = False
                break
            seen.add(key)
        if ok:
            return sorted(seen)
    raise GeneratorError(f"no simple {d}-regular pairing on {n} vertices after {MAX_PAIRING_RESTARTS} restarts")


def generate(spec: GraphFamilySpec) -> ContagionGraph:
    """Build the graph described by ``spec``; deterministic in the spec (seed included)."""
    spec.validate()
    rng = RandomStream(spec.seed, context=f"generate/{spec.family}").generator()
    f, n = spec.family, spec.n
    if f == "tree":
        edges = _prufer_tree(n, rng)
    elif f == "path":
        edges = [(i, i + 1) for i in range(n - 1)]
    elif f == "star":
        edges = [(0, i) for i in range(1, n)]
    elif f == "cycle":
        edges = [(i, (i + 1) % n) for i in range(n)]
    elif f == "star_cycle_H":
        edges = _star_cycle(n)
        n = 2 * n - 1
    elif f == "generalized_theta":
        n, edges = _theta(spec.lengths)
    elif f == "bounded_degree_random":
        edges = _random_regular(n, spec.degree, rng)
    else:
        iu, ju = np.triu_indices(n, k=1)
        keep = rng.random(iu.size) < spec.edge_prob
        edges = list(zip(iu[keep].tolist(), ju[keep].tolist()))
    probs = _probabilities(rng, len(edges), spec.p_lo, spec.p_hi)
    return ContagionGraph(n, [(a, b, p) for (a, b), p in zip(edges, probs)])


def outside_guarantee_scope(family: str) -> bool:
    """Families that exist only to observe learner failures."""
    return family == "erdos_renyi"


# --------------------------------------------------------------------------
# Certification

@dataclass(frozen=True)
class CertificationReport:
    n: int
    m: int
    delta: float
    rho: float
    rho_witness_d: int
    rho_witness_count: int
    girth: GirthValue
    effective_girth: float
    max_degree: int
    growth_ok: bool
    required_girth: int | None
    girth_ok: bool
    notes: tuple[str, ...] = field(default=())

    @property
    def passed(self) -> bool:
        return self.growth_ok and self.girth_ok

    def to_dict(self) -> dict[str, Any]:
        return {
            "n": self.n,
            "m": self.m,
            "delta": self.delta,
            "rho": self.rho,
            "rho_witness_d": self.rho_witness_d,
            "rho_witness_count": self.rho_witness_count,
            "girth": str(self.girth),
            "effective_girth": None if math.isinf(self.effective_girth) else int(self.effective_girth),
            "max_degree": self.max_degree,
            "growth_ok": self.growth_ok,
            "required_girth": self.required_girth,
            "girth_ok": self.girth_ok,
            "passed": self.passed,
            "notes": list(self.notes),
        }


def certify_for_algorithm1(g: ContagionGraph, delta: float | None = None,
                           budget: int = DEFAULT_EXPANSION_BUDGET) -> CertificationReport:
    """Check the growth and girth conditions under which the large-girth learner is guaranteed.

    ``delta`` defaults to the graph's own contagion parameter. An odd girth
    is compared through its even lower bound ``g - 1``.
    """
    delta = g.delta if delta is None else delta
    growth = path_growth_rate(g, budget)
    gval = girth(g)
    effective = gval.even_lower_bound
    notes = []
    growth_ok = 1.0 <= growth.rho and growth.rho * (1.0 - delta) < 1.0
    required = None
    if growth_ok:
        try:
            required = min_girth_required(delta, growth.rho)
        except GrowthConditionError:
            growth_ok = False
    if not growth_ok:
        notes.append("growth condition rho < 1/(1 - delta) fails; girth bound undefined")
    girth_ok = required is not None and effective >= required
    if growth_ok and not girth_ok:
        notes.append(f"girth {gval} (even bound {effective}) below required {required}")
    return CertificationReport(
        n=g.n, m=g.m, delta=delta, rho=growth.rho, rho_witness_d=growth.witness_d,
        rho_witness_count=growth.witness_count, girth=gval, effective_girth=effective,
        max_degree=max_degree(g), growth_ok=growth_ok, required_girth=required,
        girth_ok=girth_ok, notes=tuple(notes))
