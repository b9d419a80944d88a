"""Batch experiments: generate graphs, run a learner against a fresh oracle per trial, report recovery."""

from __future__ import annotations

import csv
import io
import json
import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any

import yaml

from .generators import GraphFamilySpec, certify_for_algorithm1, generate, outside_guarantee_scope
from .graph import ContagionGraph, EnumerationBudgetExceeded, Edge, max_degree
from .learners import (
    DEFAULT_CHERNOFF_CONSTANT,
    LEARNERS,
    LearnerConfig,
    learn_bounded_degree,
    rounds_per_vertex,
)
from .oracle import QueryOracle
from .rng import RandomStream, derive_seed

log = logging.getLogger(__name__)

# Certification enumerates every simple path; skip it above this size.
CERTIFY_MAX_N = 80


class SpecError(ValueError):
    pass


@dataclass(frozen=True)
class LearnerSpec:
    name: str = "large_girth"
    delta_fail: float = 0.1
    delta_lb: float | None = None
    m_override: int | None = None
    chernoff_constant: float = DEFAULT_CHERNOFF_CONSTANT
    max_degree: int | None = None


@dataclass(frozen=True)
class ExperimentSpec:
    graph: GraphFamilySpec
    learner: LearnerSpec = field(default_factory=LearnerSpec)
    trials: int = 1
    master_seed: int = 0
    name: str = "experiment"
    fixed_graph: bool = False
    certify: bool | None = None
    jobs: int = 1
    csv_path: str | None = None
    json_path: str | None = None

    def validate(self) -> None:
        if self.learner.name not in LEARNERS:
            raise SpecError(f"unknown learner {self.learner.name!r}; choose from {', '.join(LEARNERS)}")
        if self.trials < 0:
            raise SpecError("trials must be >= 0")
        if self.jobs < 1:
            raise SpecError("jobs must be >= 1")
        self.graph.validate()

    @property
    def should_certify(self) -> bool:
        if self.certify is not None:
            return self.certify
        return self.learner.name == "large_girth"

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> ExperimentSpec:
        data = dict(data)
        try:
            graph = GraphFamilySpec.from_dict(data.pop("graph"))
        except KeyError:
            raise SpecError("experiment spec needs a 'graph' section") from None
        learner_data = dict(data.pop("learner", {}) or {})
        unknown = set(learner_data) - set(LearnerSpec.__dataclass_fields__)
        if unknown:
            raise SpecError(f"unknown learner keys: {sorted(unknown)}")
        output = data.pop("output", {}) or {}
        kwargs = {}
        for key in ("trials", "master_seed", "name", "fixed_graph", "certify", "jobs"):
            if key in data:
                kwargs[key] = data.pop(key)
        if data:
            raise SpecError(f"unknown experiment keys: {sorted(data)}")
        spec = cls(graph=graph, learner=LearnerSpec(**learner_data),
                   csv_path=output.get("csv"), json_path=output.get("json"), **kwargs)
        spec.validate()
        return spec

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "master_seed": self.master_seed,
            "trials": self.trials,
            "fixed_graph": self.fixed_graph,
            "certify": self.certify,
            "jobs": self.jobs,
            "graph": self.graph.to_dict(),
            "learner": asdict(self.learner),
            "output": {"csv": self.csv_path, "json": self.json_path},
        }


def load_spec(path: str | Path) -> ExperimentSpec:
    """Read an experiment spec from YAML (JSON is valid YAML)."""
    data = yaml.safe_load(Path(path).read_text())
    if not isinstance(data, dict):
        raise SpecError(f"{path}: top level must be a mapping")
    return ExperimentSpec.from_dict(data)


# --------------------------------------------------------------------------

def precision_recall(predicted: frozenset[Edge], truth: frozenset[Edge]) -> tuple[float, float]:
    tp = len(predicted & truth)
    precision = tp / len(predicted) if predicted else 1.0
    recall = tp / len(truth) if truth else 1.0
    return precision, recall


@dataclass(frozen=True)
class TrialResult:
    trial: int
    graph_seed: int
    n: int
    true_edges: tuple[Edge, ...]
    predicted_edges: tuple[Edge, ...]
    precision: float
    recall: float
    exact: bool
    queries_used: int
    rounds_per_vertex: int
    certified: bool | None
    warnings: tuple[str, ...] = ()

    def to_dict(self) -> dict[str, Any]:
        d = asdict(self)
        d["true_edges"] = [list(e) for e in self.true_edges]
        d["predicted_edges"] = [list(e) for e in self.predicted_edges]
        d["warnings"] = list(self.warnings)
        return d


@dataclass(frozen=True)
class RecoveryReport:
    spec: ExperimentSpec
    trials: tuple[TrialResult, ...]

    @property
    def exact_rate(self) -> float:
        return sum(t.exact for t in self.trials) / len(self.trials) if self.trials else 0.0

    @property
    def mean_precision(self) -> float:
        return sum(t.precision for t in self.trials) / len(self.trials) if self.trials else 0.0

    @property
    def mean_recall(self) -> float:
        return sum(t.recall for t in self.trials) / len(self.trials) if self.trials else 0.0

    @property
    def total_queries(self) -> int:
        return sum(t.queries_used for t in self.trials)

    def aggregate(self) -> dict[str, Any]:
        return {
            "trials": len(self.trials),
            "exact_recovery_rate": self.exact_rate,
            "mean_precision": self.mean_precision,
            "mean_recall": self.mean_recall,
            "total_queries": self.total_queries,
        }

    def to_json(self) -> str:
        spec = self.spec.to_dict()
        del spec["jobs"]  # parallelism must not change report bytes
        doc = {
            "spec": spec,
            "aggregate": self.aggregate(),
            "trials": [t.to_dict() for t in self.trials],
        }
        return json.dumps(doc, indent=2, sort_keys=True) + "\n"

    def to_csv(self) -> str:
        cols = ["trial", "graph_seed", "n", "true_edges", "predicted_edges", "precision",
                "recall", "exact", "queries_used", "rounds_per_vertex", "certified"]
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(cols)
        for t in self.trials:
            writer.writerow([t.trial, t.graph_seed, t.n, len(t.true_edges), len(t.predicted_edges),
                             repr(t.precision), repr(t.recall), int(t.exact), t.queries_used,
                             t.rounds_per_vertex, "" if t.certified is None else int(t.certified)])
        return buf.getvalue()

    def summary(self) -> str:
        a = self.aggregate()
        return (f"{self.spec.name}: {a['trials']} trials, exact recovery {a['exact_recovery_rate']:.3f}, "
                f"precision {a['mean_precision']:.4f}, recall {a['mean_recall']:.4f}, "
                f"queries {a['total_queries']}")


def trial_graph(spec: ExperimentSpec, trial: int) -> tuple[int, ContagionGraph]:
    """Generator seed and graph for one trial; every trial shares trial 0's graph when fixed."""
    seed = derive_seed(spec.master_seed, "graph", 0 if spec.fixed_graph else trial)
    return seed, generate(replace(spec.graph, seed=seed))


def run_trial(spec: ExperimentSpec, trial: int) -> TrialResult:
    graph_seed, g = trial_graph(spec, trial)
    warnings = []
    if outside_guarantee_scope(spec.graph.family):
        warnings.append(f"family {spec.graph.family} is outside every recovery guarantee")

    certified = None
    if spec.should_certify:
        if g.n > CERTIFY_MAX_N:
            warnings.append(f"certification skipped: n = {g.n} > {CERTIFY_MAX_N}")
        else:
            try:
                cert = certify_for_algorithm1(g, spec.learner.delta_lb)
                certified = cert.passed
                if not cert.passed:
                    warnings.append("certification failed: " + "; ".join(cert.notes))
            except EnumerationBudgetExceeded as exc:
                warnings.append(f"certification skipped: {exc}")
    for w in warnings:
        log.warning("trial %d: %s", trial, w)

    oracle = QueryOracle(g, RandomStream(spec.master_seed, context="oracle", index=trial),
                         delta=spec.learner.delta_lb)
    ls = spec.learner
    config = LearnerConfig(delta_lb=oracle.delta, delta_fail=ls.delta_fail,
                           m_override=ls.m_override, chernoff_constant=ls.chernoff_constant)
    if ls.name == "bounded_degree":
        # The degree bound is a promise about the hidden graph, supplied like delta.
        deg = ls.max_degree if ls.max_degree is not None else max_degree(g)
        predicted = learn_bounded_degree(oracle, config, deg)
        m = rounds_per_vertex(ls.name, g.n, config, deg)
    else:
        predicted = LEARNERS[ls.name](oracle, config)
        m = rounds_per_vertex(ls.name, g.n, config)

    truth = g.edge_set()
    precision, recall = precision_recall(predicted, truth)
    return TrialResult(
        trial=trial, graph_seed=graph_seed, n=g.n,
        true_edges=tuple(sorted(truth)), predicted_edges=tuple(sorted(predicted)),
        precision=precision, recall=recall, exact=predicted == truth,
        queries_used=oracle.queries_used(), rounds_per_vertex=m,
        certified=certified, warnings=tuple(warnings))


def _run_indexed(args: tuple[ExperimentSpec, int]) -> TrialResult:
    return run_trial(*args)


def run_experiment(spec: ExperimentSpec, jobs: int | None = None) -> RecoveryReport:
    """Run every trial; results are ordered by trial index whatever ``jobs`` is."""
    spec.validate()
    jobs = spec.jobs if jobs is None else jobs
    work = [(spec, t) for t in range(spec.trials)]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(_run_indexed, work))
    else:
        results = [_run_indexed(w) for w in work]
    return RecoveryReport(spec=spec, trials=tuple(results))


def write_reports(report: RecoveryReport, out_dir: str | Path | None = None) -> list[Path]:
    """Write CSV and JSON; ``out_dir`` overrides the paths named in the spec."""
    spec = report.spec
    if out_dir is not None:
        base = Path(out_dir)
        paths = (base / f"{spec.name}.csv", base / f"{spec.name}.json")
    else:
        paths = (Path(spec.csv_path or f"{spec.name}.csv"), Path(spec.json_path or f"{spec.name}.json"))
    for p, text in zip(paths, (report.to_csv(), report.to_json())):
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(text)
    return list(paths)
