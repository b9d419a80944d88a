"""Acceptance criteria, each run at its stated tolerance.

Every test carries a ``criterion`` marker; the terminal summary prints one
PASS/FAIL line per criterion. Run just this module with
``pytest tests/test_acceptance.py -v``.
"""

import math
from dataclasses import replace
from pathlib import Path

import pytest

from cascadelearn.cascade import path_active_probability_bound
from cascadelearn.experiment import (
    ExperimentSpec,
    LearnerSpec,
    load_spec,
    run_experiment,
    trial_graph,
    write_reports,
)
from cascadelearn.generators import GraphFamilySpec, certify_for_algorithm1, generate
from cascadelearn.graph import (
    ContagionGraph,
    FiniteGirth,
    bfs_distances,
    girth,
    min_girth_required,
    path_growth_rate,
)
from cascadelearn.learners import LearnerConfig, collect_rounds, rounds_for_bounded_degree, rounds_for_tree
from cascadelearn.oracle import QueryOracle
from cascadelearn.rng import RandomStream
from cascadelearn.verification import check_lemma3, check_lemma4, check_lemma5

from oracles import exact_infection_distribution

EXPERIMENTS = Path(__file__).resolve().parent.parent / "experiments"
pytestmark = pytest.mark.slow

C31_SPEC = GraphFamilySpec("cycle", n=31, p_lo=0.45, p_hi=0.55, seed=101)
H31_SPEC = GraphFamilySpec("star_cycle_H", n=31, p_lo=0.49, p_hi=0.51, seed=102)


def detail(record_property, text):
    record_property("detail", text)


# ---------------------------------------------------------------- 1

@pytest.mark.criterion(1, "girth bound worked values 16 and 30")
def test_criterion_1_girth_bound_values(record_property):
    a = min_girth_required(0.5, 1.25)
    b = min_girth_required(0.5, 1.5)
    detail(record_property, f"got {a}, {b}")
    assert (a, b) == (16, 30)


# ---------------------------------------------------------------- 2

@pytest.mark.criterion(2, "H(n) girth = n and rho = 2^(2/n) for n in 5, 7, 9, 11")
def test_criterion_2_star_cycle_metrics(record_property):
    rows, failures = [], []
    for n in (5, 7, 9, 11):
        g = generate(GraphFamilySpec("star_cycle_H", n=n))
        gv = girth(g)
        rho = path_growth_rate(g).rho
        target = 2 ** (2 / n)
        rows.append(f"n={n}: girth={gv} rho={rho:.15g} target={target:.15g}")
        if gv != FiniteGirth(n):
            failures.append(f"n={n} girth {gv}")
        if abs(rho - target) > 1e-12:
            failures.append(f"n={n} rho {rho!r} != {target!r}")
    detail(record_property, "; ".join(rows))
    assert not failures, failures


# ---------------------------------------------------------------- 3

def _certified_graphs():
    yield "C_31", generate(C31_SPEC), None
    yield "C_31 at delta 0.5", generate(C31_SPEC), 0.5
    yield "H(31)", generate(H31_SPEC), None
    for seed in range(10):
        yield f"tree n=30 seed {seed}", generate(GraphFamilySpec("tree", n=30, seed=seed)), None
    yield "theta(16, 18)", generate(GraphFamilySpec("generalized_theta", lengths=(16, 18))), None


@pytest.mark.criterion(3, "long-path bound at ceil(g/2) is at most delta^2/4 on certified graphs")
def test_criterion_3_long_path_arithmetic(record_property):
    checked = 0
    for name, g, delta in _certified_graphs():
        cert = certify_for_algorithm1(g, delta)
        assert cert.passed, name
        if not isinstance(cert.girth, FiniteGirth):
            continue  # no cycle: no path of length ceil(g/2) exists to bound
        k = math.ceil(cert.girth.length / 2)
        bound = path_active_probability_bound(cert.rho, cert.delta, k)
        assert bound <= cert.delta**2 / 4, (name, bound)
        checked += 1
    detail(record_property, f"{checked} finite-girth certified graphs checked")
    assert checked >= 4


# ---------------------------------------------------------------- 4

def _lemma_reports(g, seed):
    stream = RandomStream(seed, context="acceptance-lemmas")
    cert = certify_for_algorithm1(g)
    assert cert.passed
    trials = 100_000
    if g.n == 31:  # C_31
        triples3 = [(0, 1, 2), (0, 1, 30), (0, 1, 15), (10, 11, 12)]
        pairs4 = [(0, 2), (0, 5), (0, 14), (7, 20)]
        pairs5 = [(0, 15), (0, 16), (4, 19)]
    else:  # H(31): hub 0, leaves 1..30, cycle 0, 31, ..., 60
        triples3 = [(0, 1, 2), (0, 1, 31), (0, 31, 32), (31, 32, 33), (1, 0, 60)]
        pairs4 = [(1, 2), (1, 33), (31, 34), (1, 43)]
        pairs5 = [(1, 45), (31, 46), (0, 45)]
    reports = [check_lemma3(g, u, v, w, trials, stream, certification=cert) for u, v, w in triples3]
    reports += [check_lemma4(g, u, v, trials, stream, certification=cert) for u, v in pairs4]
    reports += [check_lemma5(g, u, v, trials, stream, certification=cert) for u, v in pairs5]
    return reports


@pytest.mark.criterion(4, "Monte Carlo lemma 3/4/5 bounds on C_31 and H(31) at 1e5 trials")
@pytest.mark.parametrize("spec", [C31_SPEC, H31_SPEC], ids=["C31", "H31"])
def test_criterion_4_lemma_bounds(spec, record_property):
    g = generate(spec)
    reports = _lemma_reports(g, spec.seed)
    bad = [(r.lemma, r.vertices, r.estimate, r.bound) for r in reports if not (r.ok and r.in_scope)]
    worst = min(reports, key=lambda r: (r.bound - r.estimate) if r.kind == "upper" else (r.estimate - r.bound))
    detail(record_property, f"{spec.family}: {len(reports)} checks, tightest {worst.lemma} {worst.vertices} "
                            f"estimate {worst.estimate:.4f} vs bound {worst.bound:.4f}")
    assert not bad, bad


# ---------------------------------------------------------------- 5

CRITERION5 = [
    ExperimentSpec(graph=GraphFamilySpec("tree", n=30), learner=LearnerSpec("large_girth", delta_fail=0.2),
                   trials=50, master_seed=5, name="trees30_large_girth"),
    load_spec(EXPERIMENTS / "cycle31_large_girth.yaml"),
    load_spec(EXPERIMENTS / "h31_large_girth.yaml"),
]


@pytest.mark.criterion(5, "large-girth learner exact recovery >= 0.8 over 50 trials per family")
@pytest.mark.parametrize("spec", CRITERION5, ids=[s.name for s in CRITERION5])
def test_criterion_5_large_girth_recovery(spec, record_property):
    assert spec.trials >= 50 and spec.learner.delta_fail == 0.2 and spec.learner.m_override is None
    report = run_experiment(spec)
    detail(record_property, f"{spec.name}: rate {report.exact_rate:.2f}")
    assert all(t.certified for t in report.trials)
    assert all(t.queries_used == t.n * t.rounds_per_vertex for t in report.trials)
    assert report.exact_rate >= 1 - spec.learner.delta_fail


# ---------------------------------------------------------------- 6

CRITERION6 = [
    ExperimentSpec(graph=GraphFamilySpec("cycle", n=5), learner=LearnerSpec("bounded_degree", 0.2, max_degree=2),
                   trials=50, master_seed=6, name="c5_bounded_degree"),
    load_spec(EXPERIMENTS / "regular3_bounded_degree.yaml"),
]


@pytest.mark.criterion(6, "bounded-degree learner exact recovery >= 0.8 and precision 1 in every trial")
@pytest.mark.parametrize("spec", CRITERION6, ids=[s.name for s in CRITERION6])
def test_criterion_6_bounded_degree_recovery(spec, record_property):
    assert spec.trials >= 50 and spec.learner.delta_fail == 0.2
    assert (spec.graph.p_lo, spec.graph.p_hi) == (0.45, 0.55)
    report = run_experiment(spec)
    for t in report.trials:
        _, g = trial_graph(spec, t.trial)
        cfg = LearnerConfig(delta_lb=g.delta, delta_fail=0.2)
        assert t.rounds_per_vertex == rounds_for_bounded_degree(g.n, cfg, spec.learner.max_degree)
        assert t.rounds_per_vertex == math.ceil(math.log(g.n**2 / 0.2) / g.delta ** (2 * spec.learner.max_degree))
    detail(record_property, f"{spec.name}: rate {report.exact_rate:.2f}, "
                            f"min precision {min(t.precision for t in report.trials)}")
    assert all(t.precision == 1.0 for t in report.trials)
    assert report.exact_rate >= 0.8


# ---------------------------------------------------------------- 7

def _nesting_violations(spec, trial):
    """Replay the exact rounds the learner saw in one trial and test nesting in each."""
    _, g = trial_graph(spec, trial)
    oracle = QueryOracle(g, RandomStream(spec.master_seed, context="oracle", index=trial))
    m = rounds_for_tree(g.n, LearnerConfig(delta_lb=oracle.delta, delta_fail=spec.learner.delta_fail))
    violations = checked = 0
    dist = {v: bfs_distances(g, v) for v in range(g.n)}
    for u in range(g.n):
        inf = collect_rounds(oracle, u, m).infected
        for v, d in dist[u].items():
            if d < 2:
                continue
            w = next(x for x in g.neighbors(u) if dist[v][x] == d - 1)
            violations += int((inf[:, v] & ~inf[:, w]).sum())
            checked += m
    return violations, checked


@pytest.mark.criterion(7, "tree learner exact recovery >= 0.9 and nesting in 100% of rounds")
@pytest.mark.parametrize("n", [10, 30])
def test_criterion_7_tree_baseline(n, record_property):
    spec = ExperimentSpec(graph=GraphFamilySpec("tree", n=n), learner=LearnerSpec("tree_ahk", delta_fail=0.1),
                          trials=100, master_seed=70 + n, name=f"trees{n}_ahk")
    report = run_experiment(spec)
    violations = checked = 0
    for t in range(spec.trials):
        a, b = _nesting_violations(spec, t)
        violations += a
        checked += b
    detail(record_property, f"n={n}: rate {report.exact_rate:.2f}, nesting violations {violations}/{checked}")
    assert report.exact_rate >= 0.9
    assert violations == 0 and checked > 0


# ---------------------------------------------------------------- 8

@pytest.mark.criterion(8, "oracle micro-checks: edge 0.3 +- 0.01 and triangle singleton 0.25 +- 0.01")
def test_criterion_8_micro_oracle(record_property):
    trials = 100_000
    edge = QueryOracle(ContagionGraph(2, [(0, 1, 0.3)]), RandomStream(8, context="acceptance-edge"))
    f_edge = sum(len(edge.query([0])) == 2 for _ in range(trials)) / trials
    tri_graph = ContagionGraph(3, [(0, 1, 0.5), (0, 2, 0.5), (1, 2, 0.5)])
    exact = exact_infection_distribution(tri_graph, [0])[frozenset({0})]
    tri = QueryOracle(tri_graph, RandomStream(8, context="acceptance-triangle"))
    f_tri = sum(tri.query([0]) == frozenset({0}) for _ in range(trials)) / trials
    detail(record_property, f"edge {f_edge:.4f}, triangle singleton {f_tri:.4f} (exact {exact})")
    assert exact == pytest.approx(0.25)
    assert abs(f_edge - 0.3) <= 0.01
    assert abs(f_tri - exact) <= 0.01
    assert edge.queries_used() == tri.queries_used() == trials


# ---------------------------------------------------------------- 9

@pytest.mark.criterion(9, "identical spec and master seed give byte-identical CSV/JSON")
def test_criterion_9_determinism(tmp_path, record_property):
    specs = [load_spec(p) for p in sorted(EXPERIMENTS.glob("*.yaml")) + sorted(EXPERIMENTS.glob("*.json"))]
    # Keep the runtime modest: the byte comparison does not need every trial.
    specs = [replace(s, trials=min(s.trials, 3)) for s in specs]
    for spec in specs:
        first = write_reports(run_experiment(spec), tmp_path / "first")
        second = write_reports(run_experiment(spec, jobs=2), tmp_path / "second")
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes(), a.name
    detail(record_property, f"{len(specs)} shipped specs, serial vs parallel reruns identical")
