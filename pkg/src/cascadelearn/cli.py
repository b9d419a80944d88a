"""Command-line entry point.

Machine-readable output goes to the files named by ``--out``; standard
output only carries a short human summary.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from .cascade import simulate_cascade
from .generators import FAMILIES, GraphFamilySpec, certify_for_algorithm1, generate
from .graph import format_edge_list, format_edge_set, read_edge_list
from .learners import LEARNERS, LearnerConfig, learn_bounded_degree, rounds_per_vertex
from .experiment import load_spec, precision_recall, run_experiment, write_reports
from .oracle import QueryOracle
from .rng import RandomStream
from .verification import (
    check_lemma2,
    check_lemma3,
    check_lemma4,
    check_lemma5,
    reports_to_csv,
)


def _write(path: str | Path, text: str) -> Path:
    p = Path(path)
    p.parent.mkdir(parents=True, exist_ok=True)
    p.write_text(text)
    return p


def cmd_generate(args: argparse.Namespace) -> int:
    spec = GraphFamilySpec(family=args.family, n=args.n, p_lo=args.p_lo, p_hi=args.p_hi,
                           seed=args.seed, degree=args.degree, lengths=tuple(args.lengths or ()),
                           edge_prob=args.edge_prob)
    g = generate(spec)
    _write(args.out, format_edge_list(g))
    print(f"wrote {args.family} graph with n={g.n} m={g.m} to {args.out}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    g = read_edge_list(args.graph)
    cert = certify_for_algorithm1(g, args.delta, budget=args.budget)
    info = cert.to_dict()
    if args.out:
        _write(args.out, json.dumps(info, indent=2, sort_keys=True) + "\n")
    print(f"n={g.n} m={g.m} girth={cert.girth} rho={cert.rho:.12g} "
          f"(d={cert.rho_witness_d}, p_d={cert.rho_witness_count}) delta={cert.delta:.6g} "
          f"max_degree={cert.max_degree} required_girth={cert.required_girth} "
          f"certified={'yes' if cert.passed else 'no'}")
    return 0


def cmd_simulate(args: argparse.Namespace) -> int:
    g = read_edge_list(args.graph)
    base = RandomStream(args.seed, context="simulate")
    rounds = []
    trace = []
    for i in range(args.rounds):
        out = simulate_cascade(g, args.seeds, base.substream(index=i))
        rounds.append({
            "round": i,
            "infected": sorted(out.infected),
            "infection_step": {str(k): v for k, v in sorted(out.infection_step.items())},
            "active_edges": [list(e) for e in out.active_edges],
        })
        trace.append(f"# round {i}")
        trace.extend(out.trace_lines())
    _write(args.out, json.dumps({"seeds": sorted(set(args.seeds)), "rounds": rounds}, indent=2) + "\n")
    if args.trace:
        _write(args.trace, "\n".join(trace) + "\n")
    mean = sum(len(r["infected"]) for r in rounds) / max(len(rounds), 1)
    print(f"{args.rounds} cascade(s) from {sorted(set(args.seeds))}: mean infected {mean:.3f}")
    return 0


def cmd_learn(args: argparse.Namespace) -> int:
    g = read_edge_list(args.graph)
    oracle = QueryOracle(g, RandomStream(args.seed, context="learn"), delta=args.delta_lb)
    config = LearnerConfig(delta_lb=oracle.delta, delta_fail=args.delta_fail,
                           m_override=args.m, chernoff_constant=args.chernoff_constant)
    if args.learner == "bounded_degree":
        if args.max_degree is None:
            raise SystemExit("bounded_degree needs --max-degree")
        predicted = learn_bounded_degree(oracle, config, args.max_degree)
    else:
        predicted = LEARNERS[args.learner](oracle, config)
    m = rounds_per_vertex(args.learner, g.n, config, args.max_degree)
    truth = g.edge_set()
    precision, recall = precision_recall(predicted, truth)
    out = Path(args.out)
    _write(out / "edges.txt", format_edge_set(g.n, predicted))
    report = {
        "learner": args.learner, "n": g.n, "rounds_per_vertex": m,
        "queries_used": oracle.queries_used(), "predicted_edges": [list(e) for e in sorted(predicted)],
        "precision": precision, "recall": recall, "exact": predicted == truth,
    }
    _write(out / "report.json", json.dumps(report, indent=2, sort_keys=True) + "\n")
    print(f"{args.learner}: {len(predicted)} edges, precision {precision:.4f}, recall {recall:.4f}, "
          f"exact={'yes' if predicted == truth else 'no'}, queries {oracle.queries_used()}")
    return 0


def cmd_verify(args: argparse.Namespace) -> int:
    g = read_edge_list(args.graph)
    stream = RandomStream(args.seed, context="verify-cli")
    lemma, u, v = args.lemma, args.u, args.v
    if lemma == 2:
        if args.k is None:
            raise SystemExit("lemma 2 needs --k")
        report = check_lemma2(g, u, v, args.k, args.trials, stream)
    elif lemma == 3:
        if args.w is None:
            raise SystemExit("lemma 3 needs --w")
        report = check_lemma3(g, u, v, args.w, args.trials, stream)
    elif lemma == 4:
        report = check_lemma4(g, u, v, args.trials, stream)
    else:
        report = check_lemma5(g, u, v, args.trials, stream)
    out = Path(args.out)
    _write(out / "checks.jsonl", report.to_json() + "\n")
    _write(out / "checks.csv", reports_to_csv([report]))
    print(f"{report.lemma} {report.vertices}: estimate {report.estimate:.5f} +- {report.std_error:.5f} "
          f"vs {report.kind} bound {report.bound:.5f} -> {report.verdict}"
          + ("" if report.in_scope else " (outside guarantee scope)"))
    return 0 if report.ok else 3


def cmd_experiment(args: argparse.Namespace) -> int:
    spec = load_spec(args.config)
    changes = {}
    if args.seed is not None:
        changes["master_seed"] = args.seed
    if args.jobs is not None:
        changes["jobs"] = args.jobs
    if changes:
        spec = replace(spec, **changes)
    report = run_experiment(spec)
    paths = write_reports(report, args.out)
    print(report.summary())
    print("reports: " + ", ".join(map(str, paths)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cascadelearn",
        description="Generate contagion graphs, simulate cascades, learn edges from queries and check bounds.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a generated graph as an edge list")
    p.add_argument("family", choices=FAMILIES)
    p.add_argument("--n", type=int, default=0)
    p.add_argument("--p-lo", type=float, default=0.45)
    p.add_argument("--p-hi", type=float, default=0.55)
    p.add_argument("--degree", type=int)
    p.add_argument("--lengths", type=int, nargs="+")
    p.add_argument("--edge-prob", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("analyze", help="girth, path growth rate and certification of an edge list")
    p.add_argument("graph")
    p.add_argument("--delta", type=float, help="contagion parameter (default: from the graph)")
    p.add_argument("--budget", type=int, default=10**8, help="path enumeration budget")
    p.add_argument("--seed", type=int, default=0, help="unused; accepted for uniformity")
    p.add_argument("--out", help="JSON report path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("simulate", help="run cascades and record outcomes")
    p.add_argument("graph")
    p.add_argument("--seeds", type=int, nargs="*", default=[])
    p.add_argument("--rounds", type=int, default=1)
    p.add_argument("--trace", help="write 't u v' lines per active edge here")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("learn", help="reconstruct an edge list through the query oracle")
    p.add_argument("graph")
    p.add_argument("--learner", choices=sorted(LEARNERS), default="large_girth")
    p.add_argument("--delta-fail", type=float, default=0.1)
    p.add_argument("--delta-lb", type=float)
    p.add_argument("--m", type=int, help="rounds per vertex (overrides the default rule)")
    p.add_argument("--chernoff-constant", type=float, default=32.0)
    p.add_argument("--max-degree", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("verify", help="Monte Carlo check of one probability bound")
    p.add_argument("graph")
    p.add_argument("--lemma", type=int, choices=(2, 3, 4, 5), required=True)
    p.add_argument("--u", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--w", type=int)
    p.add_argument("--k", type=int)
    p.add_argument("--trials", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("experiment", help="run an experiment spec file (YAML or JSON)")
    p.add_argument("config")
    p.add_argument("--seed", type=int, help="override master_seed")
    p.add_argument("--jobs", type=int)
    p.add_argument("--out", help="output directory (overrides the spec's paths)")
    p.set_defaults(func=cmd_experiment)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
