"""Command line front end: run on data, run against a graph oracle, simulate.

Exit codes: 0 success, 2 configuration error, 3 data error.
"""

from __future__ import annotations

import argparse
import json
import sys

from .adjustment import lcs
from .graphs import GraphError, GraphKind, graph_from_json
from .independence import CiEngine, load_dataset_csv
from .projection import latent_project
from .simbench import ExperimentConfig, run_experiment

EXIT_CONFIG = 2
EXIT_DATA = 3


def _emit(outcome, runlog, runlog_path) -> None:
    print(json.dumps(outcome.to_json_dict(), sort_keys=True))
    if runlog_path:
        with open(runlog_path, "w", encoding="utf-8") as fh:
            for entry in runlog:
                fh.write(json.dumps(entry, sort_keys=True) + "\n")


def cmd_run(args) -> int:
    try:
        data = load_dataset_csv(args.data)
    except (OSError, ValueError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if args.treatment not in data.columns or args.outcome not in data.columns:
        print("config error: treatment/outcome not in the data header", file=sys.stderr)
        return EXIT_CONFIG
    runlog: list = []
    engine = CiEngine(dataset=data, alpha=args.alpha, log=runlog)
    outcome = lcs(engine, args.treatment, args.outcome, sorted(data.columns))
    _emit(outcome, runlog, args.runlog)
    return 0


def cmd_oracle(args) -> int:
    try:
        with open(args.graph, "r", encoding="utf-8") as fh:
            graph = graph_from_json(fh.read())
    except (OSError, GraphError, json.JSONDecodeError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    if graph.kind is GraphKind.DAG and args.latents:
        graph = latent_project(graph, set(args.latents.split(",")))
    if not (graph.has_node(args.treatment) and graph.has_node(args.outcome)):
        print("config error: treatment/outcome not in the graph", file=sys.stderr)
        return EXIT_CONFIG
    runlog: list = []
    engine = CiEngine(graph=graph, log=runlog)
    outcome = lcs(engine, args.treatment, args.outcome, sorted(graph.nodes))
    _emit(outcome, runlog, args.runlog)
    return 0


def cmd_simulate(args) -> int:
    try:
        config = ExperimentConfig(
            n_nodes=args.nodes,
            avg_degree=args.degree,
            latent_fraction=args.latent_frac,
            n_samples=args.samples,
            n_reps=args.reps,
            alpha=args.alpha,
            seed=args.seed,
            methods=tuple(args.methods.split(",")),
        )
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    _, summary = run_experiment(config, out_dir=args.out)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lcs",
        description="Local covariate selection for causal effect estimation.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="analyse a CSV dataset")
    p_run.add_argument("--data", required=True)
    p_run.add_argument("--treatment", required=True)
    p_run.add_argument("--outcome", required=True)
    p_run.add_argument("--alpha", type=float, default=0.05)
    p_run.add_argument("--runlog", default=None)
    p_run.set_defaults(func=cmd_run)

    p_oracle = sub.add_parser("oracle", help="analyse a graph with an exact oracle")
    p_oracle.add_argument("--graph", required=True, help="graph JSON file")
    p_oracle.add_argument("--treatment", required=True)
    p_oracle.add_argument("--outcome", required=True)
    p_oracle.add_argument(
        "--latents", default=None, help="comma list, projects a DAG before analysis"
    )
    p_oracle.add_argument("--runlog", default=None)
    p_oracle.set_defaults(func=cmd_oracle)

    p_sim = sub.add_parser("simulate", help="synthetic benchmark")
    p_sim.add_argument("--nodes", type=int, default=20)
    p_sim.add_argument("--degree", type=int, default=3)
    p_sim.add_argument("--latent-frac", type=float, default=0.1)
    p_sim.add_argument("--samples", type=int, default=10000)
    p_sim.add_argument("--reps", type=int, default=100)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--alpha", type=float, default=0.05)
    p_sim.add_argument("--methods", default="lcs")
    p_sim.add_argument("--out", required=True)
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
