"""Synthetic benchmark: random linear-Gaussian instances and the experiment loop.

Instances follow the usual recipe: an Erdos-Renyi DAG over a random
topological order, uniform edge weights on [0.5, 1.5], standard Gaussian
noise, latents drawn among nodes with at least two children, and a random
ordered target pair.  Per-rep RNG streams come from a counter-based
Philox generator, so serial and parallel execution agree.
"""

from __future__ import annotations

import csv
import json
import time
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np

from .adjustment import CASE_IDENTIFIABLE, LcsOutcome, ehs_baseline, lcs
from .estimation import ScmSpec, relative_error, topological_order, true_effect
from .graphs import GraphKind, MixedGraph
from .independence import CiEngine, Dataset
from .projection import latent_project


@dataclass
class ExperimentConfig:
    n_nodes: int = 20
    avg_degree: int = 3
    latent_fraction: float = 0.1
    n_samples: int = 10000  # 0 switches the engines to the graph oracle
    n_reps: int = 100
    alpha: float = 0.05
    seed: int = 0
    methods: tuple = ("lcs",)
    ehs_max_tests: int = 20000
    # byte-identical outputs under a fixed seed need wall time left out
    measure_runtime: bool = False

    def __post_init__(self) -> None:
        if self.n_nodes < 4 or self.n_reps < 1 or self.avg_degree < 1:
            raise ValueError("need n_nodes >= 4, n_reps >= 1, avg_degree >= 1")
        if not 0 <= self.latent_fraction <= 1:
            raise ValueError("latent_fraction must lie in [0, 1]")
        unknown = set(self.methods) - {"lcs", "ehs"}
        if unknown:
            raise ValueError(f"unknown methods: {sorted(unknown)}")


@dataclass
class RepResult:
    rep: int
    method: str
    case: str
    rule: str
    re: Optional[float]
    n_tests: int
    runtime_ms: int
    error: Optional[str] = None


def _rng(seed_or_rng) -> np.random.Generator:
    if isinstance(seed_or_rng, np.random.Generator):
        return seed_or_rng
    if not isinstance(seed_or_rng, np.random.SeedSequence):
        seed_or_rng = np.random.SeedSequence(seed_or_rng)
    return np.random.Generator(np.random.Philox(seed_or_rng))


def _labels(n: int) -> list[str]:
    width = len(str(n))
    return [f"V{i:0{width}d}" for i in range(1, n + 1)]


def gen_er_dag(n: int, d: float, seed_or_rng) -> MixedGraph:
    """Erdos-Renyi DAG: random topological order, edge probability d/(n-1)."""
    if n < 2 or d >= n:
        raise ValueError("need n >= 2 and d < n")
    rng = _rng(seed_or_rng)
    labels = _labels(n)
    order = [labels[i] for i in rng.permutation(n)]
    p = d / (n - 1)
    g = MixedGraph(labels, GraphKind.DAG)
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < p:
                g.add_directed(order[i], order[j])
    return g


def gen_linear_scm(dag: MixedGraph, seed_or_rng, latents=frozenset()) -> ScmSpec:
    """Uniform [0.5, 1.5] edge weights, unit Gaussian noise."""
    rng = _rng(seed_or_rng)
    weights = {}
    for e in sorted(dag.edges(), key=lambda e: (e.a, e.b)):
        a, b = (e.a, e.b) if dag.is_directed_edge(e.a, e.b) else (e.b, e.a)
        weights[(a, b)] = float(rng.uniform(0.5, 1.5))
    noise = {v: 1.0 for v in dag.nodes}
    return ScmSpec(dag, weights, noise, frozenset(latents))


def choose_latents(dag: MixedGraph, k: int, seed_or_rng) -> frozenset:
    """Uniform k-subset of the nodes with at least two children."""
    rng = _rng(seed_or_rng)
    eligible = sorted(v for v in dag.nodes if len(dag.children(v)) >= 2)
    if k > len(eligible):
        warnings.warn(
            f"only {len(eligible)} nodes have two children; requested {k} latents"
        )
        return frozenset(eligible)
    if k == 0:
        return frozenset()
    picks = rng.choice(len(eligible), size=k, replace=False)
    return frozenset(eligible[i] for i in sorted(picks))


def sample(scm: ScmSpec, n_samples: int, seed_or_rng) -> Dataset:
    """Ancestral sampling; latent columns are dropped from the output."""
    rng = _rng(seed_or_rng)
    order = topological_order(scm.dag)
    values = {}
    for v in order:
        col = scm.noise_sd[v] * rng.standard_normal(n_samples)
        for p in sorted(scm.dag.parents(v)):
            col = col + scm.weights[(p, v)] * values[p]
        values[v] = col
    observed = [v for v in scm.dag.nodes if v not in scm.latents]
    return Dataset(observed, np.column_stack([values[v] for v in observed]))


def draw_target_pair(
    dag: MixedGraph, latents: frozenset, seed_or_rng, max_redraws: int = 100
) -> tuple[str, str]:
    rng = _rng(seed_or_rng)
    nodes = list(dag.nodes)
    for _ in range(max_redraws):
        x = nodes[rng.integers(len(nodes))]
        y = nodes[rng.integers(len(nodes))]
        if x != y and x not in latents and y not in latents:
            return x, y
    raise RuntimeError("could not draw an observed target pair")


def gen_instance(config: ExperimentConfig, rep_seed) -> dict:
    """One benchmark instance: graph, latents, SCM, target pair, data/oracle."""
    rng = _rng(rep_seed)
    dag = gen_er_dag(config.n_nodes, config.avg_degree, rng)
    k = round(config.latent_fraction * config.n_nodes)
    latents = choose_latents(dag, k, rng)
    scm = gen_linear_scm(dag, rng, latents)
    x, y = draw_target_pair(dag, latents, rng)
    inst = {
        "dag": dag,
        "latents": latents,
        "scm": scm,
        "x": x,
        "y": y,
        "observed": sorted(v for v in dag.nodes if v not in latents),
        "truth": true_effect(scm, x, y),
    }
    if config.n_samples > 0:
        inst["dataset"] = sample(scm, config.n_samples, rng)
    else:
        inst["mag"] = latent_project(dag, latents)
    return inst


def make_engine(config: ExperimentConfig, inst: dict, log=None) -> CiEngine:
    if "dataset" in inst:
        return CiEngine(dataset=inst["dataset"], alpha=config.alpha, log=log)
    return CiEngine(graph=inst["mag"], log=log)


def run_method(
    method: str, config: ExperimentConfig, inst: dict, log=None
) -> LcsOutcome:
    engine = make_engine(config, inst, log=log)
    if method == "lcs":
        return lcs(engine, inst["x"], inst["y"], inst["observed"])
    return ehs_baseline(
        engine, inst["x"], inst["y"], inst["observed"], max_tests=config.ehs_max_tests
    )


def run_experiment(
    config: ExperimentConfig, out_dir: Optional[str] = None
) -> tuple[list[RepResult], dict]:
    """Run all reps and methods; optionally write results.csv / summary.json /
    runlog.jsonl under out_dir."""
    children = np.random.SeedSequence(config.seed).spawn(config.n_reps)
    results: list[RepResult] = []
    runlog: list[dict] = []
    for rep in range(config.n_reps):
        try:
            inst = gen_instance(config, children[rep])
        except Exception as exc:  # record and continue
            for method in config.methods:
                results.append(
                    RepResult(rep, method, "error", "none", None, 0, 0, str(exc))
                )
            continue
        runlog.append(
            {
                "event": "instance",
                "rep": rep,
                "x": inst["x"],
                "y": inst["y"],
                "latents": sorted(inst["latents"]),
                "truth": inst["truth"],
            }
        )
        for method in config.methods:
            t0 = time.perf_counter()
            try:
                outcome = run_method(method, config, inst, log=runlog)
            except Exception as exc:
                results.append(
                    RepResult(rep, method, "error", "none", None, 0, 0, str(exc))
                )
                continue
            ms = int((time.perf_counter() - t0) * 1000) if config.measure_runtime else 0
            re = None
            if (
                outcome.case == CASE_IDENTIFIABLE
                and outcome.effect is not None
                and inst["truth"] != 0
            ):
                re = relative_error(outcome.effect, inst["truth"])
            results.append(
                RepResult(rep, method, outcome.case, outcome.rule, re, outcome.n_tests, ms)
            )
            runlog.append(
                {
                    "event": "outcome",
                    "rep": rep,
                    "method": method,
                    "case": outcome.case,
                    "rule": outcome.rule,
                    "adjustment_set": sorted(outcome.adjustment_set)
                    if outcome.adjustment_set is not None
                    else None,
                    "n_tests": outcome.n_tests,
                }
            )
    summary = summarize(config, results)
    if out_dir is not None:
        write_outputs(Path(out_dir), results, summary, runlog)
    return results, summary


def summarize(config: ExperimentConfig, results: list[RepResult]) -> dict:
    summary: dict = {
        "config": {
            "n_nodes": config.n_nodes,
            "avg_degree": config.avg_degree,
            "latent_fraction": config.latent_fraction,
            "n_samples": config.n_samples,
            "n_reps": config.n_reps,
            "alpha": config.alpha,
            "seed": config.seed,
            "methods": list(config.methods),
        },
        "methods": {},
    }
    for method in config.methods:
        rows = [r for r in results if r.method == method]
        res = [r.re for r in rows if r.re is not None]
        cases: dict[str, int] = {}
        for r in rows:
            cases[r.case] = cases.get(r.case, 0) + 1
        summary["methods"][method] = {
            "cases": cases,
            "median_re": float(np.median(res)) if res else None,
            "mean_re": float(np.mean(res)) if res else None,
            "mean_n_tests": float(np.mean([r.n_tests for r in rows])) if rows else None,
            "median_n_tests": float(np.median([r.n_tests for r in rows]))
            if rows
            else None,
        }
    return summary


def write_outputs(
    out_dir: Path, results: list[RepResult], summary: dict, runlog: list[dict]
) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / "results.csv", "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        writer.writerow(["rep", "method", "case", "rule", "re", "n_tests", "runtime_ms", "error"])
        for r in results:
            writer.writerow(
                [
                    r.rep,
                    r.method,
                    r.case,
                    r.rule,
                    "" if r.re is None else f"{r.re:.6f}",
                    r.n_tests,
                    r.runtime_ms,
                    r.error or "",
                ]
            )
    with open(out_dir / "summary.json", "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    with open(out_dir / "runlog.jsonl", "w", encoding="utf-8") as fh:
        for entry in runlog:
            fh.write(json.dumps(entry, sort_keys=True) + "\n")
