"""Effect computation: adjusted OLS, linear-SCM ground truth, relative error."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import GraphError, GraphKind, MixedGraph, validate
from .independence import Dataset


@dataclass
class ScmSpec:
    """Linear-Gaussian structural model: a DAG, edge weights, noise scales."""

    dag: MixedGraph
    weights: dict  # (parent, child) -> coefficient
    noise_sd: dict  # node -> positive scale
    latents: frozenset = field(default_factory=frozenset)

    def __post_init__(self) -> None:
        edges = {
            (e.a, e.b) if self.dag.is_directed_edge(e.a, e.b) else (e.b, e.a)
            for e in self.dag.edges()
        }
        if set(self.weights) != edges:
            raise GraphError("weights must cover exactly the DAG's edges")
        if any(sd <= 0 for sd in self.noise_sd.values()):
            raise GraphError("noise scales must be positive")


def topological_order(dag: MixedGraph) -> list[str]:
    indeg = {v: len(dag.parents(v)) for v in dag.nodes}
    ready = sorted(v for v, d in indeg.items() if d == 0)
    order = []
    while ready:
        v = ready.pop(0)
        order.append(v)
        for c in sorted(dag.children(v)):
            indeg[c] -= 1
            if indeg[c] == 0:
                ready.append(c)
        ready.sort()
    if len(order) != len(dag.nodes):
        raise GraphError("graph has a directed cycle")
    return order


def true_effect(scm: ScmSpec, x: str, y: str) -> float:
    """Total linear effect of x on y: sum over directed paths of weight products."""
    from .graphs import descendants

    if y not in descendants(scm.dag, x):
        return 0.0
    nodes = scm.dag.nodes
    idx = {v: i for i, v in enumerate(nodes)}
    w = np.zeros((len(nodes), len(nodes)))
    for (a, b), coef in scm.weights.items():
        w[idx[a], idx[b]] = coef
    total = np.linalg.inv(np.eye(len(nodes)) - w)
    return float(total[idx[x], idx[y]])


def estimate_effect_ols(data: Dataset, x: str, y: str, z: list[str]) -> float:
    """Coefficient of x in the least-squares regression of y on {x} u z."""
    z = sorted(z)
    if data.n <= len(z) + 2:
        raise ValueError("not enough samples for the requested adjustment")
    cols = [x] + z
    design = np.column_stack(
        [np.ones(data.n)] + [data.rows[:, data.column_index(c)] for c in cols]
    )
    target = data.rows[:, data.column_index(y)]
    coef, _, rank, _ = np.linalg.lstsq(design, target, rcond=None)
    if rank < design.shape[1]:
        raise ValueError(f"rank-deficient design over columns {[y] + cols}")
    return float(coef[1])


def relative_error(estimate: float, truth: float) -> float:
    """|estimate - truth| / |truth| as a percentage; truth must be nonzero."""
    if truth == 0:
        raise ValueError("relative error is undefined for zero truth")
    return abs((estimate - truth) / truth) * 100.0


def scm_covariance(scm: ScmSpec) -> tuple[list[str], np.ndarray]:
    """Analytic covariance of all SCM variables (latents included)."""
    nodes = scm.dag.nodes
    idx = {v: i for i, v in enumerate(nodes)}
    w = np.zeros((len(nodes), len(nodes)))
    for (a, b), coef in scm.weights.items():
        w[idx[a], idx[b]] = coef
    d = np.diag([scm.noise_sd.get(v, 1.0) ** 2 for v in nodes])
    t = np.linalg.inv(np.eye(len(nodes)) - w)
    return list(nodes), t.T @ d @ t
