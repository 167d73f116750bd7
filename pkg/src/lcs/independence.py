"""Conditional-independence engines: graph oracle and Fisher-z on data.

Every answered query bumps a monotone counter, which is the nTests
metric reported by the search algorithms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np
from scipy.stats import norm

from .graphs import GraphError, MixedGraph, m_separated


@dataclass
class Dataset:
    columns: list[str]
    rows: np.ndarray  # shape (n, len(columns))

    def __post_init__(self) -> None:
        self.rows = np.asarray(self.rows, dtype=float)
        if self.rows.ndim != 2 or self.rows.shape[1] != len(self.columns):
            raise ValueError("rows must be an (n, n_columns) matrix")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate column labels")
        if np.isnan(self.rows).any():
            raise ValueError("missing values are not supported")

    @property
    def n(self) -> int:
        return self.rows.shape[0]

    def column_index(self, name: str) -> int:
        try:
            return self.columns.index(name)
        except ValueError:
            raise KeyError(f"unknown variable {name!r}") from None


def load_dataset_csv(path) -> Dataset:
    """CSV with a header row of variable names and a numeric body."""
    with open(path, "r", encoding="utf-8") as fh:
        header = fh.readline().strip()
        if not header:
            raise ValueError(f"{path}: empty file")
        columns = [c.strip() for c in header.split(",")]
        body = np.loadtxt(fh, delimiter=",", ndmin=2)
    return Dataset(columns, body)


def save_dataset_csv(dataset: Dataset, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(dataset.columns) + "\n")
        np.savetxt(fh, dataset.rows, delimiter=",", fmt="%.10g")


@dataclass(frozen=True)
class CiQuery:
    x: str
    y: str
    z: frozenset

    def __post_init__(self) -> None:
        if self.x == self.y or self.x in self.z or self.y in self.z:
            raise ValueError("x, y and z must be disjoint")


class CiEngine:
    """Answers CI queries and counts them.

    Exactly one backend is active: either a graph oracle (m-separation on
    the supplied DAG/MAG) or Fisher-z partial correlation on a dataset.
    One engine per run; the counter is the only mutable state.
    """

    def __init__(
        self,
        graph: Optional[MixedGraph] = None,
        dataset: Optional[Dataset] = None,
        alpha: float = 0.05,
        log: Optional[list] = None,
    ):
        if (graph is None) == (dataset is None):
            raise ValueError("provide exactly one of graph= or dataset=")
        self.graph = graph
        self.dataset = dataset
        self.alpha = alpha
        self.counter = 0
        self.log = log
        self._flagged: list[CiQuery] = []
        if dataset is not None:
            if dataset.n <= len(dataset.columns) + 3:
                raise ValueError("Fisher-z needs n > n_columns + 3 samples")
            sd = dataset.rows.std(axis=0)
            if np.any(sd == 0):
                bad = [c for c, s in zip(dataset.columns, sd) if s == 0]
                raise ValueError(f"zero-variance columns: {bad}")
            self._corr = np.corrcoef(dataset.rows, rowvar=False)
            self._threshold = norm.ppf(1 - alpha / 2.0)
            self._col_index = {c: i for i, c in enumerate(dataset.columns)}

    @property
    def is_oracle(self) -> bool:
        return self.graph is not None

    def is_independent(self, x: str, y: str, z: Iterable[str]) -> bool:
        query = CiQuery(x, y, frozenset(z))
        if self.graph is not None:
            answer = m_separated(self.graph, x, y, query.z)
        else:
            answer = self._fisher_z(query)
        self.counter += 1
        if self.log is not None:
            self.log.append(
                {
                    "event": "ci_test",
                    "x": x,
                    "y": y,
                    "z": sorted(query.z),
                    "independent": answer,
                }
            )
        return answer

    def _fisher_z(self, query: CiQuery) -> bool:
        ds = self.dataset
        col = self._col_index
        idx = [col[query.x], col[query.y]] + [col[v] for v in sorted(query.z)]
        sub = self._corr[np.ix_(idx, idx)]
        try:
            prec = np.linalg.inv(sub)
            # 1-norm condition estimate; the SVD-exact number is too slow here
            if np.linalg.norm(sub, 1) * np.linalg.norm(prec, 1) > 1e12:
                raise np.linalg.LinAlgError
        except np.linalg.LinAlgError:
            prec = np.linalg.pinv(sub)
            self._flagged.append(query)
            if self.log is not None:
                self.log.append({"event": "ill_conditioned", "x": query.x, "y": query.y})
        r = -prec[0, 1] / math.sqrt(abs(prec[0, 0] * prec[1, 1]))
        r = max(min(r, 1.0 - 1e-12), -1.0 + 1e-12)
        zstat = 0.5 * math.log((1 + r) / (1 - r)) * math.sqrt(ds.n - len(query.z) - 3)
        return abs(zstat) <= self._threshold


def is_independent(engine: CiEngine, x: str, y: str, z: Iterable[str]) -> bool:
    return engine.is_independent(x, y, z)


def test_count(engine: CiEngine) -> int:
    return engine.counter


def reset_count(engine: CiEngine) -> None:
    engine.counter = 0
