"""Bundled demonstration networks.

Each builder returns ``(dag, latents)``: a ground-truth DAG plus the
subset of its nodes treated as unobserved.  They cover the main verdict
shapes: a nonzero effect found by the local two-test search, one that
needs the parent-set rule, zero-effect pairs, and a larger agricultural
time-series model with two hidden variables.
"""

from __future__ import annotations

from .graphs import GraphKind, MixedGraph


def _dag(nodes, edges) -> MixedGraph:
    g = MixedGraph(nodes, GraphKind.DAG)
    for a, b in edges:
        g.add_directed(a, b)
    return g


def two_route_dag() -> tuple[MixedGraph, frozenset]:
    """Treatment with two directed routes to the outcome and two
    possible-parent confounders; covariates downstream of X make the
    blanket of Y useless while a single member of MB(X) adjusts."""
    g = _dag(
        ["X", "Y", "V1", "V2", "V4", "V5", "V6", "V7", "V8"],
        [
            ("X", "V7"),
            ("V7", "V8"),
            ("V8", "Y"),
            ("X", "V1"),
            ("V1", "V2"),
            ("V2", "Y"),
            ("V4", "X"),
            ("V5", "X"),
            ("V5", "V2"),
            ("V6", "V1"),
        ],
    )
    return g, frozenset()


def parent_adjust_dag() -> tuple[MixedGraph, frozenset]:
    """A direct plus mediated effect where the two-test search has no
    usable witness and the parent-set rule returns {V3}."""
    g = _dag(
        ["X", "Y", "V1", "V2", "V3", "V4", "V5", "V6"],
        [
            ("X", "Y"),
            ("X", "V2"),
            ("V2", "Y"),
            ("V3", "X"),
            ("V1", "V3"),
            ("V4", "V3"),
            ("V4", "V5"),
            ("Y", "V5"),
            ("V6", "V2"),
        ],
    )
    return g, frozenset()


def spouse_zero_dag() -> tuple[MixedGraph, frozenset]:
    """Five observed nodes with one hidden common cause of V2 and V3;
    the pairs (V2, V4) and (V2, V3) both have zero effect, detected by
    the two clauses of the zero rule."""
    g = _dag(
        ["V1", "V2", "V3", "V4", "V5", "L"],
        [
            ("V1", "V2"),
            ("V2", "V5"),
            ("V3", "V5"),
            ("V4", "V3"),
            ("V4", "V5"),
            ("L", "V2"),
            ("L", "V3"),
        ],
    )
    return g, frozenset({"L"})


def mildew_dag() -> tuple[MixedGraph, frozenset]:
    """Plant-disease management model over four growth stages.

    Photosynthesis (foto) depends on leaf area (lai), temperature (temp)
    and radiation (straaling); dry matter (dm) accumulates from
    photosynthesis; microclimate (mikro) depends on leaf area, temperature
    and precipitation (nedboer); the mildew attack (meldug) evolves under
    microclimate, fungicide (middel) and leaf area, and damages the leaf
    area; yield (udbytte) closes the chain.  Stage-3 mildew and stage-2
    temperature are unobserved.
    """
    nodes = (
        [f"lai_{i}" for i in range(1, 5)]
        + [f"temp_{i}" for i in range(1, 5)]
        + [f"straaling_{i}" for i in range(1, 5)]
        + [f"foto_{i}" for i in range(1, 5)]
        + [f"dm_{i}" for i in range(1, 5)]
        + [f"mikro_{i}" for i in range(1, 4)]
        + [f"nedboer_{i}" for i in range(1, 4)]
        + [f"meldug_{i}" for i in range(1, 5)]
        + [f"middel_{i}" for i in range(1, 4)]
        + ["udbytte"]
    )
    edges = []
    for i in range(1, 5):
        edges += [
            (f"lai_{i}", f"foto_{i}"),
            (f"temp_{i}", f"foto_{i}"),
            (f"straaling_{i}", f"foto_{i}"),
            (f"foto_{i}", f"dm_{i}"),
        ]
    for i in range(2, 5):
        edges.append((f"dm_{i-1}", f"dm_{i}"))
    for i in range(1, 4):
        edges += [
            (f"lai_{i}", f"mikro_{i}"),
            (f"temp_{i}", f"mikro_{i}"),
            (f"nedboer_{i}", f"mikro_{i}"),
            (f"meldug_{i}", f"meldug_{i+1}"),
            (f"mikro_{i}", f"meldug_{i+1}"),
            (f"middel_{i}", f"meldug_{i+1}"),
        ]
    # mildew feeds on leaf area from stage 2 on and damages the canopy
    edges += [("lai_2", "meldug_3"), ("lai_3", "meldug_4")]
    edges += [("meldug_2", "lai_2"), ("meldug_3", "lai_3"), ("meldug_4", "lai_4")]
    edges += [("lai_1", "lai_2"), ("lai_2", "lai_3"), ("lai_3", "lai_4")]
    edges += [("dm_4", "udbytte"), ("meldug_4", "udbytte")]
    return _dag(nodes, edges), frozenset({"meldug_3", "temp_2"})


DEMO_NETWORKS = {
    "two_route": two_route_dag,
    "parent_adjust": parent_adjust_dag,
    "spouse_zero": spouse_zero_dag,
    "mildew": mildew_dag,
}
