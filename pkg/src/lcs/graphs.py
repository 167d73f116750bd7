"""Mixed graphs (DAGs, MAGs, PAGs) and their separation machinery.

A mixed graph stores at most one edge per node pair, with a mark (tail,
arrow, circle) at each endpoint.  Directed edges are tail->arrow,
bidirected edges arrow<->arrow.  Graphs are treated as immutable after
construction: every query below is pure.
"""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Iterable, Sequence


class Mark(Enum):
    TAIL = "tail"
    ARROW = "arrow"
    CIRCLE = "circle"


class GraphKind(Enum):
    DAG = "dag"
    MAG = "mag"
    PAG = "pag"


@dataclass(frozen=True)
class Edge:
    a: str
    b: str
    mark_a: Mark
    mark_b: Mark


class PathKind(Enum):
    DIRECTED = "directed"
    POSSIBLY_DIRECTED = "possibly_directed"
    COLLIDER = "collider"
    ARROW_COLLIDER = "arrow_collider"


class GraphError(ValueError):
    pass


class MixedGraph:
    """Node-labelled mixed graph with per-endpoint edge marks.

    ``mark(u, v)`` is the mark at the ``v`` end of the edge between u and
    v.  A directed edge u -> v is ``mark(v, u) == TAIL, mark(u, v) ==
    ARROW``.
    """

    def __init__(self, nodes: Iterable[str], kind: GraphKind = GraphKind.DAG):
        self.kind = kind
        self.nodes: list[str] = list(nodes)
        if len(set(self.nodes)) != len(self.nodes):
            raise GraphError("duplicate node labels")
        self._index = {v: i for i, v in enumerate(self.nodes)}
        # _marks[(u, v)] = mark at the v end of edge u—v; symmetric keys.
        self._marks: dict[tuple[str, str], Mark] = {}
        self._adj: dict[str, set[str]] = {v: set() for v in self.nodes}
        self._anc_cache: dict[str, frozenset] = {}

    # -- construction ----------------------------------------------------

    def add_edge(self, a: str, b: str, mark_a: Mark, mark_b: Mark) -> None:
        if a not in self._index or b not in self._index:
            raise GraphError(f"unknown node in edge ({a}, {b})")
        if a == b:
            raise GraphError(f"self loop at {a}")
        if b in self._adj[a]:
            raise GraphError(f"multi-edge between {a} and {b}")
        self._adj[a].add(b)
        self._adj[b].add(a)
        self._marks[(a, b)] = mark_b
        self._marks[(b, a)] = mark_a
        self._anc_cache.clear()

    def add_directed(self, a: str, b: str) -> None:
        self.add_edge(a, b, Mark.TAIL, Mark.ARROW)

    def add_bidirected(self, a: str, b: str) -> None:
        self.add_edge(a, b, Mark.ARROW, Mark.ARROW)

    def copy(self, kind: GraphKind | None = None) -> "MixedGraph":
        g = MixedGraph(self.nodes, kind or self.kind)
        g._marks = dict(self._marks)
        g._adj = {v: set(s) for v, s in self._adj.items()}
        return g

    # -- basic queries ---------------------------------------------------

    def has_node(self, v: str) -> bool:
        return v in self._index

    def adjacent(self, a: str, b: str) -> bool:
        return b in self._adj[a]

    def neighbors(self, v: str) -> set[str]:
        return set(self._adj[v])

    def mark(self, u: str, v: str) -> Mark:
        """Mark at the v end of the u—v edge."""
        return self._marks[(u, v)]

    def edges(self) -> list[Edge]:
        seen = set()
        out = []
        for (a, b), mb in self._marks.items():
            key = frozenset((a, b))
            if key in seen:
                continue
            seen.add(key)
            out.append(Edge(a, b, self._marks[(b, a)], mb))
        return out

    def n_edges(self) -> int:
        return len(self._marks) // 2

    def is_directed_edge(self, a: str, b: str) -> bool:
        """True iff a -> b (tail at a, arrow at b)."""
        return (
            self.adjacent(a, b)
            and self._marks[(b, a)] is Mark.TAIL
            and self._marks[(a, b)] is Mark.ARROW
        )

    def parents(self, v: str) -> set[str]:
        return {u for u in self._adj[v] if self.is_directed_edge(u, v)}

    def children(self, v: str) -> set[str]:
        return {u for u in self._adj[v] if self.is_directed_edge(v, u)}

    def spouses(self, v: str) -> set[str]:
        return {
            u
            for u in self._adj[v]
            if self._marks[(u, v)] is Mark.ARROW and self._marks[(v, u)] is Mark.ARROW
        }

    def same_structure(self, other: "MixedGraph") -> bool:
        return set(self.nodes) == set(other.nodes) and self._marks == other._marks

    def __repr__(self) -> str:
        parts = []
        glyph = {Mark.TAIL: "-", Mark.ARROW: ">", Mark.CIRCLE: "o"}
        for e in sorted(self.edges(), key=lambda e: (e.a, e.b)):
            parts.append(f"{e.a} {glyph[e.mark_a]}-{glyph[e.mark_b]} {e.b}")
        return f"MixedGraph({self.kind.value}; " + ", ".join(parts) + ")"


# -- reachability ---------------------------------------------------------


def _check_node(graph: MixedGraph, v: str) -> None:
    if not graph.has_node(v):
        raise GraphError(f"unknown node {v!r}")


def descendants(graph: MixedGraph, v: str) -> set[str]:
    """Reflexive transitive closure along directed edges (v included)."""
    _check_node(graph, v)
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in graph.neighbors(u):
            if w not in seen and graph.is_directed_edge(u, w):
                seen.add(w)
                stack.append(w)
    return seen


def ancestors(graph: MixedGraph, v: str) -> set[str]:
    """Reflexive transitive closure along reversed directed edges."""
    _check_node(graph, v)
    cached = graph._anc_cache.get(v)
    if cached is not None:
        return set(cached)
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in graph.neighbors(u):
            if w not in seen and graph.is_directed_edge(w, u):
                seen.add(w)
                stack.append(w)
    graph._anc_cache[v] = frozenset(seen)
    return seen


def ancestors_of_set(graph: MixedGraph, vs: Iterable[str]) -> set[str]:
    out: set[str] = set()
    for v in vs:
        out |= ancestors(graph, v)
    return out


def possible_descendants(graph: MixedGraph, v: str) -> set[str]:
    """Nodes reachable from v along edges without an arrowhead at the near end."""
    _check_node(graph, v)
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in graph.neighbors(u):
            if w not in seen and graph.mark(w, u) is not Mark.ARROW:
                seen.add(w)
                stack.append(w)
    return seen


def district(graph: MixedGraph, v: str) -> set[str]:
    """Nodes reachable from v via bidirected edges only, v excluded."""
    _check_node(graph, v)
    seen = {v}
    stack = [v]
    while stack:
        u = stack.pop()
        for w in graph.spouses(u):
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen - {v}


# -- m-separation ---------------------------------------------------------


def m_separated(graph: MixedGraph, x: str, y: str, z: Iterable[str]) -> bool:
    """True iff no m-connecting path joins x and y given z.

    Reachability formulation: a walk may pass through a node w iff w acts
    there as a collider with an ancestor... strictly, a collider whose
    descendants meet z, or as a non-collider outside z.
    """
    zset = frozenset(z)
    _check_node(graph, x)
    _check_node(graph, y)
    if x == y or x in zset or y in zset:
        raise GraphError("x, y and z must be disjoint")
    # nodes whose descendants meet z (i.e. ancestors of z, reflexive)
    open_colliders = ancestors_of_set(graph, zset)
    # state: (node, mark at node on the edge we arrived by); None = start
    start = [(w, graph.mark(x, w)) for w in graph.neighbors(x)]
    seen = set(start)
    queue = deque(start)
    while queue:
        u, in_mark = queue.popleft()
        if u == y:
            return False
        for w in graph.neighbors(u):
            out_mark = graph.mark(w, u)  # mark at u on edge u—w
            is_collider = in_mark is Mark.ARROW and out_mark is Mark.ARROW
            if is_collider:
                if u not in open_colliders:
                    continue
            else:
                if u in zset:
                    continue
            state = (w, graph.mark(u, w))
            if state not in seen:
                seen.add(state)
                queue.append(state)
    return True


def markov_blanket_mag(graph: MixedGraph, v: str) -> set[str]:
    """Markov blanket of v in a MAG.

    Parents, children and children's parents of v, v's district, the
    districts of v's children, and the parents of every district member.
    """
    _check_node(graph, v)
    if graph.kind is GraphKind.PAG:
        raise GraphError("markov_blanket_mag requires a DAG or MAG")
    mb = graph.parents(v) | graph.children(v)
    for c in graph.children(v):
        mb |= graph.parents(c)
    dis = district(graph, v)
    for c in graph.children(v):
        dis |= district(graph, c) | {c}
    mb |= dis
    for u in dis:
        mb |= graph.parents(u)
    mb.discard(v)
    return mb


# -- path classification ---------------------------------------------------


def classify_path(graph: MixedGraph, path: Sequence[str]) -> set[PathKind]:
    """All PathKind labels the node sequence satisfies.

    Requires consecutive nodes to be adjacent and all nodes distinct.  A
    single edge counts as directed/possibly-directed when oriented, and as
    an arrow-collider path when its first mark points into the start node;
    the plain collider label is reserved for paths with interior nodes.
    """
    if len(path) < 2:
        raise GraphError("path needs at least two nodes")
    if len(set(path)) != len(path):
        raise GraphError("path nodes must be distinct")
    for a, b in zip(path, path[1:]):
        if not graph.adjacent(a, b):
            raise GraphError(f"{a} and {b} are not adjacent")
    kinds: set[PathKind] = set()
    if all(graph.is_directed_edge(a, b) for a, b in zip(path, path[1:])):
        kinds.add(PathKind.DIRECTED)
    if all(graph.mark(b, a) is not Mark.ARROW for a, b in zip(path, path[1:])):
        kinds.add(PathKind.POSSIBLY_DIRECTED)
    interior_colliders = all(
        graph.mark(path[i - 1], path[i]) is Mark.ARROW
        and graph.mark(path[i + 1], path[i]) is Mark.ARROW
        for i in range(1, len(path) - 1)
    )
    if interior_colliders and len(path) > 2:
        kinds.add(PathKind.COLLIDER)
    if interior_colliders and graph.mark(path[1], path[0]) is Mark.ARROW:
        kinds.add(PathKind.ARROW_COLLIDER)
    return kinds


# -- validation ------------------------------------------------------------


def _directed_cycle(graph: MixedGraph) -> bool:
    return any(u in descendants(graph, w) for u in graph.nodes for w in graph.children(u))


def _almost_directed_cycle(graph: MixedGraph) -> bool:
    for u in graph.nodes:
        for w in graph.spouses(u):
            if w in descendants(graph, u) - {u}:
                return True
    return False


def has_inducing_path(
    graph: MixedGraph, a: str, b: str, latents: frozenset[str] = frozenset()
) -> bool:
    """Inducing path between a and b relative to ``latents``.

    Every interior node is a collider or latent, and every interior
    collider is an ancestor of a or b.
    """
    anc_ok = ancestors(graph, a) | ancestors(graph, b)
    # DFS over simple paths; a node is validated as interior when passed through
    stack = [(w, graph.mark(a, w), frozenset({a, w})) for w in graph.neighbors(a)]
    while stack:
        u, in_mark, visited = stack.pop()
        if u == b:
            return True
        for w in graph.neighbors(u):
            if w in visited:
                continue
            out_mark = graph.mark(w, u)
            collider = in_mark is Mark.ARROW and out_mark is Mark.ARROW
            if u in latents or (collider and u in anc_ok):
                stack.append((w, graph.mark(u, w), visited | {w}))
    return False


def validate(graph: MixedGraph) -> list[str]:
    """Diagnostic report of kind-invariant violations; empty iff valid."""
    report: list[str] = []
    kind = graph.kind
    if kind in (GraphKind.DAG, GraphKind.MAG):
        for e in graph.edges():
            if Mark.CIRCLE in (e.mark_a, e.mark_b):
                report.append(f"illegal circle mark on {e.a}—{e.b}")
    if kind is GraphKind.DAG:
        for e in graph.edges():
            if {e.mark_a, e.mark_b} != {Mark.TAIL, Mark.ARROW}:
                report.append(f"non-directed edge {e.a}—{e.b} in DAG")
    if kind in (GraphKind.DAG, GraphKind.MAG) and _directed_cycle(graph):
        report.append("directed cycle")
    if kind is GraphKind.MAG:
        if _almost_directed_cycle(graph):
            report.append("almost directed cycle")
        for a, b in combinations(graph.nodes, 2):
            if not graph.adjacent(a, b) and has_inducing_path(graph, a, b):
                report.append(f"non-maximal: inducing path between {a} and {b}")
    return report


# -- JSON interchange -------------------------------------------------------


def graph_to_json(graph: MixedGraph) -> str:
    payload = {
        "kind": graph.kind.value,
        "nodes": list(graph.nodes),
        "edges": [
            {"a": e.a, "b": e.b, "mark_a": e.mark_a.value, "mark_b": e.mark_b.value}
            for e in sorted(graph.edges(), key=lambda e: (e.a, e.b))
        ],
    }
    return json.dumps(payload, indent=2)


def graph_from_json(text: str) -> MixedGraph:
    payload = json.loads(text)
    try:
        g = MixedGraph(payload["nodes"], GraphKind(payload["kind"]))
        for e in payload["edges"]:
            g.add_edge(e["a"], e["b"], Mark(e["mark_a"]), Mark(e["mark_b"]))
    except (KeyError, ValueError) as exc:
        raise GraphError(f"malformed graph JSON: {exc}") from exc
    return g
