"""Ground-truth constructions: DAG+latents -> MAG, MAG -> PAG, visible edges.

The MAG -> PAG step runs the complete no-selection-bias orientation rule
set (unshielded colliders, R1-R4, R8-R10) against an m-separation oracle
on the input MAG.  The same rule engine, restricted to the sound subset
R1-R4/R8, is reused by the local structure learner.
"""

from __future__ import annotations

from itertools import combinations

from .graphs import (
    GraphError,
    GraphKind,
    Mark,
    MixedGraph,
    ancestors,
    m_separated,
    markov_blanket_mag,
    validate,
)

# -- latent projection ------------------------------------------------------


def projected_adjacent(dag: MixedGraph, a: str, b: str, observed: set[str]) -> bool:
    """Adjacency of a, b in the latent projection over ``observed``.

    Uses the canonical ancestral separator: a and b stay adjacent iff the
    set (An(a) u An(b)) restricted to observed nodes fails to d-separate
    them.
    """
    if dag.adjacent(a, b):
        return True
    sep = (ancestors(dag, a) | ancestors(dag, b)) & observed - {a, b}
    return not m_separated(dag, a, b, sep)


def latent_project(dag: MixedGraph, latents: set[str]) -> MixedGraph:
    """Project a DAG with latent nodes onto its observed MAG."""
    problems = validate(dag)
    if dag.kind is not GraphKind.DAG or problems:
        raise GraphError(f"latent_project needs a valid DAG: {problems}")
    if not latents <= set(dag.nodes):
        raise GraphError("latents must be a subset of the DAG's nodes")
    observed = [v for v in dag.nodes if v not in latents]
    if not observed:
        raise GraphError("no observed nodes left")
    obs_set = set(observed)
    mag = MixedGraph(observed, GraphKind.MAG)
    anc = {v: ancestors(dag, v) for v in observed}
    for a, b in combinations(observed, 2):
        if not projected_adjacent(dag, a, b, obs_set):
            continue
        if a in anc[b]:
            mag.add_directed(a, b)
        elif b in anc[a]:
            mag.add_directed(b, a)
        else:
            mag.add_bidirected(a, b)
    return mag


# -- partial graphs with explicit adjacency knowledge ------------------------

ADJACENT = "adjacent"
NONADJACENT = "nonadjacent"
UNKNOWN = "unknown"


class PartialPag:
    """Working structure for orientation: pair statuses, sepsets and marks.

    In full-graph use every pair is resolved; the local learner leaves
    pairs it cannot decide as UNKNOWN, and the rules only fire on known
    facts.
    """

    def __init__(self, nodes: list[str], on_conflict: str = "raise"):
        self.nodes = list(nodes)
        self.status: dict[frozenset, str] = {}
        self.sepset: dict[frozenset, frozenset] = {}
        self.marks: dict[tuple[str, str], Mark] = {}
        self.adj: dict[str, set[str]] = {v: set() for v in self.nodes}
        self.on_conflict = on_conflict  # "raise" or "keep" (first write wins)
        self.conflicts: list[tuple[str, str, Mark, Mark]] = []

    def ensure_node(self, v: str) -> None:
        if v not in self.adj:
            self.nodes.append(v)
            self.adj[v] = set()

    def pair_status(self, a: str, b: str) -> str:
        return self.status.get(frozenset((a, b)), UNKNOWN)

    def set_adjacent(self, a: str, b: str) -> None:
        self.ensure_node(a)
        self.ensure_node(b)
        self.status[frozenset((a, b))] = ADJACENT
        self.adj[a].add(b)
        self.adj[b].add(a)
        self.marks.setdefault((a, b), Mark.CIRCLE)
        self.marks.setdefault((b, a), Mark.CIRCLE)

    def set_nonadjacent(self, a: str, b: str, sepset: frozenset) -> None:
        self.ensure_node(a)
        self.ensure_node(b)
        key = frozenset((a, b))
        self.status[key] = NONADJACENT
        self.sepset.setdefault(key, sepset)

    def mark(self, u: str, v: str) -> Mark:
        """Mark at the v end of edge u—v."""
        return self.marks[(u, v)]

    def set_mark(self, u: str, v: str, mark: Mark) -> bool:
        """Place a mark at the v end; returns True if anything changed."""
        cur = self.marks[(u, v)]
        if cur is mark:
            return False
        if cur is not Mark.CIRCLE:
            if self.on_conflict == "raise":
                raise GraphError(
                    f"orientation conflict at {v} on edge {u}—{v}: {cur} -> {mark}"
                )
            self.conflicts.append((u, v, cur, mark))
            return False
        self.marks[(u, v)] = mark
        return True

    def known_nonadjacent(self, a: str, b: str) -> bool:
        return self.pair_status(a, b) == NONADJACENT

    def neighbors(self, v: str) -> set[str]:
        return self.adj.get(v, set())

    def to_graph(self, nodes: list[str] | None = None) -> MixedGraph:
        keep = nodes if nodes is not None else self.nodes
        g = MixedGraph(keep, GraphKind.PAG)
        keepset = set(keep)
        done = set()
        for a in keep:
            for b in self.adj.get(a, ()):  # induced edges only
                key = frozenset((a, b))
                if b in keepset and key not in done:
                    done.add(key)
                    g.add_edge(a, b, self.marks[(b, a)], self.marks[(a, b)])
        return g


def orient_colliders(pp: PartialPag) -> bool:
    """Unshielded triple rule: orient a *-> b <-* c when b is outside sepset(a, c)."""
    changed = False
    for b in pp.nodes:
        for a, c in combinations(sorted(pp.neighbors(b)), 2):
            if not pp.known_nonadjacent(a, c):
                continue
            sep = pp.sepset.get(frozenset((a, c)))
            if sep is None or b in sep:
                continue
            changed |= pp.set_mark(a, b, Mark.ARROW)
            changed |= pp.set_mark(c, b, Mark.ARROW)
    return changed


def _rule1(pp: PartialPag) -> bool:
    # a *-> b o-* c, a and c nonadjacent  =>  b -> c
    changed = False
    for b in pp.nodes:
        for a in pp.neighbors(b):
            if pp.mark(a, b) is not Mark.ARROW:
                continue
            for c in pp.neighbors(b):
                if c == a or not pp.known_nonadjacent(a, c):
                    continue
                if pp.mark(c, b) is Mark.CIRCLE:
                    changed |= pp.set_mark(c, b, Mark.TAIL)
                    changed |= pp.set_mark(b, c, Mark.ARROW)
    return changed


def _rule2(pp: PartialPag) -> bool:
    # a -> b *-> c  or  a *-> b -> c, with circle at c on a—c  =>  a *-> c
    changed = False
    for b in pp.nodes:
        for a in pp.neighbors(b):
            for c in pp.neighbors(b):
                if c == a or c not in pp.neighbors(a):
                    continue
                if pp.mark(a, c) is not Mark.CIRCLE:
                    continue
                chain1 = (
                    pp.mark(b, a) is Mark.TAIL
                    and pp.mark(a, b) is Mark.ARROW
                    and pp.mark(b, c) is Mark.ARROW
                )
                chain2 = (
                    pp.mark(a, b) is Mark.ARROW
                    and pp.mark(c, b) is Mark.TAIL
                    and pp.mark(b, c) is Mark.ARROW
                )
                if chain1 or chain2:
                    changed |= pp.set_mark(a, c, Mark.ARROW)
    return changed


def _rule3(pp: PartialPag) -> bool:
    # a *-> b <-* c, a *-o d o-* c, a,c nonadjacent, d *-o b  =>  d *-> b
    changed = False
    for d in pp.nodes:
        for b in pp.neighbors(d):
            if pp.mark(d, b) is not Mark.CIRCLE:
                continue  # mark at b on the d—b edge must be a circle
            for a, c in combinations(sorted(pp.neighbors(b) & pp.neighbors(d)), 2):
                if not pp.known_nonadjacent(a, c):
                    continue
                if pp.mark(a, b) is Mark.ARROW and pp.mark(c, b) is Mark.ARROW:
                    if pp.mark(a, d) is Mark.CIRCLE and pp.mark(c, d) is Mark.CIRCLE:
                        changed |= pp.set_mark(d, b, Mark.ARROW)
    return changed


def _discriminating_paths(pp: PartialPag, b: str, c: str):
    """Yield (d, path) for discriminating paths <d, ..., a, b, c>.

    Interior nodes are colliders on the path and definite parents of c;
    d is known-nonadjacent to c.
    """
    for a in sorted(pp.neighbors(b)):
        if a == c:
            continue
        # a must be a collider on <., a, b> and a parent of c
        if pp.mark(b, a) is not Mark.ARROW:
            continue
        if not (
            a in pp.neighbors(c)
            and pp.mark(c, a) is Mark.TAIL
            and pp.mark(a, c) is Mark.ARROW
        ):
            continue
        stack = [(a, (c, b, a))]
        while stack:
            tip, path = stack.pop()
            for d in sorted(pp.neighbors(tip)):
                if d in path:
                    continue
                if pp.mark(d, tip) is not Mark.ARROW:
                    continue  # tip must be a collider: arrow at tip on both edges
                if pp.known_nonadjacent(d, c):
                    yield d, path + (d,)
                    continue
                # to extend, d itself must be a collider-parent of c
                if (
                    d in pp.neighbors(c)
                    and pp.mark(c, d) is Mark.TAIL
                    and pp.mark(d, c) is Mark.ARROW
                    and pp.mark(tip, d) is Mark.ARROW
                ):
                    stack.append((d, path + (d,)))


def _rule4(pp: PartialPag) -> bool:
    changed = False
    for c in pp.nodes:
        for b in sorted(pp.neighbors(c)):
            if pp.mark(c, b) is not Mark.CIRCLE:
                continue
            fired = False
            for d, path in _discriminating_paths(pp, b, c):
                sep = pp.sepset.get(frozenset((d, c)))
                if sep is None:
                    continue
                if b in sep:
                    changed |= pp.set_mark(c, b, Mark.TAIL)
                    changed |= pp.set_mark(b, c, Mark.ARROW)
                else:
                    a = path[2]
                    changed |= pp.set_mark(b, a, Mark.ARROW)
                    changed |= pp.set_mark(a, b, Mark.ARROW)
                    changed |= pp.set_mark(c, b, Mark.ARROW)
                    changed |= pp.set_mark(b, c, Mark.ARROW)
                fired = True
                break
            if fired:
                continue
    return changed


def _rule8(pp: PartialPag) -> bool:
    # a -> b -> c and a o-> c  =>  a -> c
    changed = False
    for a in pp.nodes:
        for c in pp.neighbors(a):
            if not (pp.mark(c, a) is Mark.CIRCLE and pp.mark(a, c) is Mark.ARROW):
                continue
            for b in pp.neighbors(a) & pp.neighbors(c):
                b_to_c = pp.mark(c, b) is Mark.TAIL and pp.mark(b, c) is Mark.ARROW
                a_to_b = pp.mark(b, a) is Mark.TAIL and pp.mark(a, b) in (
                    Mark.ARROW,
                    Mark.CIRCLE,
                )
                if a_to_b and b_to_c:
                    changed |= pp.set_mark(c, a, Mark.TAIL)
                    break
    return changed


def _pd_edge(pp: PartialPag, u: str, v: str) -> bool:
    """Edge u—v traversable on a possibly directed path from u's side."""
    return pp.mark(v, u) is not Mark.ARROW


def _uncovered_pd_paths(pp: PartialPag, a: str, c: str, require_second_nonadj: bool):
    """Yield uncovered possibly-directed paths a .. c that avoid the a—c edge."""
    stack = [(b, (a, b)) for b in sorted(pp.neighbors(a)) if b != c and _pd_edge(pp, a, b)]
    while stack:
        tip, path = stack.pop()
        if tip == c:
            if not require_second_nonadj or pp.known_nonadjacent(path[1], c):
                yield path
            continue
        for w in sorted(pp.neighbors(tip)):
            if w in path or not _pd_edge(pp, tip, w):
                continue
            if not pp.known_nonadjacent(path[-2], w):
                continue  # uncovered: endpoints of each triple nonadjacent
            stack.append((w, path + (w,)))


def _rule9(pp: PartialPag) -> bool:
    changed = False
    for a in pp.nodes:
        for c in sorted(pp.neighbors(a)):
            if not (pp.mark(c, a) is Mark.CIRCLE and pp.mark(a, c) is Mark.ARROW):
                continue
            for _ in _uncovered_pd_paths(pp, a, c, require_second_nonadj=True):
                changed |= pp.set_mark(c, a, Mark.TAIL)
                break
    return changed


def _rule10(pp: PartialPag) -> bool:
    changed = False
    for c in pp.nodes:
        tails = [
            b
            for b in pp.neighbors(c)
            if pp.mark(c, b) is Mark.TAIL and pp.mark(b, c) is Mark.ARROW
        ]
        if len(tails) < 2:
            continue
        for a in sorted(pp.neighbors(c)):
            if not (pp.mark(c, a) is Mark.CIRCLE and pp.mark(a, c) is Mark.ARROW):
                continue
            fired = False
            for b, d in combinations(sorted(tails), 2):
                if a in (b, d):
                    continue
                firsts_b = {b} if b in pp.neighbors(a) and _pd_edge(pp, a, b) else set()
                firsts_d = {d} if d in pp.neighbors(a) and _pd_edge(pp, a, d) else set()
                firsts_b |= {p[1] for p in _uncovered_pd_paths(pp, a, b, False)}
                firsts_d |= {p[1] for p in _uncovered_pd_paths(pp, a, d, False)}
                for mu in firsts_b:
                    for om in firsts_d:
                        if mu != om and pp.known_nonadjacent(mu, om):
                            changed |= pp.set_mark(c, a, Mark.TAIL)
                            fired = True
                            break
                    if fired:
                        break
                if fired:
                    break
    return changed


FULL_RULES = (_rule1, _rule2, _rule3, _rule4, _rule8, _rule9, _rule10)
SOUND_LOCAL_RULES = (_rule1, _rule2, _rule3, _rule4, _rule8)


def apply_orientation_rules(pp: PartialPag, rules=FULL_RULES) -> None:
    """Run collider orientation plus the given rule set to a fixpoint."""
    while True:
        changed = orient_colliders(pp)
        for rule in rules:
            changed |= rule(pp)
        if not changed:
            return


# -- MAG -> PAG --------------------------------------------------------------


def _find_sepset(mag: MixedGraph, a: str, b: str) -> frozenset:
    mb = sorted(markov_blanket_mag(mag, a) - {b})
    for size in range(len(mb) + 1):
        for zs in combinations(mb, size):
            if m_separated(mag, a, b, zs):
                return frozenset(zs)
    raise GraphError(f"no separating set for nonadjacent pair ({a}, {b})")


def mag_to_pag(mag: MixedGraph) -> MixedGraph:
    """Equivalence-class summary of a MAG: complete FCI with an oracle.

    The skeleton equals the MAG's; every tail/arrow in the output is
    invariant across the Markov equivalence class, circles elsewhere.
    """
    problems = validate(mag)
    if problems:
        raise GraphError(f"invalid MAG: {problems}")
    pp = PartialPag(list(mag.nodes))
    for a, b in combinations(mag.nodes, 2):
        if mag.adjacent(a, b):
            pp.set_adjacent(a, b)
        else:
            pp.set_nonadjacent(a, b, _find_sepset(mag, a, b))
    apply_orientation_rules(pp, FULL_RULES)
    return pp.to_graph(list(mag.nodes))


# -- visible edges ------------------------------------------------------------


def _collider_paths_into(graph: MixedGraph, x: str, parents_of: set[str]):
    """Yield start nodes s of collider paths s .. x into x whose interior
    nodes all lie in ``parents_of``."""
    # walk backwards from x; interior nodes must be colliders and parents of y
    stack = [(w, (x, w)) for w in graph.neighbors(x) if graph.mark(w, x) is Mark.ARROW]
    while stack:
        tip, path = stack.pop()
        yield tip, path
        if tip not in parents_of:
            continue
        for w in graph.neighbors(tip):
            if w in path:
                continue
            if graph.mark(w, tip) is Mark.ARROW and graph.mark(path[-2], tip) is Mark.ARROW:
                stack.append((w, path + (w,)))


def is_visible(graph: MixedGraph, x: str, y: str) -> bool:
    """Visibility of the directed edge x -> y in a MAG or PAG."""
    if not graph.is_directed_edge(x, y):
        return False
    y_adj = graph.neighbors(y)
    y_parents = graph.parents(y)
    for s, path in _collider_paths_into(graph, x, y_parents):
        if s == y or s in y_adj:
            continue
        if all(v in y_parents for v in path[1:-1]):
            return True
    return False


def visible_edges(graph: MixedGraph) -> dict[tuple[str, str], bool]:
    """Classify every directed edge of the graph as visible or not."""
    out: dict[tuple[str, str], bool] = {}
    for e in graph.edges():
        if graph.is_directed_edge(e.a, e.b):
            out[(e.a, e.b)] = is_visible(graph, e.a, e.b)
        elif graph.is_directed_edge(e.b, e.a):
            out[(e.b, e.a)] = is_visible(graph, e.b, e.a)
    return out
