"""Markov-blanket discovery and the local structure learner around a treatment.

The learner grows a partial PAG outward from the target: it learns the
Markov blanket of each waitlisted node by total conditioning, resolves
that node's adjacencies exactly by separating-set search inside its
blanket, orients colliders from recorded sepsets, and applies the sound
orientation rules after every step.  Stop rules end the walk once the
marks around the target cannot change any more.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .graphs import Mark, MixedGraph, possible_descendants
from .independence import CiEngine
from .projection import (
    ADJACENT,
    NONADJACENT,
    UNKNOWN,
    PartialPag,
    SOUND_LOCAL_RULES,
    apply_orientation_rules,
)


def total_conditioning_mb(engine: CiEngine, x: str, observed: list[str]) -> set[str]:
    """Markov blanket of x by total conditioning.

    v belongs to the blanket iff x and v stay dependent given all other
    observed variables; one CI query per candidate.
    """
    if x not in observed:
        raise ValueError(f"{x!r} is not an observed variable")
    rest = [v for v in observed if v != x]
    mb = set()
    for v in rest:
        z = frozenset(rest) - {v}
        if not engine.is_independent(x, v, z):
            mb.add(v)
    return mb


@dataclass
class LocalStructure:
    center: str
    fragment: MixedGraph
    mb: frozenset
    pa: frozenset
    ch: frozenset
    ncpa: frozenset
    pa_star: frozenset
    poss_de: frozenset


@dataclass
class LearnerState:
    engine: CiEngine
    x: str
    observed: list[str]
    max_sepset_size: int | None = None
    pair_search_cap: int = 2
    waitlist: deque = field(default_factory=deque)
    donelist: set = field(default_factory=set)
    queued: set = field(default_factory=set)
    mb: dict = field(default_factory=dict)
    tried_scopes: set = field(default_factory=set)
    pp: PartialPag = None  # type: ignore[assignment]

    def __post_init__(self) -> None:
        conflict = "raise" if self.engine.is_oracle else "keep"
        if self.pp is None:
            self.pp = PartialPag([], on_conflict=conflict)
        self.waitlist.append(self.x)
        self.queued.add(self.x)

    def region(self) -> set[str]:
        """MB+(x): the target and its learned blanket."""
        return {self.x} | self.mb.get(self.x, set())


def _search_sepset(
    engine: CiEngine, v: str, u: str, pool: list[str], cap: int | None
) -> frozenset | None:
    limit = len(pool) if cap is None else min(cap, len(pool))
    for size in range(limit + 1):
        for zs in combinations(pool, size):
            if engine.is_independent(v, u, zs):
                return frozenset(zs)
    return None


def process_center(state: LearnerState, v: str) -> None:
    """Learn MB(v) and resolve every pair (v, u) exactly."""
    engine = state.engine
    mbv = total_conditioning_mb(engine, v, state.observed)
    state.mb[v] = mbv
    pp = state.pp
    pp.ensure_node(v)
    # outside the blanket: nonadjacent, the blanket itself separates
    for u in state.observed:
        if u != v and u not in mbv and pp.pair_status(v, u) == UNKNOWN:
            pp.set_nonadjacent(v, u, frozenset(mbv))
    # blanket members: exact separating-set search within MB(v)
    cap = state.max_sepset_size
    if cap is None and len(mbv) > 11:
        # large-blanket guard: separating sets bigger than this are missed,
        # which can only add edges; exactness is forfeited and logged
        cap = 5
        if engine.log is not None:
            engine.log.append({"event": "sepset_cap", "center": v, "cap": cap})
    for u in sorted(mbv):
        if pp.pair_status(v, u) != UNKNOWN:
            continue
        pool = sorted(mbv - {u})
        sep = _search_sepset(engine, v, u, pool, cap)
        if sep is None:
            pp.set_adjacent(v, u)
        else:
            pp.set_nonadjacent(v, u, sep)
    # short separating sets between blanket members, within MB+(v); a found
    # set proves nonadjacency now, anything unresolved is settled exactly
    # when the pair's own centers are processed
    scope_all = sorted(mbv | {v})
    for u, w in combinations(sorted(mbv), 2):
        if pp.pair_status(u, w) != UNKNOWN:
            continue
        scope = [t for t in scope_all if t not in (u, w)]
        key = (frozenset((u, w)), frozenset(scope))
        if key in state.tried_scopes:
            continue
        state.tried_scopes.add(key)
        sep = _search_sepset(engine, u, w, scope, state.pair_search_cap)
        if sep is not None:
            pp.set_nonadjacent(u, w, sep)


def stop_rules_met(state: LearnerState, x: str) -> bool:
    """Whether any of the three learner stop rules holds for target x."""
    if not state.waitlist:
        return True  # S-b
    if x not in state.donelist:
        return False
    region = sorted(state.region())
    pp = state.pp
    pairs_known = all(
        pp.pair_status(a, b) != UNKNOWN for a, b in combinations(region, 2)
    )
    if not pairs_known:
        return False
    marks = [
        (a, b)
        for a, b in combinations(region, 2)
        if pp.pair_status(a, b) == ADJACENT
    ]
    # S-a: every mark inside MB+(x) is determined
    if all(
        pp.mark(a, b) is not Mark.CIRCLE and pp.mark(b, a) is not Mark.CIRCLE
        for a, b in marks
    ):
        return True
    # S-c: the closed neighborhood of the region is fully processed, so the
    # remaining circles cannot be oriented by further local learning
    closure = set(region)
    for v in region:
        if v not in state.donelist:
            return False
        closure |= pp.neighbors(v)
    return all(v in state.donelist for v in closure)


def run_learner(
    engine: CiEngine,
    x: str,
    observed: list[str],
    max_sepset_size: int | None = None,
) -> LearnerState:
    observed = sorted(observed)
    if x not in observed:
        raise ValueError(f"{x!r} is not an observed variable")
    state = LearnerState(engine, x, observed, max_sepset_size)
    while state.waitlist:
        if stop_rules_met(state, x):
            break
        v = state.waitlist.popleft()
        process_center(state, v)
        state.donelist.add(v)
        apply_orientation_rules(state.pp, SOUND_LOCAL_RULES)
        for u in sorted(state.mb[v]):
            if u not in state.queued:
                state.queued.add(u)
                state.waitlist.append(u)
        if engine.log is not None:
            engine.log.append(
                {"event": "center_done", "node": v, "mb": sorted(state.mb[v])}
            )
    return state


def _definite_collider_somewhere(g: MixedGraph, v: str, nodes: set[str]) -> bool:
    nbrs = [u for u in g.neighbors(v) if u in nodes]
    return any(
        g.mark(a, v) is Mark.ARROW and g.mark(b, v) is Mark.ARROW
        for a, b in combinations(nbrs, 2)
    )


def derive_sets(
    fragment: MixedGraph, x: str, mb: frozenset
) -> tuple[frozenset, frozenset, frozenset, frozenset, frozenset]:
    """(pa, ch, ncpa, pa_star, poss_de) of x read off a PAG fragment."""
    pa = frozenset(fragment.parents(x))
    ch = frozenset(fragment.children(x))
    poss_de = frozenset(possible_descendants(fragment, x) - {x})
    region = {x} | set(mb)
    ncpa = frozenset(
        v
        for v in fragment.neighbors(x)
        if fragment.mark(x, v) is Mark.CIRCLE  # circle at v
        and fragment.mark(v, x) is Mark.ARROW  # arrowhead at x
        and not _definite_collider_somewhere(fragment, v, region)
    )
    # arrow-collider paths out of x whose vertices x can never reach
    pa_star: set[str] = set()
    stack = [
        (v, (x, v))
        for v in sorted(fragment.neighbors(x))
        if fragment.mark(v, x) is Mark.ARROW and v not in poss_de
    ]
    while stack:
        tip, path = stack.pop()
        pa_star.add(tip)
        for w in sorted(fragment.neighbors(tip)):
            if w in path or w in poss_de:
                continue
            # tip must be a collider to extend the path through it
            if (
                fragment.mark(path[-2], tip) is Mark.ARROW
                and fragment.mark(w, tip) is Mark.ARROW
            ):
                stack.append((w, path + (w,)))
    return pa, ch, ncpa, frozenset(pa_star), poss_de


def learn_local_pag(
    engine: CiEngine,
    x: str,
    observed: list[str],
    max_sepset_size: int | None = None,
) -> LocalStructure:
    """Learn the PAG fragment around x and its derived node sets."""
    state = run_learner(engine, x, observed, max_sepset_size)
    keep = sorted({v for v, nbrs in state.pp.adj.items() if nbrs} | {x})
    fragment = state.pp.to_graph(keep)
    mb = frozenset(state.mb[x])
    pa, ch, ncpa, pa_star, poss_de = derive_sets(fragment, x, mb)
    return LocalStructure(x, fragment, mb, pa, ch, ncpa, pa_star, poss_de)
