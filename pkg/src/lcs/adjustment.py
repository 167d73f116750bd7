"""Adjustment-set machinery and the local covariate selection driver.

Covers the generalized adjustment criterion (amenability, forbidden set,
blocking of definite-status non-causal paths), the three local
identification rules, an exhaustive validity oracle for small graphs,
and a global exhaustive baseline used for test-count comparisons.
"""

from __future__ import annotations

import time
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Optional

from .discovery import LocalStructure, learn_local_pag
from .estimation import estimate_effect_ols
from .graphs import GraphError, Mark, MixedGraph, possible_descendants
from .independence import CiEngine
from .projection import is_visible

CASE_IDENTIFIABLE = "identifiable"
CASE_ZERO = "zero"
CASE_NON_IDENTIFIABLE = "non_identifiable"


@dataclass(frozen=True)
class RuleWitness:
    s: Optional[str]
    z: frozenset


@dataclass
class LcsOutcome:
    case: str
    rule: str  # "R1" | "R2" | "R3a" | "R3b" | "none"
    adjustment_set: Optional[frozenset]
    effect: Optional[float]
    n_tests: int
    runtime_ms: int = 0
    s: Optional[str] = None
    witness_z: Optional[frozenset] = None
    budget_exhausted: bool = False

    def to_json_dict(self) -> dict:
        return {
            "case": self.case,
            "rule": self.rule if self.rule != "none" else "none",
            "adjustment_set": sorted(self.adjustment_set)
            if self.adjustment_set is not None
            else None,
            "effect": self.effect,
            "n_tests": self.n_tests,
            "runtime_ms": self.runtime_ms,
        }


# -- possibly directed paths and the forbidden set ---------------------------


def _pd_paths(graph: MixedGraph, x: str, y: str):
    """Simple paths x..y with no arrowhead at the near end of any edge."""
    stack = [
        (w, (x, w)) for w in sorted(graph.neighbors(x)) if graph.mark(w, x) is not Mark.ARROW
    ]
    while stack:
        tip, path = stack.pop()
        if tip == y:
            yield path
            continue
        for w in sorted(graph.neighbors(tip)):
            if w not in path and graph.mark(w, tip) is not Mark.ARROW:
                stack.append((w, path + (w,)))


def pd_path_nodes(graph: MixedGraph, x: str, y: str) -> set[str]:
    out: set[str] = set()
    for path in _pd_paths(graph, x, y):
        out.update(path)
    return out


def pd_first_hops(graph: MixedGraph, x: str, y: str) -> set[str]:
    return {path[1] for path in _pd_paths(graph, x, y)}


def forb_set(graph: MixedGraph, x: str, y: str) -> set[str]:
    """Possible descendants of every node on a possibly directed x..y path."""
    if x == y:
        raise GraphError("x and y must differ")
    forb: set[str] = set()
    for w in pd_path_nodes(graph, x, y):
        forb |= possible_descendants(graph, w)
    return forb


def amenable(graph: MixedGraph, x: str, y: str) -> bool:
    """Every possibly directed x..y path starts with a visible directed edge."""
    return all(
        graph.is_directed_edge(x, w) and is_visible(graph, x, w)
        for w in pd_first_hops(graph, x, y)
    )


# -- blocking of definite-status non-causal paths -----------------------------


def _definite_interior_status(graph, a, v, b) -> Optional[bool]:
    """True = definite collider, False = definite non-collider, None = neither."""
    in_mark = graph.mark(a, v)
    out_mark = graph.mark(b, v)
    if in_mark is Mark.ARROW and out_mark is Mark.ARROW:
        return True
    if in_mark is Mark.TAIL or out_mark is Mark.TAIL:
        return False
    if not graph.adjacent(a, b):
        return False  # unshielded with circles: a collider would be oriented
    return None


def noncausal_path_constraints(graph: MixedGraph, x: str, y: str):
    """Blocking constraints from definite-status non-causal x..y paths.

    Each entry is (non-colliders, collider-possible-descendant-sets): a set
    Z blocks the path iff it hits a non-collider or misses the possible
    descendants of some collider.
    """
    constraints = []
    stack = [(w, (x, w)) for w in sorted(graph.neighbors(x))]
    while stack:
        tip, path = stack.pop()
        if tip == y:
            causal = all(
                graph.mark(path[i + 1], path[i]) is not Mark.ARROW
                for i in range(len(path) - 1)
            )
            if causal:
                continue
            statuses = [
                _definite_interior_status(graph, path[i - 1], path[i], path[i + 1])
                for i in range(1, len(path) - 1)
            ]
            if any(s is None for s in statuses):
                continue  # not a definite-status path
            noncolliders = frozenset(
                path[i] for i, s in enumerate(statuses, start=1) if s is False
            )
            colliders = [
                frozenset(possible_descendants(graph, path[i]))
                for i, s in enumerate(statuses, start=1)
                if s is True
            ]
            constraints.append((noncolliders, colliders))
            continue
        for w in sorted(graph.neighbors(tip)):
            if w not in path:
                stack.append((w, path + (w,)))
    return constraints


def _blocks(constraints, z: frozenset) -> bool:
    for noncolliders, colliders in constraints:
        if noncolliders & z:
            continue
        if any(not (possde & z) for possde in colliders):
            continue
        return False
    return True


def gac_satisfied(graph: MixedGraph, x: str, y: str, z: Iterable[str]) -> bool:
    """Generalized adjustment criterion for z relative to (x, y)."""
    zset = frozenset(z)
    if x in zset or y in zset:
        raise GraphError("z must exclude x and y")
    if not amenable(graph, x, y):
        return False
    if zset & forb_set(graph, x, y):
        return False
    return _blocks(noncausal_path_constraints(graph, x, y), zset)


def brute_force_adjustment_search(
    graph: MixedGraph, x: str, y: str, max_nodes: int = 12
) -> list[frozenset]:
    """All valid adjustment sets, exhaustively; guarded to small graphs."""
    if len(graph.nodes) > max_nodes:
        raise GraphError(f"size guard exceeded: {len(graph.nodes)} > {max_nodes}")
    if not amenable(graph, x, y):
        return []
    forb = forb_set(graph, x, y)
    constraints = noncausal_path_constraints(graph, x, y)
    rest = sorted(v for v in graph.nodes if v not in (x, y))
    out = []
    for size in range(len(rest) + 1):
        for zs in combinations(rest, size):
            z = frozenset(zs)
            if z & forb:
                continue
            if _blocks(constraints, z):
                out.append(z)
    return out


# -- subset enumeration shared by the rules -----------------------------------


def _subsets(pool: list[str], cap: int | None = None):
    limit = len(pool) if cap is None else min(cap, len(pool))
    for size in range(limit + 1):
        yield from (frozenset(c) for c in combinations(pool, size))


# -- rule R1 -------------------------------------------------------------------


def rule_r1(
    engine: CiEngine,
    local: LocalStructure,
    x: str,
    y: str,
    max_set_size: int | None = None,
) -> Optional[RuleWitness]:
    """Search for (S, Z) with S dependent on y given Z but independent
    given Z plus x; first witness under the deterministic order wins.

    S must reach x against an arrowhead, so possible descendants of x are
    no witnesses (conditioning on x would not close their paths), and
    definite parents belong in the adjustment set rather than the S pool.
    """
    s_pool = sorted(local.mb - {y} - local.ch - local.poss_de - local.pa)
    z_base = sorted(local.mb - local.poss_de - {y})
    for s in s_pool:
        pool = [v for v in z_base if v != s]
        for z in _subsets(pool, max_set_size):
            if engine.is_independent(s, y, z):
                continue
            if engine.is_independent(s, y, z | {x}):
                return RuleWitness(s, z)
    return None


# -- rule R2 -------------------------------------------------------------------


def _marks_at_center_determined(fragment: MixedGraph, x: str) -> bool:
    return all(fragment.mark(v, x) is not Mark.CIRCLE for v in fragment.neighbors(x))


def rule_r2(
    local: LocalStructure, x: str, y: str, engine: CiEngine
) -> Optional[RuleWitness]:
    """Parent-set adjustment when every mark at x is determined.

    Applicability needs the fragment to certify amenability for (x, y):
    with y in the learned region, every possibly directed x..y fragment
    path must start with a fragment-visible edge and Pa u NCPa must block
    the definite-status non-causal fragment paths; with y outside, every
    possibly directed first edge out of x must be fragment-visible.  A
    final dependence check x against y given the candidate set screens
    out zero-effect cases, which rule R3 then labels.
    """
    fragment = local.fragment
    if not _marks_at_center_determined(fragment, x):
        return None
    z = frozenset(local.pa | local.ncpa)
    if not z <= (local.mb - local.poss_de):
        return None
    if fragment.has_node(y):
        for w in pd_first_hops(fragment, x, y):
            if not (fragment.is_directed_edge(x, w) and is_visible(fragment, x, w)):
                return None
        if not _blocks(noncausal_path_constraints(fragment, x, y), z):
            return None
    else:
        for w in fragment.neighbors(x):
            if fragment.mark(w, x) is Mark.ARROW:
                continue  # edge into x, not a possibly directed start
            if not (fragment.is_directed_edge(x, w) and is_visible(fragment, x, w)):
                return None
    if engine.is_independent(x, y, z):
        return None
    return RuleWitness(None, z)


# -- rule R3 -------------------------------------------------------------------


@dataclass(frozen=True)
class ZeroWitness:
    clause: str  # "a" | "b"
    s: Optional[str]
    z: frozenset


def rule_r3(
    engine: CiEngine,
    local: LocalStructure,
    x: str,
    y: str,
    max_set_size: int | None = None,
) -> Optional[ZeroWitness]:
    """Zero-effect detection: (a) x independent of y given some local Z,
    or (b) some S dependent on x but independent of y given Z.

    As in rule R1, S may not be a possible descendant of x."""
    z_base = sorted(local.mb - local.poss_de - {y})
    for z in _subsets(z_base, max_set_size):
        if engine.is_independent(x, y, z):
            return ZeroWitness("a", None, z)
    s_pool = sorted(local.mb - {y} - local.ch - local.poss_de - local.pa)
    for s in s_pool:
        pool = [v for v in z_base if v != s]
        for z in _subsets(pool, max_set_size):
            if engine.is_independent(s, x, z):
                continue
            if engine.is_independent(s, y, z):
                return ZeroWitness("b", s, z)
    return None


# -- the LCS driver ------------------------------------------------------------


def lcs(
    engine: CiEngine,
    x: str,
    y: str,
    observed: list[str],
    max_sepset_size: int | None = None,
    max_rule_set_size: int | None = None,
) -> LcsOutcome:
    """Local covariate selection for the ordered pair (x, y).

    Learns the local structure around x, tries R1, R2, R3 in order, and
    estimates the effect by adjusted regression when data is attached.
    """
    if x == y or x not in observed or y not in observed:
        raise ValueError("x and y must be distinct observed variables")
    t0 = time.perf_counter()
    local = learn_local_pag(engine, x, observed, max_sepset_size)

    def _done(outcome: LcsOutcome) -> LcsOutcome:
        outcome.runtime_ms = int((time.perf_counter() - t0) * 1000)
        return outcome

    def _effect(z: frozenset) -> Optional[float]:
        if engine.dataset is None:
            return None
        return estimate_effect_ols(engine.dataset, x, y, sorted(z))

    w1 = rule_r1(engine, local, x, y, max_rule_set_size)
    if w1 is not None:
        return _done(
            LcsOutcome(
                CASE_IDENTIFIABLE, "R1", w1.z, _effect(w1.z), engine.counter, s=w1.s
            )
        )
    w2 = rule_r2(local, x, y, engine)
    if w2 is not None:
        return _done(
            LcsOutcome(CASE_IDENTIFIABLE, "R2", w2.z, _effect(w2.z), engine.counter)
        )
    w3 = rule_r3(engine, local, x, y, max_rule_set_size)
    if w3 is not None:
        return _done(
            LcsOutcome(
                CASE_ZERO,
                "R3" + w3.clause,
                None,
                0.0,
                engine.counter,
                s=w3.s,
                witness_z=w3.z,
            )
        )
    return _done(LcsOutcome(CASE_NON_IDENTIFIABLE, "none", None, None, engine.counter))


# -- global exhaustive baseline -------------------------------------------------


class _Budget:
    def __init__(self, engine: CiEngine, max_tests: int):
        self.engine = engine
        self.max_tests = max_tests

    def independent(self, a: str, b: str, z) -> bool:
        if self.engine.counter >= self.max_tests:
            raise _BudgetExceeded
        return self.engine.is_independent(a, b, z)


class _BudgetExceeded(Exception):
    pass


def ehs_baseline(
    engine: CiEngine,
    x: str,
    y: str,
    observed: list[str],
    max_tests: int = 20000,
) -> LcsOutcome:
    """Exhaustive global search in the style of the classical two-test
    selection rule; used for test-count comparisons against lcs."""
    t0 = time.perf_counter()
    pool = sorted(v for v in observed if v not in (x, y))
    budget = _Budget(engine, max_tests)

    def _done(case, rule, z, s=None, exhausted=False):
        effect = None
        if case == CASE_IDENTIFIABLE and engine.dataset is not None:
            effect = estimate_effect_ols(engine.dataset, x, y, sorted(z))
        elif case == CASE_ZERO:
            effect = 0.0
        return LcsOutcome(
            case,
            rule,
            z,
            effect,
            engine.counter,
            runtime_ms=int((time.perf_counter() - t0) * 1000),
            s=s,
            budget_exhausted=exhausted,
        )

    try:
        for s in pool:
            rest = [v for v in pool if v != s]
            for z in _subsets(rest):
                if budget.independent(s, y, z):
                    continue
                if budget.independent(s, y, z | {x}):
                    return _done(CASE_IDENTIFIABLE, "R1", z, s=s)
        for z in _subsets(pool):
            if budget.independent(x, y, z):
                return _done(CASE_ZERO, "R3a", None)
    except _BudgetExceeded:
        return _done(CASE_NON_IDENTIFIABLE, "none", None, exhausted=True)
    return _done(CASE_NON_IDENTIFIABLE, "none", None)
