"""Priority-first partial state-space expansion under the SDP or ISR heuristic.

Two phases: the first dequeues states in priority order until K satisfying
states are collected (or the queue empties / the cap trips), keeping successor
edges according to the heuristic; the second drains the queue, wiring each
leftover state to already-indexed neighbours and sending everything else to
the absorbing sink.  Satisfying states never get outgoing edges, which is
exactly what time-bounded reachability analysis needs.

Priorities are exact: residual distances enter the heap as integer numerators
over per-space denominators, so equal distances tie-break FIFO instead of by
floating-point noise.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Literal

from .depgraph import DependencyGraph, UnreachableEvidence, build_dependency_graph
from .linalg import full_space
from .model import PropertySpec, State, VasModel, enabled_successors, satisfies
from .solution_space import SolutionSpace, build_solution_space, is_single_solution
from .subspaces import IndexedSubspaceChain, build_chain, deepest_zero_index

Method = Literal["sdp", "isr"]

DEFAULT_MAX_STATES = 5_000_000


class UnreachableProperty(RuntimeError):
    """Dependency-graph construction failed: the bound is exactly 0."""

    def __init__(self, evidence: UnreachableEvidence):
        self.evidence = evidence
        super().__init__(evidence.reason)


@dataclass(frozen=True, order=True)
class SdpKey:
    """Smaller distance to the solution space wins; FIFO among exact ties."""

    dist: Fraction
    seq: int


@dataclass(frozen=True)
class IsrKey:
    """Deeper containment wins, then the smaller tie residual, then FIFO.

    No further comparison: when both slots tie exactly (common, since whole
    families of states share residuals), insertion order keeps the expansion
    breadth-first among equals, which is what lets the graph soak up the wide
    high-probability corridor instead of tunnelling along one ray.
    """

    depth: int
    tie_residual: Fraction
    seq: int

    def _tuple(self):
        return (-self.depth, self.tie_residual, self.seq)

    def __lt__(self, other: "IsrKey") -> bool:
        return self._tuple() < other._tuple()


def priority_of(
    method: Method,
    s: State,
    sol: SolutionSpace,
    chain: IndexedSubspaceChain | None = None,
    seq: int = 0,
):
    """Exact priority key of a state under the chosen heuristic."""
    if method == "sdp":
        return SdpKey(dist=sol.space.residual(s)[1], seq=seq)
    if chain is None:
        raise ValueError("isr priorities need a subspace chain")
    p, tie = deepest_zero_index(chain, s)
    return IsrKey(depth=p, tie_residual=tie, seq=seq)


@dataclass
class SearchStats:
    explored: int = 0
    enqueued: int = 0
    satisfying: int = 0
    truncated: bool = False


@dataclass
class PartialStateGraph:
    """Explicit partial CTMC with an absorbing sink for unexplored mass."""

    states: list[State]
    index: dict[State, int]
    rates: dict[tuple[int, int], float]
    abs_id: int
    sat_ids: frozenset[int]
    init_id: int = 0
    stats: SearchStats = field(default_factory=SearchStats)

    @property
    def n_states(self) -> int:
        return self.abs_id + 1

    def outgoing(self, sid: int) -> list[tuple[int, float]]:
        return sorted((t, r) for (f, t), r in self.rates.items() if f == sid)


def _fast_keys(method, sol, chain, comparator):
    """Integer-numerator key builders (fixed denominators per slot)."""
    target = sol.space
    if method == "sdp":
        return lambda s, seq: (target.dist_num(s), seq)
    spaces = chain.spaces
    depth = chain.depth
    if comparator == "lex":
        def key(s, seq):
            return tuple(sp.dist_num(s) for sp in reversed(spaces)) + (seq,)
        return key

    def key(s, seq):
        p = -1
        for i in range(depth, -1, -1):
            if spaces[i].dist_num(s) == 0:
                p = i
                break
        tie_num = spaces[p + 1].dist_num(s) if p < depth else target.dist_num(s)
        return (-p, tie_num, seq)

    return key


def run_search(
    model: VasModel,
    prop: PropertySpec,
    method: Method,
    k: int,
    max_states: int = DEFAULT_MAX_STATES,
    *,
    solution: SolutionSpace | None = None,
    graph: DependencyGraph | None = None,
    chain: IndexedSubspaceChain | None = None,
    comparator: str = "default",
    clamp_k: bool = True,
) -> PartialStateGraph:
    """Build the partial state graph holding up to k satisfying states.

    Raises UnreachableProperty when the ISR dependency graph cannot be built.
    A tripped ``max_states`` cap is reported via ``stats.truncated``; the
    result is still a sound lower-bound graph.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    if method not in ("sdp", "isr"):
        raise ValueError(f"unknown method {method!r}")
    sol = solution or build_solution_space(prop, model.m)

    allowed: frozenset[int] | None = None
    if method == "isr":
        if graph is None:
            graph = build_dependency_graph(model, prop, sol)
        if isinstance(graph, UnreachableEvidence):
            raise UnreachableProperty(graph)
        if chain is None:
            chain = build_chain(graph, model, sol)
        allowed = frozenset(graph.reaction_nodes)

    if clamp_k:
        # a one-point target region needs exactly one satisfying state
        anchor = chain.spaces[0] if method == "isr" else full_space(model.m)
        if is_single_solution(sol, anchor):
            k = 1

    key_of = _fast_keys(method, sol, chain, comparator)

    states: list[State] = [model.s0]
    index: dict[State, int] = {model.s0: 0}
    rates: dict[tuple[int, int], float] = {}
    abs_out: dict[int, float] = {}
    sat_ids: set[int] = set()
    stats = SearchStats(enqueued=1)

    heap: list[tuple] = [(key_of(model.s0, 0), 0)]
    seq = 1

    def keep_successor(sid: int, rate: float, nxt: State):
        nonlocal seq
        nid = index.get(nxt)
        if nid is None:
            if len(states) >= max_states:
                stats.truncated = True
                abs_out[sid] = abs_out.get(sid, 0.0) + rate
                return
            nid = len(states)
            states.append(nxt)
            index[nxt] = nid
            heapq.heappush(heap, (key_of(nxt, seq), nid))
            seq += 1
        key = (sid, nid)
        rates[key] = rates.get(key, 0.0) + rate

    # phase 1: hunt satisfying states in priority order
    while heap and len(sat_ids) < k:
        if len(states) >= max_states:
            stats.truncated = True
            break
        _, sid = heapq.heappop(heap)
        s = states[sid]
        if satisfies(prop, s):
            sat_ids.add(sid)
            continue
        stats.explored += 1
        for i, rate, nxt in enabled_successors(model, s):
            if allowed is None or i in allowed:
                keep_successor(sid, rate, nxt)
            else:
                abs_out[sid] = abs_out.get(sid, 0.0) + rate

    # phase 2: drain the queue, connecting only to states already indexed
    while heap:
        _, sid = heapq.heappop(heap)
        s = states[sid]
        if satisfies(prop, s):
            sat_ids.add(sid)
            continue
        for i, rate, nxt in enabled_successors(model, s):
            nid = index.get(nxt)
            if nid is not None:
                key = (sid, nid)
                rates[key] = rates.get(key, 0.0) + rate
            else:
                abs_out[sid] = abs_out.get(sid, 0.0) + rate

    abs_id = len(states)
    for sid, rate in abs_out.items():
        rates[(sid, abs_id)] = rate

    stats.enqueued = len(states)
    stats.satisfying = len(sat_ids)
    return PartialStateGraph(
        states=states,
        index=index,
        rates=rates,
        abs_id=abs_id,
        sat_ids=frozenset(sat_ids),
        stats=stats,
    )
