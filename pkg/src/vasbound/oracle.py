"""Brute-force references: exhaustive boxed expansion and dense transient math.

Everything here exists to cross-check the heuristic pipeline, so it favours
obviousness over speed: breadth-first full expansion, elimination-based
membership, and a series matrix exponential.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass

import numpy as np

from .linalg import AffineSpace, solve_particular, vec_sub
from .model import PropertySpec, State, VasModel, enabled_successors, satisfies
from .search import PartialStateGraph, SearchStats

DEFAULT_BOX_VOLUME_GUARD = 10**7


@dataclass(frozen=True)
class TruncationBox:
    """Per-species inclusive upper bounds for exhaustive expansion."""

    bounds: tuple[int, ...]

    def admits(self, s: State) -> bool:
        return all(x <= b for x, b in zip(s, self.bounds))


def exhaustive_graph(
    model: VasModel,
    prop: PropertySpec,
    box: TruncationBox,
    max_box_volume: int | None = DEFAULT_BOX_VOLUME_GUARD,
) -> PartialStateGraph:
    """Breadth-first full expansion within the box; out-of-box mass is absorbed.

    The volume guard rejects plainly oversized boxes; pass None to disable it
    when conservation laws keep the reachable set far below the box volume.
    """
    if len(box.bounds) != model.m:
        raise ValueError("box arity does not match species count")
    if any(b < c for b, c in zip(box.bounds, model.s0)):
        raise ValueError("box must contain the initial state")
    if max_box_volume is not None:
        volume = math.prod(b + 1 for b in box.bounds)
        if volume > max_box_volume:
            raise ValueError(f"box volume {volume} exceeds guard {max_box_volume}")

    states: list[State] = [model.s0]
    index: dict[State, int] = {model.s0: 0}
    rates: dict[tuple[int, int], float] = {}
    sat_ids: set[int] = set()
    queue: deque[int] = deque([0])
    explored = 0
    while queue:
        sid = queue.popleft()
        s = states[sid]
        if satisfies(prop, s):
            sat_ids.add(sid)
            continue
        explored += 1
        for _, rate, nxt in enabled_successors(model, s):
            if box.admits(nxt):
                nid = index.get(nxt)
                if nid is None:
                    nid = len(states)
                    states.append(nxt)
                    index[nxt] = nid
                    queue.append(nid)
                key = (sid, nid)
                rates[key] = rates.get(key, 0.0) + rate
            else:
                key = (sid, -1)
                rates[key] = rates.get(key, 0.0) + rate

    abs_id = len(states)
    for (sid, t) in list(rates):
        if t == -1:
            rates[(sid, abs_id)] = rates.pop((sid, -1))
    return PartialStateGraph(
        states=states,
        index=index,
        rates=rates,
        abs_id=abs_id,
        sat_ids=frozenset(sat_ids),
        stats=SearchStats(explored=explored, enqueued=len(states), satisfying=len(sat_ids)),
    )


def membership_bruteforce(space: AffineSpace, v) -> bool:
    """Membership by exact elimination on the generating system gen x = v - offset."""
    from .linalg import vec

    rhs = vec_sub(vec(v), space.offset)
    return solve_particular(space.gen, rhs) is not None


def dense_transient_reference(ctmc, time_bound: float, max_states: int = 400) -> float:
    """Satisfying-state mass at ``time_bound`` via a series matrix exponential.

    Scaling-and-squaring Taylor series on the dense generator; independent of
    the uniformization path it cross-checks.  Intended for small chains only.
    """
    n = ctmc.n_states
    if n > max_states:
        raise ValueError(f"dense reference limited to {max_states} states")
    q = np.zeros((n, n), dtype=np.float64)
    for f, t, r in ctmc.entries:
        q[f, t] += r
    for i in range(n):
        q[i, i] -= ctmc.exit_rates[i]
    a = q.T * time_bound
    norm = np.abs(a).sum(axis=0).max()
    squarings = max(0, int(math.ceil(math.log2(norm)))) if norm > 0 else 0
    a /= 2.0**squarings
    term = np.eye(n)
    total = np.eye(n)
    k = 1
    while True:
        term = term @ a / k
        total += term
        if np.abs(term).max() < 1e-22:
            break
        k += 1
        if k > 10_000:
            raise RuntimeError("series failed to converge")
    for _ in range(squarings):
        total = total @ total
    v0 = np.zeros(n)
    v0[ctmc.init_id] = 1.0
    vt = total @ v0
    return float(sum(vt[i] for i in sorted(ctmc.sat_ids)))
