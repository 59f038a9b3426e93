"""Transition dependency graphs: which reactions must fire to reach the target.

Construction starts from an abstract root standing for the property, adds an
edge per (blocking species, producer) pair, and recurses into producers that
are not enabled initially.  Failure to complete the graph is a proof that no
satisfying state is reachable.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

from .linalg import residual
from .model import PropertySpec, VasModel, reaction_enabled
from .solution_space import SolutionSpace, build_solution_space

PSI = "psi"  # abstract root node; all other nodes are reaction indices
Node = Union[int, str]


@dataclass(frozen=True)
class DepEdge:
    src: Node
    dst: int
    species: int
    quantity: int


@dataclass(frozen=True)
class DependencyGraph:
    nodes: frozenset
    edges: tuple[DepEdge, ...]
    required_count: dict[int, int]
    mld: dict[Node, int]

    @property
    def reaction_nodes(self) -> tuple[int, ...]:
        return tuple(sorted(n for n in self.nodes if isinstance(n, int)))

    def children(self, node: Node) -> tuple[int, ...]:
        return tuple(sorted({e.dst for e in self.edges if e.src == node}))


@dataclass(frozen=True)
class UnreachableEvidence:
    """Why graph construction failed; proves the satisfying set is unreachable."""

    species: int
    reaction: int | None
    reason: str


def _root_deltas(model: VasModel, sol: SolutionSpace):
    """Per-species net change required to move s0 onto the solution space.

    Uses the exact orthogonal projection of s0; for pure-equality conjuncts
    this is exactly beta - s0[j] on pinned coordinates and 0 elsewhere.
    """
    eps, _ = residual(sol.space, model.s0)
    return eps


def _producers(model: VasModel, j: int, increase: bool) -> list[int]:
    if increase:
        return [r.index for r in model.reactions if r.update[j] > 0]
    return [r.index for r in model.reactions if r.update[j] < 0]


def _blocking_species(model: VasModel, i: int) -> list[int]:
    r = model.reactions[i]
    return [j for j, need in enumerate(r.reactants) if need > model.s0[j]]


def _reaches(edges: set[tuple[Node, int]], src: Node, dst: Node) -> bool:
    seen = {src}
    stack = [src]
    while stack:
        u = stack.pop()
        for a, b in edges:
            if a == u and b not in seen:
                if b == dst:
                    return True
                seen.add(b)
                stack.append(b)
    return False


def build_dependency_graph(
    model: VasModel, prop: PropertySpec, sol: SolutionSpace | None = None
) -> DependencyGraph | UnreachableEvidence:
    """Construct the dependency graph, or evidence that none exists."""
    if sol is None:
        sol = build_solution_space(prop, model.m)
    deltas = _root_deltas(model, sol)

    def viable(i: int, path: frozenset) -> bool:
        if reaction_enabled(model, i, model.s0):
            return True
        for b in _blocking_species(model, i):
            supported = False
            for q in _producers(model, b, increase=True):
                if q == i or q in path:
                    continue
                if viable(q, path | {i}):
                    supported = True
            if not supported:
                return False
        return True

    nodes: set[Node] = {PSI}
    edges: list[DepEdge] = []
    edge_pairs: set[tuple[Node, int]] = set()
    queue: list[tuple[int, frozenset]] = []
    expanded: set[int] = set()

    for j, d in enumerate(deltas):
        if d == 0:
            continue
        qty = math.ceil(abs(d))
        found = False
        for q in _producers(model, j, increase=d > 0):
            if viable(q, frozenset()):
                found = True
                nodes.add(q)
                if not any(e.src == PSI and e.dst == q and e.species == j for e in edges):
                    edges.append(DepEdge(PSI, q, j, qty))
                    edge_pairs.add((PSI, q))
                queue.append((q, frozenset()))
        if not found:
            return UnreachableEvidence(
                species=j,
                reaction=None,
                reason=(
                    f"species {model.species[j].name!r} must change by {d} but has no "
                    "viable " + ("producer" if d > 0 else "consumer")
                ),
            )

    while queue:
        i, path = queue.pop(0)
        if i in expanded:
            continue
        expanded.add(i)
        if reaction_enabled(model, i, model.s0):
            continue
        child_path = path | {i}
        for b in _blocking_species(model, i):
            deficit = model.reactions[i].reactants[b] - model.s0[b]
            for q in _producers(model, b, increase=True):
                if q == i or q in path:
                    continue
                if not viable(q, frozenset(child_path)):
                    continue
                if _reaches(edge_pairs, q, i):
                    continue  # would close a cycle; dependency already runs the other way
                if not any(e.src == i and e.dst == q and e.species == b for e in edges):
                    edges.append(DepEdge(i, q, b, deficit))
                    edge_pairs.add((i, q))
                nodes.add(q)
                if q not in expanded:
                    queue.append((q, frozenset(child_path)))

    # minimal leaf distance, memoized over the acyclic edge set
    mld_map: dict[Node, int] = {}

    def compute_mld(node: Node) -> int:
        if node in mld_map:
            return mld_map[node]
        if isinstance(node, int) and reaction_enabled(model, node, model.s0):
            mld_map[node] = 0
            return 0
        kids = sorted({e.dst for e in edges if e.src == node})
        value = 0 if not kids else min(compute_mld(k) for k in kids) + 1
        mld_map[node] = value
        return value

    for node in sorted(n for n in nodes if isinstance(n, int)):
        compute_mld(node)
    compute_mld(PSI)

    # per-firing requirement labels, propagated breadth-first from the root
    required: dict[int, int] = {}
    frontier: list[Node] = [PSI]
    while frontier:
        src = frontier.pop(0)
        parent_req = 1 if src == PSI else required.get(src, 1)
        for e in edges:
            if e.src != src:
                continue
            yield_per_firing = abs(model.reactions[e.dst].update[e.species]) or 1
            need = math.ceil(parent_req * e.quantity / yield_per_firing)
            if need > required.get(e.dst, 0):
                required[e.dst] = need
                frontier.append(e.dst)

    return DependencyGraph(
        nodes=frozenset(nodes),
        edges=tuple(edges),
        required_count=required,
        mld=mld_map,
    )


def mld(graph: DependencyGraph, node: Node) -> int:
    return graph.mld[node]


def to_dot(graph: DependencyGraph, model: VasModel) -> str:
    """Graphviz rendering with requirement and distance labels."""

    def node_name(n: Node) -> str:
        return "PSI" if n == PSI else model.reactions[n].name

    lines = ["digraph dependencies {"]
    for n in sorted(graph.nodes, key=lambda x: (isinstance(x, int), x if isinstance(x, int) else -1)):
        label = node_name(n)
        if isinstance(n, int):
            req = graph.required_count.get(n)
            extra = f" x{req}" if req else ""
            label = f"{label}{extra} (mld={graph.mld[n]})"
        lines.append(f'  "{node_name(n)}" [label="{label}"];')
    for e in graph.edges:
        lines.append(
            f'  "{node_name(e.src)}" -> "{node_name(e.dst)}"'
            f' [label="{model.species[e.species].name} x{e.quantity}"];'
        )
    lines.append("}")
    return "\n".join(lines) + "\n"
