"""Nested indexed subspaces for the subspace-chain search heuristic.

Level i is generated by the update vectors of dependency-graph reactions whose
minimal leaf distance is at least i, so the chain shrinks as i grows.  Every
level shares the offset ``s0 + f``, where the displacement f simultaneously
lies over the level-0 generators (shifted by s0) and lands the offset on the
solution space.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from fractions import Fraction

from .depgraph import DependencyGraph
from .linalg import (
    AffineSpace,
    RatMatrix,
    RatVector,
    mat_vec,
    pseudoinverse,
    solve_particular,
    vec,
    vec_add,
)
from .model import VasModel
from .solution_space import SolutionSpace

logger = logging.getLogger(__name__)


class NoDisplacement(RuntimeError):
    """No admissible displacement exists; the chain cannot be anchored."""


@dataclass(frozen=True)
class IndexedSubspaceChain:
    spaces: tuple[AffineSpace, ...]  # index 0 (widest) .. I (deepest)
    f: RatVector
    level_reactions: tuple[tuple[int, ...], ...]
    target_space: AffineSpace  # the solution space, used for final tie-breaking

    @property
    def depth(self) -> int:
        return len(self.spaces) - 1


def _stacked_solve(m0_cols, sol_space: AffineSpace, rhs) -> RatVector | None:
    """Min-norm solution of [M0 | -Ms] x = rhs, or None when inconsistent."""
    m = len(rhs)
    stacked: RatMatrix = tuple(
        tuple(c[i] for c in m0_cols) + tuple(-x for x in sol_space.gen[i]) for i in range(m)
    )
    if solve_particular(stacked, rhs) is None:
        return None
    return mat_vec(pseudoinverse(stacked), vec(rhs))


def compute_f(m0_cols, sol: SolutionSpace, s0) -> RatVector:
    """Displacement vector anchoring the chain offset inside the solution space.

    Primary route: exact min-norm solve of ``[M0 | -Ms] x = s_p - 2 s0``, then
    ``f = M0 x + s0``.  When that system is inconsistent, the shift drops out:
    solve ``[M0 | -Ms] x = s_p - s0`` and take ``f = M0 x``.  Either way the
    anchor ``s0 + f`` lands in the solution space, which is the property the
    chain and its priorities rely on; s0 itself is not guaranteed to lie in
    S_0 (the base-level offset can sit off the reachable lattice).
    """
    q = len(m0_cols)
    s0v = vec(s0)

    def span_part(xhat) -> RatVector:
        return tuple(
            sum((c[i] * xj for c, xj in zip(m0_cols, xhat[:q])), Fraction(0))
            for i in range(len(s0v))
        )

    two_s0 = tuple(2 * x for x in s0v)
    rhs = tuple(p - t for p, t in zip(sol.space.offset, two_s0))
    xhat = _stacked_solve(m0_cols, sol.space, rhs)
    if xhat is not None:
        f = vec_add(span_part(xhat), s0v)
    else:
        rhs2 = tuple(p - t for p, t in zip(sol.space.offset, s0v))
        xhat = _stacked_solve(m0_cols, sol.space, rhs2)
        if xhat is None:
            raise NoDisplacement(
                "level-0 generators cannot reach the solution space from the initial state"
            )
        logger.warning("displacement system inconsistent; solving without the shift term")
        f = span_part(xhat)
    anchored = vec_add(s0v, f)
    if not sol.space.contains(anchored):
        raise NoDisplacement("displacement failed to anchor the offset in the solution space")
    return f


def build_chain(graph: DependencyGraph, model: VasModel, sol: SolutionSpace) -> IndexedSubspaceChain:
    """Build the nested chain S_0 .. S_I from dependency-graph reactions."""
    reaction_nodes = graph.reaction_nodes
    depth = max((graph.mld[r] for r in reaction_nodes), default=0)
    levels = tuple(
        tuple(r for r in reaction_nodes if graph.mld[r] >= i) for i in range(depth + 1)
    )
    m0_cols = [vec(model.reactions[r].update) for r in levels[0]]
    f = compute_f(m0_cols, sol, model.s0)
    offset = vec_add(vec(model.s0), f)

    spaces = tuple(
        AffineSpace([model.reactions[r].update for r in level], offset) for level in levels
    )
    # chain sanity: shared offset sits in every level and in the solution space
    assert sol.space.contains(offset)
    for sp in spaces:
        assert sp.contains(offset)
    if reaction_nodes:
        assert levels[-1], "deepest level must keep at least one generator"
    return IndexedSubspaceChain(
        spaces=spaces, f=f, level_reactions=levels, target_space=sol.space
    )


def deepest_zero_index(chain: IndexedSubspaceChain, s) -> tuple[int, Fraction]:
    """Deepest level containing s (or -1), plus the residual used to break ties.

    Nesting makes membership monotone in the level index, so the scan starts
    at the deepest level and stops at the first zero residual.  The tie
    residual is the distance to the next-deeper level, or to the solution
    space when s already sits at the deepest level.
    """
    depth = chain.depth
    p = -1
    for i in range(depth, -1, -1):
        if chain.spaces[i].contains(s):
            p = i
            break
    if p < depth:
        tie = chain.spaces[p + 1].residual(s)[1]
    else:
        tie = chain.target_space.residual(s)[1]
    return p, tie


def blanketing_space(model: VasModel) -> AffineSpace:
    """Affine span of every update vector, offset by the initial state."""
    return AffineSpace([r.update for r in model.reactions], model.s0)


def chain_to_json(chain: IndexedSubspaceChain, model: VasModel) -> str:
    doc = {
        "depth": chain.depth,
        "f": [str(x) for x in chain.f],
        "offset": [str(x) for x in chain.spaces[0].offset],
        "levels": [
            {
                "index": i,
                "reactions": [model.reactions[r].name for r in chain.level_reactions[i]],
                "generators": [
                    [str(x) for x in model.reactions[r].update] for r in chain.level_reactions[i]
                ],
            }
            for i in range(chain.depth + 1)
        ],
    }
    return json.dumps(doc, indent=2) + "\n"
