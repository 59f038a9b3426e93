"""Target-state geometry: the affine space holding exactly the satisfying states.

Each substate formula contributes one hyperplane; their intersection is the
solution space.  Redundant conjuncts (parallel, identical hyperplanes) are
dropped, contradictory ones abort with `ContradictoryFormula`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .linalg import (
    AffineSpace,
    RatVector,
    intersect_affine,
    vec,
)
from .model import PropertySpec, SubstateFormula


class ContradictoryFormula(ValueError):
    """The conjunction admits no state: the target probability is exactly 0."""


@dataclass(frozen=True)
class SolutionSpace:
    space: AffineSpace
    normals: tuple[RatVector, ...]


def normal_vector(f: SubstateFormula, m: int) -> RatVector:
    """Vector orthogonal to the substate hyperplane: 1 at the target, -alpha elsewhere."""
    n = [Fraction(0)] * m
    n[f.target] = Fraction(1)
    for k, a in f.coeffs:
        n[k] = -a
    return tuple(n)


def substate_hyperplane(f: SubstateFormula, m: int) -> AffineSpace:
    """The (m-1)-dimensional space of the single conjunct.

    Every non-target species k contributes the generator e_k + alpha_k e_target;
    the offset places the target coordinate at the constant term.
    """
    coeffs = dict(f.coeffs)
    cols = []
    for k in range(m):
        if k == f.target:
            continue
        v = [Fraction(0)] * m
        v[k] = Fraction(1)
        v[f.target] = coeffs.get(k, Fraction(0))
        cols.append(tuple(v))
    offset = [Fraction(0)] * m
    offset[f.target] = Fraction(f.beta)
    return AffineSpace(cols, offset)


def classify_pair(fa: SubstateFormula, fb: SubstateFormula, m: int) -> str:
    """'independent', 'redundant' (same hyperplane), or 'contradictory' (parallel, disjoint)."""
    na, nb = normal_vector(fa, m), normal_vector(fb, m)
    pivot = next((i for i in range(m) if nb[i] != 0), None)
    if pivot is None:  # cannot happen: normals always have a 1 at the target
        return "independent"
    lam = na[pivot] / nb[pivot]
    if any(na[i] != lam * nb[i] for i in range(m)):
        return "independent"
    # parallel: the planes are n.x = beta; identical iff constants match after scaling
    return "redundant" if Fraction(fa.beta) == lam * fb.beta else "contradictory"


def build_solution_space(prop: PropertySpec, m: int) -> SolutionSpace:
    """Intersect all substate hyperplanes; raises ContradictoryFormula when empty."""
    normals = tuple(normal_vector(f, m) for f in prop.substates)
    kept: list[SubstateFormula] = []
    for f in prop.substates:
        drop = False
        for g in kept:
            verdict = classify_pair(f, g, m)
            if verdict == "contradictory":
                raise ContradictoryFormula(
                    f"substate formulas on species {f.target} and {g.target} conflict"
                )
            if verdict == "redundant":
                drop = True
                break
        if not drop:
            kept.append(f)

    space = substate_hyperplane(kept[0], m)
    for f in kept[1:]:
        nxt = intersect_affine(space, substate_hyperplane(f, m))
        if nxt is None:
            raise ContradictoryFormula("substate formulas have an empty intersection")
        space = nxt
    return SolutionSpace(space=space, normals=normals)


def is_single_solution(sol: SolutionSpace, s0_space: AffineSpace) -> bool:
    """True when the solution space meets ``s0_space`` in exactly one point."""
    inter = intersect_affine(sol.space, s0_space)
    return inter is not None and inter.dim == 0
