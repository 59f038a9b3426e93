"""Lower bounds on time-bounded rare-event reachability in stochastic VAS/CRNs.

Pipeline: parse a model and target property, build the target-state geometry
(and, for the subspace heuristic, a transition dependency graph plus a nested
chain of affine subspaces), run a priority-first partial state-space search,
and bound the reachability probability by transient analysis of the partial
chain with an absorbing sink.
"""

from .ctmc import SparseCtmc, TransientResult, build_ctmc, export_explicit, transient_lower_bound
from .depgraph import DependencyGraph, UnreachableEvidence, build_dependency_graph, mld
from .linalg import AffineSpace, intersect_affine, nullspace, pseudoinverse, rref
from .model import (
    ModelSyntaxError,
    PropertySpec,
    Reaction,
    Species,
    SubstateFormula,
    VasModel,
    enabled_successors,
    exit_rate,
    parse_model,
    parse_model_file,
    propensity,
    satisfies,
    serialize_model,
)
from .oracle import TruncationBox, dense_transient_reference, exhaustive_graph, membership_bruteforce
from .search import PartialStateGraph, UnreachableProperty, priority_of, run_search
from .solution_space import (
    ContradictoryFormula,
    SolutionSpace,
    build_solution_space,
    classify_pair,
    is_single_solution,
    normal_vector,
)
from .subspaces import (
    IndexedSubspaceChain,
    NoDisplacement,
    blanketing_space,
    build_chain,
    compute_f,
    deepest_zero_index,
)

__version__ = "0.1.0"

__all__ = [
    "AffineSpace",
    "ContradictoryFormula",
    "DependencyGraph",
    "IndexedSubspaceChain",
    "ModelSyntaxError",
    "NoDisplacement",
    "PartialStateGraph",
    "PropertySpec",
    "Reaction",
    "SolutionSpace",
    "SparseCtmc",
    "Species",
    "SubstateFormula",
    "TransientResult",
    "TruncationBox",
    "UnreachableEvidence",
    "UnreachableProperty",
    "VasModel",
    "blanketing_space",
    "build_chain",
    "build_ctmc",
    "build_dependency_graph",
    "build_solution_space",
    "classify_pair",
    "compute_f",
    "deepest_zero_index",
    "dense_transient_reference",
    "enabled_successors",
    "exhaustive_graph",
    "exit_rate",
    "export_explicit",
    "intersect_affine",
    "is_single_solution",
    "membership_bruteforce",
    "mld",
    "normal_vector",
    "nullspace",
    "parse_model",
    "parse_model_file",
    "priority_of",
    "propensity",
    "pseudoinverse",
    "rref",
    "run_search",
    "satisfies",
    "serialize_model",
    "transient_lower_bound",
]
