"""Command-line driver: parse, search, analyze, report, export.

Output is a single JSON document on stdout; diagnostics go to stderr.  Exit
status: 0 on success, 1 for parse/config errors, 2 when dependency-graph
construction proves the target unreachable under the isr method.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time

from .ctmc import build_ctmc, export_explicit, transient_lower_bound
from .depgraph import UnreachableEvidence, build_dependency_graph, to_dot
from .model import ModelSyntaxError, parse_model_file
from .search import DEFAULT_MAX_STATES, UnreachableProperty, run_search
from .solution_space import ContradictoryFormula, build_solution_space
from .subspaces import build_chain, chain_to_json

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_UNREACHABLE = 2


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="vasbound",
        description=(
            "Guaranteed lower bounds on time-bounded rare-event reachability in "
            "stochastic vector addition systems (chemical reaction networks)."
        ),
    )
    ap.add_argument("--model", required=True, help="model file path")
    ap.add_argument("--method", choices=["sdp", "isr", "both"], default="sdp")
    ap.add_argument("--k", type=int, default=10, help="satisfying states to collect")
    ap.add_argument("--time", type=float, default=None, help="override the model's time bound")
    ap.add_argument("--tol", type=float, default=1e-12, help="transient truncation tolerance")
    ap.add_argument("--max-states", type=int, default=DEFAULT_MAX_STATES)
    ap.add_argument("--export-tra", default=None, help="write explicit transitions file")
    ap.add_argument("--export-lab", default=None, help="write labels file")
    ap.add_argument("--dump-depgraph", default=None, help="write dependency graph as DOT")
    ap.add_argument("--dump-subspaces", default=None, help="write subspace chain as JSON")
    ap.add_argument("--comparator", choices=["default", "lex"], default="default")
    ap.add_argument(
        "--no-clamp-k",
        action="store_true",
        help="disable forcing K=1 when the target region is a single point",
    )
    ap.add_argument(
        "--json",
        action="store_true",
        help="accepted for compatibility; output is always JSON on stdout",
    )
    return ap


def _run_one(model, prop, method, args, time_bound):
    t0 = time.perf_counter()
    sol = build_solution_space(prop, model.m)

    graph = None
    chain = None
    dep = build_dependency_graph(model, prop, sol)
    if isinstance(dep, UnreachableEvidence):
        if method == "isr":
            raise UnreachableProperty(dep)
        logger.warning(
            "dependency graph cannot be built (%s); the bound will be 0", dep.reason
        )
    else:
        graph = dep
        if method == "isr":
            chain = build_chain(graph, model, sol)

    if args.dump_depgraph and graph is not None:
        with open(args.dump_depgraph, "w", encoding="utf-8") as fh:
            fh.write(to_dot(graph, model))
    if args.dump_subspaces and chain is not None:
        with open(args.dump_subspaces, "w", encoding="utf-8") as fh:
            fh.write(chain_to_json(chain, model))

    psg = run_search(
        model,
        prop,
        method,
        args.k,
        max_states=args.max_states,
        solution=sol,
        graph=graph if method == "isr" else None,
        chain=chain,
        comparator=args.comparator,
        clamp_k=not args.no_clamp_k,
    )
    ctmc = build_ctmc(psg)
    result = transient_lower_bound(ctmc, time_bound, tol=args.tol)
    if args.export_tra or args.export_lab:
        if not (args.export_tra and args.export_lab):
            raise ValueError("--export-tra and --export-lab must be given together")
        export_explicit(psg, args.export_tra, args.export_lab)
    wall_ms = int(round((time.perf_counter() - t0) * 1000))
    return {
        "method": method,
        "K": args.k,
        "states": psg.n_states,
        "transitions": len(ctmc.entries),
        "sat_count": len(psg.sat_ids),
        "p_min": result.p_min,
        "lambda": result.lam,
        "terms_used": result.terms_used,
        "wall_time_ms": wall_ms,
        "explored": psg.stats.explored,
        "truncated": psg.stats.truncated,
        "time_bound": time_bound,
        "tolerance": args.tol,
    }


def run_pipeline(args) -> tuple[dict, int]:
    model, prop = parse_model_file(args.model)
    time_bound = prop.time_bound if args.time is None else args.time
    if args.k < 1:
        raise ValueError("--k must be at least 1")

    try:
        if args.method == "both":
            results = {}
            for method in ("sdp", "isr"):
                try:
                    results[method] = _run_one(model, prop, method, args, time_bound)
                except UnreachableProperty as exc:
                    results[method] = {
                        "method": method,
                        "p_min": 0.0,
                        "unreachable": True,
                        "evidence": exc.evidence.reason,
                    }
            doc = {
                "method": "both",
                "K": args.k,
                "p_min": max(r["p_min"] for r in results.values()),
                "results": results,
                "time_bound": time_bound,
            }
            return doc, EXIT_OK
        doc = _run_one(model, prop, args.method, args, time_bound)
        return doc, EXIT_OK
    except UnreachableProperty as exc:
        doc = {
            "method": args.method,
            "K": args.k,
            "p_min": 0.0,
            "unreachable": True,
            "evidence": exc.evidence.reason,
            "time_bound": time_bound,
        }
        return doc, EXIT_UNREACHABLE
    except ContradictoryFormula as exc:
        doc = {
            "method": args.method,
            "K": args.k,
            "p_min": 0.0,
            "contradictory_formula": True,
            "reason": str(exc),
            "time_bound": time_bound,
        }
        return doc, EXIT_OK


def main(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.WARNING, format="%(message)s")
    ap = build_parser()
    args = ap.parse_args(argv)
    try:
        doc, status = run_pipeline(args)
    except ModelSyntaxError as exc:
        print(f"{args.model}:{exc.line if exc.line else '?'}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (OSError, ValueError, RuntimeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    print(json.dumps(doc, sort_keys=True))
    return status


if __name__ == "__main__":
    sys.exit(main())
