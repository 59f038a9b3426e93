"""Transient analysis of partial state graphs and explicit-format export.

The probability of sitting in a satisfying state at time T is computed by
uniformization: the chain is subsampled at a uniform rate and the transient
distribution is a Poisson mixture of powers of the subordinated jump matrix.
Satisfying states and the sink are absorbing, so mass in satisfying states at
T equals the probability of reaching them within [0, T].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .search import PartialStateGraph


@dataclass(frozen=True)
class SparseCtmc:
    n_states: int
    entries: tuple[tuple[int, int, float], ...]  # sorted by (from, to); rates > 0
    exit_rates: tuple[float, ...]
    init_id: int
    sat_ids: frozenset[int]
    abs_id: int


@dataclass(frozen=True)
class TransientResult:
    p_min: float
    lam: float
    terms_used: int
    tolerance: float


def build_ctmc(graph: PartialStateGraph) -> SparseCtmc:
    """Freeze a partial state graph into a sorted sparse CTMC.

    Duplicate (from, to) rates were already summed during accumulation;
    satisfying states and the sink have no outgoing rates by construction.
    """
    n = graph.n_states
    entries = sorted((f, t, r) for (f, t), r in graph.rates.items() if r > 0.0)
    exit_rates = [0.0] * n
    for f, _, r in entries:
        exit_rates[f] += r
    for sid in graph.sat_ids:
        assert exit_rates[sid] == 0.0, "satisfying states must be absorbing"
    assert exit_rates[graph.abs_id] == 0.0, "sink must be absorbing"
    return SparseCtmc(
        n_states=n,
        entries=tuple(entries),
        exit_rates=tuple(exit_rates),
        init_id=graph.init_id,
        sat_ids=graph.sat_ids,
        abs_id=graph.abs_id,
    )


def _poisson_window(q: float, tol: float) -> tuple[int, np.ndarray]:
    """Left edge and normalized Poisson(q) weights covering all but <= tol mass.

    Weights are built outward from the mode by the pmf recurrence (the mode
    term is scaled to 1, so nothing overflows or underflows) and both tails
    are cut using geometric bounds.  Normalizing over the window redistributes
    at most the neglected tail mass, keeping the truncation error under tol.
    """
    mode = int(q)
    half = tol / 2.0
    right = [1.0]
    total = 1.0
    k = mode
    while True:
        k += 1
        u = right[-1] * (q / k)
        if u == 0.0:
            break
        right.append(u)
        total += u
        ratio = q / (k + 1)
        if ratio < 1.0 and u * ratio / (1.0 - ratio) <= half * total:
            break
    left = []
    k = mode
    while k > 0:
        u = (left[-1] if left else 1.0) * (k / q)
        if u == 0.0:
            break
        left.append(u)
        total += u
        k -= 1
        ratio = k / q
        if u * ratio / (1.0 - ratio) <= half * total:
            break
    lo = mode - len(left)
    weights = np.array(list(reversed(left)) + right, dtype=np.float64)
    weights /= weights.sum()
    return lo, weights


def transient_lower_bound(ctmc: SparseCtmc, time_bound: float, tol: float = 1e-12) -> TransientResult:
    """Probability of being in a satisfying state by ``time_bound``.

    A chain whose maximum exit rate is zero is degenerate: the initial state
    never moves, so the answer is 1 or 0 depending on its label.
    """
    if time_bound < 0:
        raise ValueError("time bound must be nonnegative")
    if not 0 < tol <= 1e-3:
        raise ValueError("tolerance must lie in (0, 1e-3]")
    init_sat = 1.0 if ctmc.init_id in ctmc.sat_ids else 0.0
    max_exit = max(ctmc.exit_rates, default=0.0)
    if time_bound == 0.0 or max_exit == 0.0:
        return TransientResult(p_min=init_sat, lam=0.0, terms_used=0, tolerance=tol)

    lam = 1.02 * max_exit  # mild inflation shortens tail sensitivity
    n = ctmc.n_states
    rows, cols, vals = [], [], []
    for f, t, r in ctmc.entries:
        rows.append(t)
        cols.append(f)
        vals.append(r / lam)
    for i in range(n):
        rows.append(i)
        cols.append(i)
        vals.append(1.0 - ctmc.exit_rates[i] / lam)
    pt = sparse.csr_matrix((vals, (rows, cols)), shape=(n, n), dtype=np.float64)

    sat_vec = np.zeros(n, dtype=np.float64)
    for sid in sorted(ctmc.sat_ids):
        sat_vec[sid] = 1.0

    lo, weights = _poisson_window(lam * time_bound, tol)
    hi = lo + len(weights) - 1
    v = np.zeros(n, dtype=np.float64)
    v[ctmc.init_id] = 1.0
    terms = []
    for k in range(hi + 1):
        if k >= lo:
            terms.append(weights[k - lo] * float(sat_vec.dot(v)))
        if k < hi:
            v = pt.dot(v)
    p = math.fsum(terms)
    p = min(max(p, 0.0), 1.0)
    return TransientResult(p_min=p, lam=lam, terms_used=len(weights), tolerance=tol)


def _format_rate(rate: float) -> str:
    return format(rate, ".17g")


def export_explicit(graph: PartialStateGraph, tra_path, lab_path) -> None:
    """Write transitions and labels files; byte-deterministic.

    Transitions: one ``<from> <to> <rate>`` line per edge, sorted by source
    then target, rates at 17 significant digits.  Labels: ``<id> <label>``
    lines with ids ascending (a state may carry several labels).
    """
    ctmc = build_ctmc(graph)
    try:
        with open(tra_path, "w", encoding="utf-8") as fh:
            for f, t, r in ctmc.entries:
                fh.write(f"{f} {t} {_format_rate(r)}\n")
    except OSError as exc:
        raise RuntimeError(f"cannot write transitions file {tra_path}: {exc}") from exc
    labels: list[tuple[int, str]] = [(graph.init_id, "init")]
    labels.extend((sid, "sat") for sid in graph.sat_ids)
    labels.append((graph.abs_id, "abs"))
    labels.sort(key=lambda x: (x[0], x[1]))
    try:
        with open(lab_path, "w", encoding="utf-8") as fh:
            for sid, label in labels:
                fh.write(f"{sid} {label}\n")
    except OSError as exc:
        raise RuntimeError(f"cannot write labels file {lab_path}: {exc}") from exc
