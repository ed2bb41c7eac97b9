"""Anytime subset-sweep heuristic.

The pipeline: score every lot-type by how often it is among a branch's k
best fits, rank lot-types by those score vectors, then sweep kappa-subsets
in order of rank sum (most promising first).  Each subset gets a greedy
per-branch assignment, a multiplier-repair pass against the item window,
and becomes the incumbent if it strictly improves.  The sweep stops on
budget exhaustion, subset exhaustion, or cooperative cancellation, always
holding the best plan found so far.
"""

import heapq
import time
from dataclasses import dataclass
from typing import Callable, Iterator, Sequence

import numpy as np

from .errors import ContractViolation
from .model import (
    DeliveryPlan,
    DemandVector,
    Instance,
    LotType,
    Norm,
    best_multiplier,
    evaluate_plan,
    norm_eval_rows,
)

DEFAULT_K = 5


@dataclass(frozen=True)
class FitTable:
    """Per (branch, lot) best multiplier and the deviation it achieves."""

    m_star: np.ndarray  # (branches, lots) int64
    sigma: np.ndarray   # (branches, lots) float64


def best_fit_table(inst: Instance) -> FitTable:
    """Vectorized best_multiplier over all (branch, lot) pairs.

    Running minimum over m with a strict comparison keeps the smallest
    multiplier on ties, matching the scalar contract.
    """
    demand = inst.demand_matrix[:, None, :]  # (B, 1, r)
    lots = inst.lot_matrix[None, :, :]       # (1, L, r)
    best_sigma = norm_eval_rows(demand - lots, inst.branch_norm)
    best_m = np.ones(best_sigma.shape, dtype=np.int64)
    for m in range(2, inst.m_max + 1):
        sig = norm_eval_rows(demand - m * lots, inst.branch_norm)
        better = sig < best_sigma
        best_sigma = np.where(better, sig, best_sigma)
        best_m = np.where(better, m, best_m)
    best_sigma.setflags(write=False)
    best_m.setflags(write=False)
    return FitTable(m_star=best_m, sigma=best_sigma)


def k_best_fits(
    eta: DemandVector,
    universe: Sequence[LotType],
    k: int,
    m_max: int,
    norm: Norm,
) -> list[tuple[int, int, float]]:
    """The k lot-types fitting ``eta`` best: (lot index, multiplier, deviation).

    Sorted by deviation, ties toward the lower lot index; truncated to the
    universe size when k exceeds it.
    """
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    if not universe:
        raise ContractViolation("universe must not be empty")
    scored = []
    for l, lot in enumerate(universe):
        m, sig = best_multiplier(eta, lot, m_max, norm)
        scored.append((sig, l, m))
    top = heapq.nsmallest(min(k, len(universe)), scored)
    return [(l, m, sig) for sig, l, m in top]


@dataclass(frozen=True)
class ScoreTable:
    """Popularity scores and the rank order they induce on lot-types.

    ``rho[l][i]`` counts branches for which lot l is the (i+1)-th best fit;
    ``ranks[l]`` is lot l's 1-based rank under non-increasing lexicographic
    score order (ties to the lower index); ``order[rank-1]`` inverts it.
    """

    k: int
    rho: np.ndarray
    ranks: tuple[int, ...]
    order: tuple[int, ...]


def build_score_table(inst: Instance, k: int = DEFAULT_K, table: FitTable | None = None) -> ScoreTable:
    if k < 1:
        raise ContractViolation(f"k must be >= 1, got {k}")
    if table is None:
        table = best_fit_table(inst)
    n_lots = inst.n_lots
    k_eff = min(k, n_lots)

    # stable sort: deviation ties resolve toward the lower lot index
    ordered = np.argsort(table.sigma, axis=1, kind="stable")[:, :k_eff]
    rho = np.zeros((n_lots, k_eff), dtype=np.int64)
    np.add.at(rho, (ordered, np.broadcast_to(np.arange(k_eff), ordered.shape)), 1)

    order = sorted(range(n_lots), key=lambda l: (tuple(-rho[l]), l))
    ranks = [0] * n_lots
    for pos, l in enumerate(order):
        ranks[l] = pos + 1
    rho.setflags(write=False)
    return ScoreTable(k=k_eff, rho=rho, ranks=tuple(ranks), order=tuple(order))


def subset_iterator(table: ScoreTable, kappa: int) -> Iterator[tuple[int, ...]]:
    """Kappa-subsets of lot indices, lazily, most promising first.

    Order: non-decreasing sum of ranks; equal sums resolve by lexicographic
    order of the sorted rank tuples.  A best-first frontier over single-rank
    increments reaches every subset without materializing the full family.
    """
    n = len(table.order)
    if not (1 <= kappa <= n):
        raise ContractViolation(f"kappa must be in 1..{n}, got {kappa}")
    root = tuple(range(1, kappa + 1))
    frontier: list[tuple[int, tuple[int, ...]]] = [(sum(root), root)]
    seen = {root}
    while frontier:
        total, ranks = heapq.heappop(frontier)
        yield tuple(sorted(table.order[rank - 1] for rank in ranks))
        for i in range(kappa):
            up = ranks[i] + 1
            if up > n:
                continue
            if i + 1 < kappa and ranks[i + 1] == up:
                continue
            child = ranks[:i] + (up,) + ranks[i + 1 :]
            if child not in seen:
                seen.add(child)
                heapq.heappush(frontier, (total + 1, child))


def _assign_arrays(inst: Instance, table: FitTable, subset: Sequence[int]) -> tuple[np.ndarray, np.ndarray]:
    cols = np.asarray(sorted(subset), dtype=np.int64)
    sub_sigma = table.sigma[:, cols]
    pick = sub_sigma.argmin(axis=1)  # first minimum: ties to the lower lot index
    lot_idx = cols[pick]
    mult = table.m_star[np.arange(inst.n_branches), lot_idx].copy()
    return lot_idx, mult


def assign_within_subset(
    inst: Instance, subset: Sequence[int], table: FitTable | None = None
) -> DeliveryPlan:
    """Per-branch best fit restricted to ``subset``; ignores the item window.

    Ties break by smaller deviation, then lower lot index, then smaller
    multiplier.  The returned plan may be window-infeasible.
    """
    if not subset:
        raise ContractViolation("subset must contain at least one lot-type")
    for l in subset:
        if not (0 <= int(l) < inst.n_lots):
            raise ContractViolation(f"lot index {l} out of range")
    if table is None:
        table = best_fit_table(inst)
    lot_idx, mult = _assign_arrays(inst, table, subset)
    assignment = {
        b.id: (int(lot_idx[i]), int(mult[i])) for i, b in enumerate(inst.branches)
    }
    return evaluate_plan(inst, assignment)


def _row_sigma(inst: Instance, lot_row: np.ndarray, demand_row: np.ndarray, m: int) -> float:
    # One-row version of the vectorized norm so repair deltas stay float-consistent.
    return float(norm_eval_rows((demand_row - m * lot_row)[None, :], inst.branch_norm)[0])


def _repair_multipliers(
    inst: Instance, lot_idx: np.ndarray, mult: np.ndarray
) -> np.ndarray | None:
    """Adjust multipliers until the item total lands in the window.

    Greedy: repeatedly apply the cheapest single-step multiplier change
    (smallest deviation increase), downward when above card_hi, upward when
    below card_lo.  Returns None (plan discarded) when no step remains or a
    step overshoots the far side of the window.
    """
    weights = inst.lot_sizes[lot_idx]
    total = int((mult * weights).sum())
    if inst.card_lo <= total <= inst.card_hi:
        return mult

    demand = inst.demand_matrix
    lots = inst.lot_matrix[lot_idx]
    mult = mult.copy()
    cur_sigma = norm_eval_rows(demand - mult[:, None] * lots, inst.branch_norm)

    if total > inst.card_hi:
        direction = -1
        movable = mult >= 2
    else:
        direction = +1
        movable = mult < inst.m_max
    stepped = norm_eval_rows(
        demand - (mult + direction)[:, None] * lots, inst.branch_norm
    )
    heap = [
        (float(stepped[b] - cur_sigma[b]), b, int(mult[b]))
        for b in np.nonzero(movable)[0]
    ]
    heapq.heapify(heap)

    while (total > inst.card_hi) if direction < 0 else (total < inst.card_lo):
        entry = None
        while heap:
            cand = heapq.heappop(heap)
            if cand[2] == mult[cand[1]]:
                entry = cand
                break
        if entry is None:
            return None
        _, b, _ = entry
        mult[b] += direction
        total += direction * int(weights[b])
        cur_sigma[b] = _row_sigma(inst, lots[b], demand[b], int(mult[b]))
        if direction < 0 and total < inst.card_lo:
            return None
        if direction > 0 and total > inst.card_hi:
            return None
        nxt = int(mult[b]) + direction
        if 1 <= nxt <= inst.m_max:
            delta = _row_sigma(inst, lots[b], demand[b], nxt) - cur_sigma[b]
            heapq.heappush(heap, (delta, b, int(mult[b])))
    return mult


def repair_cardinality(inst: Instance, plan: DeliveryPlan) -> DeliveryPlan | None:
    """Window repair for a materialized plan; lot choices never change."""
    lot_idx = np.array([plan.assignment[b.id][0] for b in inst.branches], dtype=np.int64)
    mult = np.array([plan.assignment[b.id][1] for b in inst.branches], dtype=np.int64)
    repaired = _repair_multipliers(inst, lot_idx, mult)
    if repaired is None:
        return None
    assignment = {
        b.id: (int(lot_idx[i]), int(repaired[i])) for i, b in enumerate(inst.branches)
    }
    return evaluate_plan(inst, assignment)


@dataclass(frozen=True)
class Incumbent:
    """A feasible plan found mid-sweep."""

    plan: DeliveryPlan
    objective: float
    found_at: float          # seconds since the solve started
    subset: tuple[int, ...]
    subsets_visited: int


def solve_anytime(
    inst: Instance,
    budget_ms: float | None = None,
    max_subsets: int | None = None,
    k: int = DEFAULT_K,
    callback: Callable[[Incumbent], None] | None = None,
    cancel: Callable[[], bool] | None = None,
) -> Incumbent | None:
    """Sweep promising subsets under a budget; return the final incumbent.

    ``budget_ms`` bounds wall-clock time; ``max_subsets`` bounds the number
    of subsets visited and makes runs deterministic.  With neither set the
    sweep is exhaustive.  ``cancel`` is polled between subsets.  Every
    strict improvement is passed to ``callback``.  Returns None when no
    visited subset produced a feasible plan.
    """
    start = time.perf_counter()
    deadline = None if budget_ms is None else start + budget_ms / 1000.0

    table = best_fit_table(inst)
    score = build_score_table(inst, k, table=table)
    demand = inst.demand_matrix

    best: Incumbent | None = None
    best_vec = np.inf
    visited = 0
    for subset in subset_iterator(score, inst.kappa):
        if cancel is not None and cancel():
            break
        if deadline is not None and time.perf_counter() >= deadline:
            break
        if max_subsets is not None and visited >= max_subsets:
            break
        visited += 1

        lot_idx, mult = _assign_arrays(inst, table, subset)
        repaired = _repair_multipliers(inst, lot_idx, mult)
        if repaired is None:
            continue
        vec_obj = float(
            norm_eval_rows(
                demand - repaired[:, None] * inst.lot_matrix[lot_idx], inst.branch_norm
            ).sum()
        )
        if vec_obj >= best_vec:
            continue
        assignment = {
            b.id: (int(lot_idx[i]), int(repaired[i])) for i, b in enumerate(inst.branches)
        }
        plan = evaluate_plan(inst, assignment)
        if best is not None and plan.objective >= best.objective:
            best_vec = min(best_vec, vec_obj)
            continue
        best = Incumbent(
            plan=plan,
            objective=plan.objective,
            found_at=time.perf_counter() - start,
            subset=subset,
            subsets_visited=visited,
        )
        best_vec = vec_obj
        if callback is not None:
            callback(best)
    return best
