"""Exact solvers: an enumeration oracle and a per-subset dynamic program.

Both solvers return the canonical optimal plan: among all feasible plans
they minimize the tuple (objective, total item count, per-branch
(lot, multiplier) sequence in branch order).  Sharing one tie rule is what
lets tests demand bit-identical plans from independent code paths.
"""

import itertools
from math import comb, inf

import numpy as np

from .errors import ContractViolation, ProblemTooLarge
from .model import DeliveryPlan, Instance, deviation, evaluate_plan

DEFAULT_STATE_CAP = 100_000
DEFAULT_WORK_CAP = 200_000_000
DEFAULT_ASSIGNMENT_CAP = 10_000_000


def _plan_key(plan: DeliveryPlan) -> tuple:
    return (plan.objective, plan.total_items, tuple(plan.assignment.values()))


def brute_force(
    inst: Instance,
    restrict_to: tuple[int, ...] | None = None,
    max_assignments: int = DEFAULT_ASSIGNMENT_CAP,
) -> DeliveryPlan | None:
    """Enumerate every assignment; the ground-truth oracle for small instances.

    ``restrict_to`` limits branches to the given lot indices (for checking
    the fixed-subset solver); the kappa and window constraints always apply.
    Returns None when no assignment is feasible.
    """
    if restrict_to is None:
        allowed = list(range(inst.n_lots))
    else:
        allowed = sorted(set(restrict_to))
        for l in allowed:
            if not (0 <= l < inst.n_lots):
                raise ContractViolation(f"lot index {l} out of range")
        if not allowed:
            raise ContractViolation("restrict_to must name at least one lot")

    per_branch = []
    for b in inst.branches:
        opts = []
        for l in allowed:
            lot = inst.lot_universe[l]
            for m in range(1, inst.m_max + 1):
                opts.append((l, m, deviation(b.demand, lot, m, inst.branch_norm), m * lot.size))
        per_branch.append(opts)

    count = len(per_branch[0]) ** inst.n_branches
    if count > max_assignments:
        raise ProblemTooLarge(
            f"{count} assignments exceed the enumeration cap of {max_assignments}"
        )

    best_key: tuple | None = None
    best_assign: tuple | None = None
    for combo in itertools.product(*per_branch):
        used = {c[0] for c in combo}
        if len(used) > inst.kappa:
            continue
        total = sum(c[3] for c in combo)
        if not (inst.card_lo <= total <= inst.card_hi):
            continue
        objective = 0.0
        for c in combo:
            objective += c[2]
        key = (objective, total, tuple((c[0], c[1]) for c in combo))
        if best_key is None or key < best_key:
            best_key, best_assign = key, key[2]
    if best_assign is None:
        return None
    assignment = {b.id: lm for b, lm in zip(inst.branches, best_assign)}
    return evaluate_plan(inst, assignment)


def dp_fixed_subset(
    inst: Instance,
    subset: tuple[int, ...],
    max_states: int = DEFAULT_STATE_CAP,
) -> DeliveryPlan | None:
    """Optimal plan restricted to ``subset`` lot-types, or None if infeasible.

    Dynamic program over branches x cumulative item count.  The item axis is
    capped at min(card_hi, largest reachable total), and refused above
    ``max_states``.  Ties break toward the smaller item total, then the
    smaller lot index, then the smaller multiplier.
    """
    lots = tuple(sorted(set(int(l) for l in subset)))
    if not lots:
        raise ContractViolation("subset must contain at least one lot-type")
    for l in lots:
        if not (0 <= l < inst.n_lots):
            raise ContractViolation(f"lot index {l} out of range")
    if len(lots) > inst.kappa:
        raise ContractViolation(f"subset of {len(lots)} lots exceeds kappa={inst.kappa}")

    q = inst.n_branches
    weights = [inst.lot_universe[l].size for l in lots]
    cap = min(inst.card_hi, q * inst.m_max * max(weights))
    if inst.card_lo > cap:
        return None
    if cap > max_states:
        raise ProblemTooLarge(
            f"item axis of {cap} states exceeds the cap of {max_states}"
        )

    # sigma[b][j][m-1]: deviation of branch b on subset lot j with multiplier m.
    sigma = [
        [
            [
                deviation(b.demand, inst.lot_universe[l], m, inst.branch_norm)
                for m in range(1, inst.m_max + 1)
            ]
            for l in lots
        ]
        for b in inst.branches
    ]

    # g[b][c]: cheapest cost covering branches b.. using exactly c items.
    g = [None] * (q + 1)
    tail = np.full(cap + 1, inf)
    tail[0] = 0.0
    g[q] = tail
    for b in range(q - 1, -1, -1):
        cur = np.full(cap + 1, inf)
        nxt = g[b + 1]
        for j in range(len(lots)):
            for m in range(1, inst.m_max + 1):
                w = m * weights[j]
                if w > cap:
                    continue
                np.minimum(cur[w:], sigma[b][j][m - 1] + nxt[: cap + 1 - w], out=cur[w:])
        g[b] = cur

    window = g[0][inst.card_lo : cap + 1]
    if not np.isfinite(window).any():
        return None
    total = inst.card_lo + int(np.argmin(window))  # argmin takes the smallest c on ties

    assignment: dict[str, tuple[int, int]] = {}
    remaining = total
    for b in range(q):
        target = g[b][remaining]
        found = False
        for j in range(len(lots)):
            for m in range(1, inst.m_max + 1):
                w = m * weights[j]
                if w <= remaining and sigma[b][j][m - 1] + g[b + 1][remaining - w] == target:
                    assignment[inst.branches[b].id] = (lots[j], m)
                    remaining -= w
                    found = True
                    break
            if found:
                break
        if not found:  # cannot happen: target was built from these transitions
            raise AssertionError("dp reconstruction lost its path")
    return evaluate_plan(inst, assignment)


def exact_solve(
    inst: Instance,
    max_states: int = DEFAULT_STATE_CAP,
    max_work: int = DEFAULT_WORK_CAP,
) -> DeliveryPlan | None:
    """Global optimum by running the DP over every kappa-subset of lot-types.

    Intended for small universes (roughly |L| <= 25); larger inputs raise
    ProblemTooLarge and should go through the MILP emitter instead.
    Returns None when the instance is infeasible.
    """
    n = inst.n_lots
    k = inst.kappa
    subsets = comb(n, k)
    cap = min(inst.card_hi, inst.max_total_items())
    work = subsets * inst.n_branches * (cap + 1) * k * inst.m_max
    if cap > max_states or work > max_work:
        raise ProblemTooLarge(
            f"{subsets} subsets x {cap + 1} item states is past the exact-solver "
            "budget; emit a MILP model for an external solver instead"
        )

    best: DeliveryPlan | None = None
    best_key: tuple | None = None
    for subset in itertools.combinations(range(n), k):
        plan = dp_fixed_subset(inst, subset, max_states=max_states)
        if plan is None:
            continue
        key = _plan_key(plan)
        if best_key is None or key < best_key:
            best, best_key = plan, key
    return best
