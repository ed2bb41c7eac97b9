"""Core domain model for lot-based supply planning.

A product reaches branches only as whole lots: a lot-type fixes how many
items of each size travel together, and a branch receives an integral
multiple of exactly one lot-type.  This module defines the vocabulary
shared by every solver (size sets, demand vectors, lot-types, norms,
instances, delivery plans) plus the deviation measure between what a
branch wants and what a lot multiple delivers.

Deviations within a branch use the instance's configurable norm; across
branches they are always summed (L1 aggregation), which is what makes
the subset solvers separable per branch.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ContractViolation, InvalidParameter

_NORM_KINDS = ("l1", "l2", "linf", "lp")


@dataclass(frozen=True)
class Norm:
    """Per-branch deviation norm: L1, L2, LInf, or a general p-norm (p > 0)."""

    kind: str
    p: float | None = None

    def __post_init__(self):
        if self.kind not in _NORM_KINDS:
            raise InvalidParameter(f"unknown norm kind {self.kind!r}")
        if self.kind == "lp":
            if self.p is None or not (float(self.p) > 0.0):
                raise InvalidParameter("lp norm requires p > 0")
            object.__setattr__(self, "p", float(self.p))
        elif self.p is not None:
            raise InvalidParameter(f"norm {self.kind!r} takes no p parameter")

    @property
    def convex(self) -> bool:
        # p-norms with p < 1 violate the triangle inequality; everything else
        # here is a true norm and therefore convex in the lot multiplier.
        return self.kind != "lp" or self.p >= 1.0


L1 = Norm("l1")
L2 = Norm("l2")
LINF = Norm("linf")


def lp_norm(p: float) -> Norm:
    return Norm("lp", p)


def norm_eval(values: Sequence[float], norm: Norm) -> float:
    """Evaluate ``norm`` on a plain vector of floats."""
    n = len(values)
    if n == 0:
        raise ContractViolation("norm of an empty vector is undefined")
    if norm.kind == "l1":
        return float(sum(abs(x) for x in values))
    if norm.kind == "l2":
        return float(np.sqrt(sum(x * x for x in values)))
    if norm.kind == "linf":
        return float(max(abs(x) for x in values))
    acc = sum(abs(x) ** norm.p for x in values)
    return float(acc ** (1.0 / norm.p))


def norm_eval_rows(diff: np.ndarray, norm: Norm) -> np.ndarray:
    """Evaluate ``norm`` along the last axis of an array (vector per row)."""
    a = np.asarray(diff, dtype=float)
    if a.shape[-1] == 0:
        raise ContractViolation("norm of an empty vector is undefined")
    if norm.kind == "l1":
        return np.abs(a).sum(axis=-1)
    if norm.kind == "l2":
        return np.sqrt((a * a).sum(axis=-1))
    if norm.kind == "linf":
        return np.abs(a).max(axis=-1)
    return (np.abs(a) ** norm.p).sum(axis=-1) ** (1.0 / norm.p)


@dataclass(frozen=True)
class SizeSet:
    """Ordered, duplicate-free size labels; fixes vector dimensionality r."""

    labels: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "labels", tuple(str(x) for x in self.labels))
        if not self.labels:
            raise ContractViolation("a size set needs at least one size")
        if len(set(self.labels)) != len(self.labels):
            raise ContractViolation("size labels must be unique")

    def __len__(self) -> int:
        return len(self.labels)


@dataclass(frozen=True)
class DemandVector:
    """Non-negative fractional demand per size for one branch."""

    values: tuple[float, ...]

    def __post_init__(self):
        vals = tuple(float(x) for x in self.values)
        object.__setattr__(self, "values", vals)
        if not vals:
            raise ContractViolation("a demand vector needs at least one entry")
        for x in vals:
            if not np.isfinite(x) or x < 0.0:
                raise ContractViolation(f"demand entries must be finite and >= 0, got {x}")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def total(self) -> float:
        return float(sum(self.values))


@dataclass(frozen=True)
class LotType:
    """Item count per size for one pre-packed lot; at least one item overall."""

    counts: tuple[int, ...]

    def __post_init__(self):
        counts = tuple(int(c) for c in self.counts)
        object.__setattr__(self, "counts", counts)
        if not counts:
            raise ContractViolation("a lot-type needs at least one size slot")
        if any(c < 0 for c in counts):
            raise ContractViolation("lot counts must be >= 0")
        if sum(counts) < 1:
            raise ContractViolation("a lot-type must contain at least one item")

    def __len__(self) -> int:
        return len(self.counts)

    @property
    def size(self) -> int:
        """Total item count of the lot (its L1 weight)."""
        return sum(self.counts)


def deviation(eta: DemandVector, lot: LotType, m: int, norm: Norm) -> float:
    """Distance between demand ``eta`` and ``m`` copies of ``lot`` under ``norm``."""
    if len(eta) != len(lot):
        raise ContractViolation(
            f"demand has {len(eta)} sizes but lot has {len(lot)}"
        )
    if m < 1:
        raise ContractViolation(f"multiplier must be >= 1, got {m}")
    residual = [e - m * c for e, c in zip(eta.values, lot.counts)]
    return norm_eval(residual, norm)


def best_multiplier(
    eta: DemandVector, lot: LotType, m_max: int, norm: Norm
) -> tuple[int, float]:
    """Multiplier in 1..m_max minimizing the deviation, ties to the smaller m.

    For convex norms the deviation is unimodal in m, so a binary search on
    the first differences finds the leftmost minimizer; p-norms with p < 1
    are not convex and fall back to a linear scan.
    """
    if m_max < 1:
        raise ContractViolation(f"m_max must be >= 1, got {m_max}")

    def f(m: int) -> float:
        return deviation(eta, lot, m, norm)

    if not norm.convex:
        best_m, best_v = 1, f(1)
        for m in range(2, m_max + 1):
            v = f(m)
            if v < best_v:
                best_m, best_v = m, v
        return best_m, best_v

    lo, hi = 1, m_max
    while lo < hi:
        mid = (lo + hi) // 2
        if f(mid + 1) >= f(mid):
            hi = mid  # minimum is at mid or earlier
        else:
            lo = mid + 1
    return lo, f(lo)


@dataclass(frozen=True)
class Branch:
    id: str
    demand: DemandVector


@dataclass(frozen=True)
class Instance:
    """One solvable problem: branches, lot universe, and the three knobs.

    Invariants enforced at construction: non-empty branches with unique ids
    and conforming demand vectors, a non-empty duplicate-free lot universe,
    1 <= kappa <= number of lot-types, m_max >= 1, and a sane item window
    0 <= card_lo <= card_hi.
    """

    sizes: SizeSet
    branches: tuple[Branch, ...]
    lot_universe: tuple[LotType, ...]
    kappa: int
    m_max: int
    card_lo: int
    card_hi: int
    branch_norm: Norm = L1

    def __post_init__(self):
        object.__setattr__(self, "branches", tuple(self.branches))
        object.__setattr__(self, "lot_universe", tuple(self.lot_universe))
        r = len(self.sizes)
        if not self.branches:
            raise ContractViolation("an instance needs at least one branch")
        ids = [b.id for b in self.branches]
        if len(set(ids)) != len(ids):
            raise ContractViolation("branch ids must be unique")
        for b in self.branches:
            if len(b.demand) != r:
                raise ContractViolation(
                    f"branch {b.id!r} demand has {len(b.demand)} sizes, expected {r}"
                )
        if not self.lot_universe:
            raise ContractViolation("the lot universe must not be empty")
        for lot in self.lot_universe:
            if len(lot) != r:
                raise ContractViolation(
                    f"lot {lot.counts} has {len(lot)} sizes, expected {r}"
                )
        if len(set(l.counts for l in self.lot_universe)) != len(self.lot_universe):
            raise ContractViolation("lot-types in the universe must be pairwise distinct")
        if not (1 <= self.kappa <= len(self.lot_universe)):
            raise ContractViolation(
                f"kappa must be in 1..{len(self.lot_universe)}, got {self.kappa}"
            )
        if self.m_max < 1:
            raise ContractViolation(f"m_max must be >= 1, got {self.m_max}")
        if not (0 <= self.card_lo <= self.card_hi):
            raise ContractViolation(
                f"need 0 <= card_lo <= card_hi, got [{self.card_lo}, {self.card_hi}]"
            )

    @property
    def n_branches(self) -> int:
        return len(self.branches)

    @property
    def n_lots(self) -> int:
        return len(self.lot_universe)

    @cached_property
    def branch_ids(self) -> tuple[str, ...]:
        return tuple(b.id for b in self.branches)

    @cached_property
    def demand_matrix(self) -> np.ndarray:
        m = np.array([b.demand.values for b in self.branches], dtype=float)
        m.setflags(write=False)
        return m

    @cached_property
    def lot_matrix(self) -> np.ndarray:
        m = np.array([l.counts for l in self.lot_universe], dtype=float)
        m.setflags(write=False)
        return m

    @cached_property
    def lot_sizes(self) -> np.ndarray:
        s = np.array([l.size for l in self.lot_universe], dtype=np.int64)
        s.setflags(write=False)
        return s

    def max_total_items(self) -> int:
        """Largest item count any assignment can reach."""
        return self.n_branches * self.m_max * int(self.lot_sizes.max())

    def with_overrides(
        self,
        kappa: int | None = None,
        m_max: int | None = None,
        card_lo: int | None = None,
        card_hi: int | None = None,
    ) -> "Instance":
        """Copy with what-if parameter overrides; revalidates everything."""
        return Instance(
            sizes=self.sizes,
            branches=self.branches,
            lot_universe=self.lot_universe,
            kappa=self.kappa if kappa is None else kappa,
            m_max=self.m_max if m_max is None else m_max,
            card_lo=self.card_lo if card_lo is None else card_lo,
            card_hi=self.card_hi if card_hi is None else card_hi,
            branch_norm=self.branch_norm,
        )


@dataclass(frozen=True)
class DeliveryPlan:
    """An assignment of (lot-type, multiplier) per branch plus derived facts.

    ``assignment`` maps branch id to (lot index into the universe, multiplier)
    and is ordered like the instance's branch list.  ``feasible`` reflects
    both the lot-type budget kappa and the total item window.
    """

    assignment: Mapping[str, tuple[int, int]]
    objective: float
    total_items: int
    used_lot_indices: frozenset[int]
    feasible: bool


def _check_assignment(inst: Instance, assignment: Mapping[str, tuple[int, int]]) -> None:
    if set(assignment) != set(inst.branch_ids):
        missing = set(inst.branch_ids) - set(assignment)
        extra = set(assignment) - set(inst.branch_ids)
        raise ContractViolation(
            f"assignment must cover each branch exactly once (missing={sorted(missing)}, unknown={sorted(extra)})"
        )
    for bid, (l, m) in assignment.items():
        if not (0 <= l < inst.n_lots):
            raise ContractViolation(f"branch {bid!r}: lot index {l} out of range")
        if not (1 <= m <= inst.m_max):
            raise ContractViolation(f"branch {bid!r}: multiplier {m} outside 1..{inst.m_max}")


def evaluate_plan(inst: Instance, assignment: Mapping[str, tuple[int, int]]) -> DeliveryPlan:
    """Build a DeliveryPlan, computing objective, item total and feasibility."""
    _check_assignment(inst, assignment)
    ordered: dict[str, tuple[int, int]] = {}
    objective = 0.0
    total = 0
    used: set[int] = set()
    for b in inst.branches:
        l, m = assignment[b.id]
        ordered[b.id] = (int(l), int(m))
        objective += deviation(b.demand, inst.lot_universe[l], m, inst.branch_norm)
        total += m * inst.lot_universe[l].size
        used.add(int(l))
    feasible = len(used) <= inst.kappa and inst.card_lo <= total <= inst.card_hi
    return DeliveryPlan(
        assignment=ordered,
        objective=objective,
        total_items=total,
        used_lot_indices=frozenset(used),
        feasible=feasible,
    )


def plan_objective(inst: Instance, plan: DeliveryPlan) -> float:
    """Recompute the summed deviation from the raw assignment."""
    _check_assignment(inst, plan.assignment)
    acc = 0.0
    for b in inst.branches:
        l, m = plan.assignment[b.id]
        acc += deviation(b.demand, inst.lot_universe[l], m, inst.branch_norm)
    return acc


def plan_total_items(inst: Instance, plan: DeliveryPlan) -> int:
    """Recompute the total item count from the raw assignment."""
    _check_assignment(inst, plan.assignment)
    return sum(m * inst.lot_universe[l].size for l, m in plan.assignment.values())
