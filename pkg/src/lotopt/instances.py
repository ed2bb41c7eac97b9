"""Instance and plan serialization, synthetic instance generation, gap reports.

Instance documents are JSON with either an explicit lot universe or bounds
from which one is enumerated on load.  Serialization is deterministic:
equal instances produce byte-identical files, which keeps generated corpora
diffable and golden tests honest.
"""

import json
import math
from dataclasses import dataclass
from decimal import ROUND_HALF_UP, Decimal

import numpy as np

from .enumeration import LotBounds, enumerate_lot_types
from .errors import ContractViolation, LotOptError, SchemaError
from .model import (
    L1,
    Branch,
    DeliveryPlan,
    DemandVector,
    Instance,
    LotType,
    Norm,
    SizeSet,
)

_NORM_NAMES = {"l1": "L1", "l2": "L2", "linf": "LInf", "lp": "LP"}
_NORM_KINDS = {v: k for k, v in _NORM_NAMES.items()}


def norm_to_dict(norm: Norm) -> dict:
    d = {"type": _NORM_NAMES[norm.kind]}
    if norm.kind == "lp":
        d["p"] = norm.p
    return d


def norm_from_dict(d, path: str = "branch_norm") -> Norm:
    if not isinstance(d, dict) or "type" not in d:
        raise SchemaError(path, 'expected an object like {"type": "L1"}')
    kind = _NORM_KINDS.get(d["type"])
    if kind is None:
        raise SchemaError(f"{path}.type", f"unknown norm {d['type']!r}")
    if kind == "lp":
        p = d.get("p")
        if not isinstance(p, (int, float)) or not p > 0:
            raise SchemaError(f"{path}.p", "LP norm requires a number p > 0")
        return Norm("lp", float(p))
    if "p" in d:
        raise SchemaError(f"{path}.p", f"{d['type']} takes no p parameter")
    return Norm(kind)


def _expect(doc: dict, key: str, types, path: str = ""):
    where = f"{path}.{key}" if path else key
    if key not in doc:
        raise SchemaError(where, "required field missing")
    val = doc[key]
    if types is int and isinstance(val, bool):
        raise SchemaError(where, "expected an integer")
    if not isinstance(val, types):
        raise SchemaError(where, f"expected {types}, got {type(val).__name__}")
    return val


def instance_from_dict(doc: dict) -> Instance:
    """Validate a parsed instance document and build an Instance."""
    if not isinstance(doc, dict):
        raise SchemaError("$", "instance document must be a JSON object")
    size_labels = _expect(doc, "sizes", list)
    if not all(isinstance(s, str) for s in size_labels):
        raise SchemaError("sizes", "size labels must be strings")

    branch_docs = _expect(doc, "branches", list)
    branches = []
    for i, bd in enumerate(branch_docs):
        where = f"branches[{i}]"
        if not isinstance(bd, dict):
            raise SchemaError(where, "expected an object")
        bid = _expect(bd, "id", str, where)
        demand = _expect(bd, "demand", list, where)
        if not all(isinstance(x, (int, float)) and not isinstance(x, bool) for x in demand):
            raise SchemaError(f"{where}.demand", "demand entries must be numbers")
        try:
            branches.append(Branch(bid, DemandVector(tuple(demand))))
        except ContractViolation as e:
            raise SchemaError(f"{where}.demand", str(e)) from None

    has_universe = "lot_universe" in doc
    has_bounds = "lot_bounds" in doc
    if has_universe == has_bounds:
        raise SchemaError(
            "lot_universe", "provide exactly one of lot_universe or lot_bounds"
        )

    try:
        sizes = SizeSet(tuple(size_labels))
    except ContractViolation as e:
        raise SchemaError("sizes", str(e)) from None

    if has_universe:
        lots_doc = _expect(doc, "lot_universe", list)
        universe = []
        for i, counts in enumerate(lots_doc):
            where = f"lot_universe[{i}]"
            if not isinstance(counts, list) or not all(
                isinstance(c, int) and not isinstance(c, bool) for c in counts
            ):
                raise SchemaError(where, "expected an array of integers")
            try:
                universe.append(LotType(tuple(counts)))
            except ContractViolation as e:
                raise SchemaError(where, str(e)) from None
    else:
        bd = _expect(doc, "lot_bounds", dict)
        try:
            bounds = LotBounds(
                per_size_lo=tuple(_expect(bd, "per_size_lo", list, "lot_bounds")),
                per_size_hi=tuple(_expect(bd, "per_size_hi", list, "lot_bounds")),
                total_lo=_expect(bd, "total_lo", int, "lot_bounds"),
                total_hi=_expect(bd, "total_hi", int, "lot_bounds"),
            )
            universe = enumerate_lot_types(bounds, sizes)
        except (ContractViolation, ValueError) as e:
            raise SchemaError("lot_bounds", str(e)) from None
        if not universe:
            raise SchemaError("lot_bounds", "bounds admit no lot-types")

    norm = norm_from_dict(doc["branch_norm"]) if "branch_norm" in doc else L1
    try:
        return Instance(
            sizes=sizes,
            branches=tuple(branches),
            lot_universe=tuple(universe),
            kappa=_expect(doc, "kappa", int),
            m_max=_expect(doc, "m_max", int),
            card_lo=_expect(doc, "card_lo", int),
            card_hi=_expect(doc, "card_hi", int),
            branch_norm=norm,
        )
    except ContractViolation as e:
        raise SchemaError("$", str(e)) from None


def instance_to_dict(inst: Instance) -> dict:
    return {
        "sizes": list(inst.sizes.labels),
        "branches": [
            {"id": b.id, "demand": list(b.demand.values)} for b in inst.branches
        ],
        "lot_universe": [list(l.counts) for l in inst.lot_universe],
        "kappa": inst.kappa,
        "m_max": inst.m_max,
        "card_lo": inst.card_lo,
        "card_hi": inst.card_hi,
        "branch_norm": norm_to_dict(inst.branch_norm),
    }


def read_instance(path) -> Instance:
    with open(path) as f:
        try:
            doc = json.load(f)
        except json.JSONDecodeError as e:
            raise SchemaError(f"{path}:{e.lineno}", e.msg) from None
    return instance_from_dict(doc)


def write_instance(inst: Instance, path) -> None:
    with open(path, "w") as f:
        json.dump(instance_to_dict(inst), f, indent=2)
        f.write("\n")


def plan_to_dict(inst: Instance, plan: DeliveryPlan) -> dict:
    return {
        "assignment": {
            bid: {"lot": list(inst.lot_universe[l].counts), "m": m}
            for bid, (l, m) in plan.assignment.items()
        },
        "objective": plan.objective,
        "total_items": plan.total_items,
        "feasible": plan.feasible,
    }


def plan_from_dict(inst: Instance, doc: dict) -> DeliveryPlan:
    from .model import evaluate_plan

    if not isinstance(doc, dict) or "assignment" not in doc:
        raise SchemaError("assignment", "required field missing")
    index = {l.counts: i for i, l in enumerate(inst.lot_universe)}
    assignment = {}
    for bid, entry in doc["assignment"].items():
        where = f"assignment.{bid}"
        if not isinstance(entry, dict) or "lot" not in entry or "m" not in entry:
            raise SchemaError(where, 'expected {"lot": [...], "m": n}')
        counts = tuple(entry["lot"])
        if counts not in index:
            raise SchemaError(f"{where}.lot", f"{list(counts)} is not in the universe")
        assignment[bid] = (index[counts], int(entry["m"]))
    try:
        return evaluate_plan(inst, assignment)
    except ContractViolation as e:
        raise SchemaError("assignment", str(e)) from None


def write_plan(inst: Instance, plan: DeliveryPlan, path) -> None:
    with open(path, "w") as f:
        json.dump(plan_to_dict(inst, plan), f, indent=2)
        f.write("\n")


@dataclass(frozen=True)
class GeneratorProfile:
    """Shape knobs for synthetic instances.

    ``window`` is either "demand-band" (a +/-5% band around total demand) or
    an explicit (card_lo, card_hi) pair.
    """

    branches: int
    sizes: int
    bounds: LotBounds
    kappa: int
    m_max: int
    window: object = "demand-band"
    volume_median: float = 10.0
    volume_sigma: float = 0.6

    def __post_init__(self):
        if self.branches < 1 or self.sizes < 1:
            raise ContractViolation("profile needs at least one branch and one size")
        if self.m_max < 1 or self.kappa < 1:
            raise ContractViolation("kappa and m_max must be >= 1")
        if self.window != "demand-band":
            lo, hi = self.window
            if not (0 <= int(lo) <= int(hi)):
                raise ContractViolation(f"bad explicit window {self.window}")


def generate_instance(seed: int, profile: GeneratorProfile) -> Instance:
    """Deterministic synthetic instance: log-normal branch volumes spread
    over a mixture of three archetype size curves."""
    rng = np.random.default_rng(seed)
    r = profile.sizes
    sizes = SizeSet(tuple(f"s{i}" for i in range(r)))
    universe = enumerate_lot_types(profile.bounds, sizes)

    volumes = rng.lognormal(mean=math.log(profile.volume_median),
                            sigma=profile.volume_sigma, size=profile.branches)
    # Archetype curves: bumps peaked low, mid and high across the size axis.
    idx = np.arange(r)
    peaks = np.array([0.2, 0.5, 0.8]) * max(r - 1, 1)
    width = max(r / 4.0, 0.75)
    archetypes = np.exp(-((idx[None, :] - peaks[:, None]) ** 2) / (2 * width**2))
    archetypes /= archetypes.sum(axis=1, keepdims=True)
    weights = rng.dirichlet(alpha=[1.5, 1.5, 1.5], size=profile.branches)
    curves = weights @ archetypes

    demand = np.round(volumes[:, None] * curves, 4)
    branches = tuple(
        Branch(f"b{i:04d}", DemandVector(tuple(demand[i]))) for i in range(profile.branches)
    )

    if profile.window == "demand-band":
        total = float(demand.sum())
        card_lo = int(math.floor(0.95 * total))
        card_hi = int(math.ceil(1.05 * total))
    else:
        card_lo, card_hi = (int(x) for x in profile.window)

    return Instance(
        sizes=sizes,
        branches=branches,
        lot_universe=tuple(universe),
        kappa=profile.kappa,
        m_max=profile.m_max,
        card_lo=card_lo,
        card_hi=card_hi,
        branch_norm=L1,
    )


def gap_report(exact: float, heuristic: float) -> str:
    """Relative regret of the heuristic, as a percent string.

    100 * (heuristic - exact) / exact, rounded half-up to three decimals.
    """
    if not (exact > 0):
        raise ContractViolation(f"exact objective must be > 0, got {exact}")
    gap = Decimal(100.0 * (heuristic - exact) / exact)
    return f"{gap.quantize(Decimal('0.001'), rounding=ROUND_HALF_UP)}%"


def gap_report_csv(rows: list[tuple[str, float, float]]) -> str:
    """CSV comparing objectives: config,exact,heuristic,gap_pct."""
    lines = ["config,exact,heuristic,gap_pct"]
    for config, exact, heuristic in rows:
        lines.append(f"{config},{exact},{heuristic},{gap_report(exact, heuristic)}")
    return "\n".join(lines) + "\n"
