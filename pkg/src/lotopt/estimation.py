"""Demand estimation from cumulative sales of comparable products.

New products have no history, so per-branch, per-size demand is borrowed
from reference products that did sell: each reference contributes its sales
at its own sell-out day, normalized by how widely it was distributed versus
how much it sold across the estimation scope.  The raw table is then scaled
so the grand total matches the planned purchase quantity.

Sales enter as cumulative counts per (branch, product, size) and day;
distribution flags mark where a product was placed at all.  A product with
recorded sales but no placement flag is rejected, since the normalization
would be meaningless.
"""

import csv
import io
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import (
    ContractViolation,
    EstimationError,
    MissingProductError,
    SchemaError,
)
from .model import DemandVector

SALES_COLUMNS = ("branch_id", "product_id", "size", "day", "cumulative_sold")
PLACEMENT_COLUMNS = ("branch_id", "product_id", "size")

Key = tuple[str, str, str]  # (branch, product, size)


@dataclass(frozen=True)
class SalesHistory:
    """Cumulative sales series per (branch, product, size), days 1..len.

    Series must be non-decreasing; any key with positive sales must carry a
    placement flag.  Missing keys read as zero.
    """

    series: Mapping[Key, tuple[float, ...]]
    placements: frozenset[Key]

    def __post_init__(self):
        object.__setattr__(
            self, "series", {k: tuple(float(x) for x in v) for k, v in self.series.items()}
        )
        object.__setattr__(self, "placements", frozenset(self.placements))
        for key, vals in self.series.items():
            if not vals:
                raise ContractViolation(f"empty sales series for {key}")
            prev = 0.0
            for v in vals:
                if v < 0 or v < prev:
                    raise ContractViolation(
                        f"cumulative sales for {key} must be non-negative and non-decreasing"
                    )
                prev = v
            if vals[-1] > 0 and key not in self.placements:
                raise ContractViolation(
                    f"{key} recorded sales without a placement flag"
                )

    @classmethod
    def from_csv_text(cls, sales_csv: str, placements_csv: str) -> "SalesHistory":
        return cls(
            series=_parse_sales(io.StringIO(sales_csv)),
            placements=_parse_placements(io.StringIO(placements_csv)),
        )

    @classmethod
    def from_csv_files(cls, sales_path, placements_path) -> "SalesHistory":
        with open(sales_path, newline="") as sf:
            series = _parse_sales(sf)
        with open(placements_path, newline="") as pf:
            placements = _parse_placements(pf)
        return cls(series=series, placements=placements)

    def products(self) -> frozenset[str]:
        return frozenset(k[1] for k in self.series) | frozenset(
            k[1] for k in self.placements
        )

    def tau(self, branch: str, product: str, size: str, day: int) -> float:
        """Cumulative sales by ``day``; carries the final value forward."""
        if day < 1:
            raise ContractViolation(f"day indices start at 1, got {day}")
        vals = self.series.get((branch, product, size))
        if vals is None:
            return 0.0
        return vals[min(day, len(vals)) - 1]

    def final(self, branch: str, product: str, size: str) -> float:
        vals = self.series.get((branch, product, size))
        return vals[-1] if vals else 0.0

    def day_span(self, product: str) -> int:
        spans = [len(v) for k, v in self.series.items() if k[1] == product]
        if not spans:
            raise MissingProductError(f"no sales series recorded for product {product!r}")
        return max(spans)

    def total_sold(self, product: str, day: int) -> float:
        return sum(
            self.tau(k[0], product, k[2], day)
            for k in self.series
            if k[1] == product
        )


def _require_columns(fieldnames, expected, what: str) -> None:
    if fieldnames is None or tuple(fieldnames) != tuple(expected):
        raise SchemaError(
            what, f"expected columns {','.join(expected)}, got {fieldnames}"
        )


def _parse_sales(stream) -> dict[Key, tuple[float, ...]]:
    reader = csv.DictReader(stream)
    _require_columns(reader.fieldnames, SALES_COLUMNS, "sales csv header")
    by_key: dict[Key, dict[int, float]] = {}
    for i, row in enumerate(reader, start=2):
        try:
            day = int(row["day"])
            sold = float(row["cumulative_sold"])
        except (TypeError, ValueError) as e:
            raise SchemaError(f"sales csv line {i}", str(e)) from None
        if day < 1:
            raise SchemaError(f"sales csv line {i}", f"day must be >= 1, got {day}")
        key = (row["branch_id"], row["product_id"], row["size"])
        by_key.setdefault(key, {})[day] = sold
    series: dict[Key, tuple[float, ...]] = {}
    for key, days in by_key.items():
        span = max(days)
        dense: list[float] = []
        cur = 0.0
        for d in range(1, span + 1):
            cur = days.get(d, cur)  # cumulative: carry forward through gaps
            dense.append(cur)
        series[key] = tuple(dense)
    return series


def _parse_placements(stream) -> frozenset[Key]:
    reader = csv.DictReader(stream)
    _require_columns(reader.fieldnames, PLACEMENT_COLUMNS, "placements csv header")
    return frozenset(
        (row["branch_id"], row["product_id"], row["size"]) for row in reader
    )


@dataclass(frozen=True)
class EstimationConfig:
    """Which references to borrow from and how to anchor the totals.

    ``sellout_fraction`` defines a product's sell-out day as the first day
    its cumulative sales reach that share of its base volume.  The base is
    the product's final cumulative sales unless ``supply_totals`` provides
    the actually supplied quantity.
    """

    similar_products: tuple[str, ...]
    sellout_fraction: float = 0.8
    target_total: float | None = None
    supply_totals: Mapping[str, float] | None = None

    def __post_init__(self):
        object.__setattr__(self, "similar_products", tuple(self.similar_products))
        if not self.similar_products:
            raise ContractViolation("at least one reference product is required")
        if not (0.0 < self.sellout_fraction <= 1.0):
            raise ContractViolation(
                f"sellout_fraction must be in (0, 1], got {self.sellout_fraction}"
            )
        if self.target_total is not None and not (self.target_total > 0):
            raise ContractViolation("target_total must be > 0 when given")


def sellout_day(
    history: SalesHistory,
    product: str,
    fraction: float,
    supply_total: float | None = None,
) -> int:
    """First day cumulative sales reach ``fraction`` of the base volume."""
    if not (0.0 < fraction <= 1.0):
        raise ContractViolation(f"fraction must be in (0, 1], got {fraction}")
    span = history.day_span(product)
    base = supply_total if supply_total is not None else history.total_sold(product, span)
    if base <= 0:
        raise EstimationError(
            f"product {product!r} never sold anything; no sell-out day exists"
        )
    threshold = fraction * base
    for d in range(1, span + 1):
        if history.total_sold(product, d) >= threshold:
            return d
    raise EstimationError(
        f"product {product!r} never reached {fraction:.0%} of its base volume"
    )


@dataclass(frozen=True)
class RawEstimate:
    """Unscaled demand table over an estimation scope.

    ``missing`` flags (branch, size) cells with no usable reference;
    ``dropped`` lists (branch, size, product) contributions skipped for a
    zero scope-wide denominator.
    """

    branches: tuple[str, ...]
    sizes: tuple[str, ...]
    values: np.ndarray
    missing: frozenset[tuple[str, str]] = field(default_factory=frozenset)
    dropped: tuple[tuple[str, str, str], ...] = ()

    def total(self) -> float:
        return float(self.values.sum())


def estimate_raw(
    history: SalesHistory,
    config: EstimationConfig,
    branches: Sequence[str],
    sizes: Sequence[str],
    strategy: str = "direct",
) -> RawEstimate:
    """Estimate relative demand for ``branches`` x ``sizes``.

    "direct" averages each reference product's sell-out-day sales weighted
    by distribution breadth over sales depth within the scope.  "separable"
    rebuilds the table from its row and column totals, which irons out
    sparse cells at the cost of per-cell fidelity.
    """
    if strategy not in ("direct", "separable"):
        raise ContractViolation(f"unknown estimation strategy {strategy!r}")
    branches = tuple(branches)
    sizes = tuple(sizes)
    if not branches or not sizes:
        raise ContractViolation("estimation scope needs at least one branch and one size")

    known = history.products()
    days: dict[str, int] = {}
    chi_scope: dict[str, int] = {}
    tau_scope: dict[str, float] = {}
    for u in config.similar_products:
        if u not in known:
            raise MissingProductError(f"reference product {u!r} has no history")
        supply = None if config.supply_totals is None else config.supply_totals.get(u)
        days[u] = sellout_day(history, u, config.sellout_fraction, supply)
        chi_scope[u] = sum(
            1 for b in branches for s in sizes if (b, u, s) in history.placements
        )
        tau_scope[u] = sum(
            history.tau(b, u, s, days[u]) for b in branches for s in sizes
        )

    values = np.zeros((len(branches), len(sizes)))
    missing: set[tuple[str, str]] = set()
    dropped: list[tuple[str, str, str]] = []
    for i, b in enumerate(branches):
        for j, s in enumerate(sizes):
            terms: list[float] = []
            for u in config.similar_products:
                if history.final(b, u, s) <= 0:
                    continue  # u was never traded in this cell
                if tau_scope[u] <= 0:
                    dropped.append((b, s, u))
                    continue
                terms.append(history.tau(b, u, s, days[u]) * chi_scope[u] / tau_scope[u])
            if terms:
                values[i, j] = sum(terms) / len(terms)
            else:
                missing.add((b, s))

    if len(missing) == len(branches) * len(sizes):
        raise EstimationError(
            "no (branch, size) cell has a usable reference; estimation is impossible"
        )

    if strategy == "separable":
        grand = values.sum()
        if grand <= 0:
            raise EstimationError("raw table sums to zero; cannot separate margins")
        values = np.outer(values.sum(axis=1), values.sum(axis=0)) / grand

    return RawEstimate(
        branches=branches,
        sizes=sizes,
        values=values,
        missing=frozenset(missing),
        dropped=tuple(dropped),
    )


def scale_to_total(raw: RawEstimate, target_total: float) -> dict[str, DemandVector]:
    """Scale the raw table so it sums to ``target_total`` items."""
    if not (target_total > 0):
        raise ContractViolation(f"target_total must be > 0, got {target_total}")
    total = raw.total()
    if total <= 0:
        raise EstimationError("raw estimate sums to zero; nothing to scale")
    factor = target_total / total
    return {
        b: DemandVector(tuple(float(x) * factor for x in raw.values[i]))
        for i, b in enumerate(raw.branches)
    }
