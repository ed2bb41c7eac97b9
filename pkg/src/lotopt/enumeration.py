"""Lot-type universe generation from per-size and total-count bounds."""

from dataclasses import dataclass

from .errors import ContractViolation, UniverseTooLarge
from .model import LotType, SizeSet

DEFAULT_UNIVERSE_CAP = 1_000_000


@dataclass(frozen=True)
class LotBounds:
    """Box bounds per size plus bounds on the lot's total item count."""

    per_size_lo: tuple[int, ...]
    per_size_hi: tuple[int, ...]
    total_lo: int
    total_hi: int

    def __post_init__(self):
        object.__setattr__(self, "per_size_lo", tuple(int(x) for x in self.per_size_lo))
        object.__setattr__(self, "per_size_hi", tuple(int(x) for x in self.per_size_hi))
        if len(self.per_size_lo) != len(self.per_size_hi):
            raise ContractViolation("per_size_lo and per_size_hi must have equal length")
        if not self.per_size_lo:
            raise ContractViolation("bounds need at least one size slot")
        for lo, hi in zip(self.per_size_lo, self.per_size_hi):
            if lo < 0 or hi < lo:
                raise ContractViolation(f"need 0 <= lo <= hi per size, got [{lo}, {hi}]")
        if self.total_lo < 1:
            raise ContractViolation("total_lo must be >= 1: the empty lot is not a lot-type")
        if self.total_hi < self.total_lo:
            raise ContractViolation(
                f"need total_lo <= total_hi, got [{self.total_lo}, {self.total_hi}]"
            )


def count_lot_types(bounds: LotBounds) -> int:
    """Number of count vectors inside the box with total in range (cheap DP)."""
    # Convolve the per-size count ranges; track only sums <= total_hi.
    sums = {0: 1}
    for lo, hi in zip(bounds.per_size_lo, bounds.per_size_hi):
        nxt: dict[int, int] = {}
        for s, ways in sums.items():
            for c in range(lo, hi + 1):
                t = s + c
                if t > bounds.total_hi:
                    break
                nxt[t] = nxt.get(t, 0) + ways
        sums = nxt
    return sum(w for s, w in sums.items() if bounds.total_lo <= s <= bounds.total_hi)


def enumerate_lot_types(
    bounds: LotBounds, sizes: SizeSet, cap: int = DEFAULT_UNIVERSE_CAP
) -> list[LotType]:
    """All lot-types satisfying ``bounds``, in lexicographic count order.

    Raises UniverseTooLarge before materializing anything if the result
    would exceed ``cap`` entries.  An unsatisfiable box yields [].
    """
    r = len(sizes)
    if len(bounds.per_size_lo) != r:
        raise ContractViolation(
            f"bounds cover {len(bounds.per_size_lo)} sizes but the size set has {r}"
        )
    n = count_lot_types(bounds)
    if n > cap:
        raise UniverseTooLarge(
            f"bounds admit {n} lot-types, above the cap of {cap}; tighten the bounds"
        )

    los, his = bounds.per_size_lo, bounds.per_size_hi
    # Suffix sums of the per-size extremes let us prune branches whose total
    # can no longer land inside [total_lo, total_hi].
    min_rest = [0] * (r + 1)
    max_rest = [0] * (r + 1)
    for i in range(r - 1, -1, -1):
        min_rest[i] = min_rest[i + 1] + los[i]
        max_rest[i] = max_rest[i + 1] + his[i]

    out: list[LotType] = []
    prefix: list[int] = []

    def rec(i: int, total: int) -> None:
        if i == r:
            if bounds.total_lo <= total <= bounds.total_hi:
                out.append(LotType(tuple(prefix)))
            return
        for c in range(los[i], his[i] + 1):
            t = total + c
            if t + min_rest[i + 1] > bounds.total_hi:
                break
            if t + max_rest[i + 1] < bounds.total_lo:
                continue
            prefix.append(c)
            rec(i + 1, t)
            prefix.pop()

    rec(0, 0)
    return out
