"""Mixed-integer model emission in CPLEX LP text format.

Two formulations of the same problem: "strong" assigns a binary per
(branch, lot, multiplier) triple with the deviation priced directly into
the objective, "weak" adds continuous per-(branch, size) supply and
absolute-deviation variables and only supports the L1 branch norm.  The
emitter exists for instances past the exact solver's budget; the text is
deterministic, so fixtures can be compared byte for byte.

Variable naming: x_<branch>_<lot>_<multiplier>, y_<lot>, a_<branch>_<size>,
z_<branch>_<size>; branch, lot and size are 0-based indices into the
instance, the multiplier is its literal value.
"""

from dataclasses import dataclass

from .errors import InvalidParameter, UnsupportedModel
from .model import Instance, deviation

_FORMULATIONS = ("strong", "weak")
_TERMS_PER_LINE = 8


def _num(v: float) -> str:
    if float(v).is_integer():
        return str(int(v))
    return repr(float(v))


def _expr(terms: list[tuple[float, str]]) -> str:
    parts: list[str] = []
    for i, (coef, name) in enumerate(terms):
        mag = abs(coef)
        body = name if mag == 1 else f"{_num(mag)} {name}"
        if i == 0:
            parts.append(body if coef >= 0 else f"- {body}")
        else:
            parts.append(f"+ {body}" if coef >= 0 else f"- {body}")
    return " ".join(parts)


def _wrap(text: str, indent: str = "   ") -> list[str]:
    words = text.split(" ")
    lines: list[str] = []
    cur: list[str] = []
    length = 0
    for w in words:
        cur.append(w)
        length += len(w) + 1
        if length > 180 and w not in ("+", "-"):
            lines.append(" ".join(cur))
            cur, length = [], 0
    if cur:
        lines.append(" ".join(cur))
    return [lines[0]] + [indent + l for l in lines[1:]]


@dataclass(frozen=True)
class MilpModel:
    """An emitted model: objective text, named constraint rows, integrality."""

    formulation: str
    objective: str
    constraints: tuple[str, ...]
    binaries: tuple[str, ...]
    num_x: int
    num_y: int
    num_alpha: int
    num_z: int

    @property
    def num_variables(self) -> int:
        return self.num_x + self.num_y + self.num_alpha + self.num_z

    def lp_text(self) -> str:
        lines = [f"\\ lot supply model ({self.formulation} formulation)"]
        lines.append("Minimize")
        lines.extend(_wrap(f" obj: {self.objective}"))
        lines.append("Subject To")
        for row in self.constraints:
            lines.extend(_wrap(f" {row}"))
        lines.append("Binaries")
        for i in range(0, len(self.binaries), _TERMS_PER_LINE):
            lines.append(" " + " ".join(self.binaries[i : i + _TERMS_PER_LINE]))
        lines.append("End")
        return "\n".join(lines) + "\n"


def emit_milp(inst: Instance, formulation: str = "strong") -> MilpModel:
    """Build the requested formulation for ``inst``."""
    if formulation not in _FORMULATIONS:
        raise InvalidParameter(
            f"formulation must be one of {_FORMULATIONS}, got {formulation!r}"
        )
    if formulation == "weak" and inst.branch_norm.kind != "l1":
        raise UnsupportedModel(
            "the weak formulation linearizes absolute deviations and only "
            f"supports the L1 branch norm, not {inst.branch_norm.kind!r}"
        )

    n_b, n_l, n_s = inst.n_branches, inst.n_lots, len(inst.sizes)
    mults = range(1, inst.m_max + 1)

    def x(b: int, l: int, m: int) -> str:
        return f"x_{b}_{l}_{m}"

    x_names = [x(b, l, m) for b in range(n_b) for l in range(n_l) for m in mults]
    y_names = [f"y_{l}" for l in range(n_l)]

    rows: list[str] = []
    for b in range(n_b):
        terms = [(1, x(b, l, m)) for l in range(n_l) for m in mults]
        rows.append(f"assign_{b}: {_expr(terms)} = 1")

    item_terms = [
        (m * inst.lot_universe[l].size, x(b, l, m))
        for b in range(n_b)
        for l in range(n_l)
        for m in mults
    ]
    rows.append(f"card_lo: {_expr(item_terms)} >= {inst.card_lo}")
    rows.append(f"card_hi: {_expr(item_terms)} <= {inst.card_hi}")

    for b in range(n_b):
        for l in range(n_l):
            terms = [(1, x(b, l, m)) for m in mults] + [(-1, y_names[l])]
            rows.append(f"link_{b}_{l}: {_expr(terms)} <= 0")

    rows.append(f"kappa: {_expr([(1, y) for y in y_names])} <= {inst.kappa}")

    num_alpha = num_z = 0
    if formulation == "strong":
        obj_terms = [
            (
                deviation(inst.branches[b].demand, inst.lot_universe[l], m, inst.branch_norm),
                x(b, l, m),
            )
            for b in range(n_b)
            for l in range(n_l)
            for m in mults
        ]
        objective = _expr(obj_terms)
    else:
        num_alpha = num_z = n_b * n_s
        objective = _expr(
            [(1, f"z_{b}_{s}") for b in range(n_b) for s in range(n_s)]
        )
        for b in range(n_b):
            for s in range(n_s):
                supply = [
                    (m * inst.lot_universe[l].counts[s], x(b, l, m))
                    for l in range(n_l)
                    for m in mults
                    if inst.lot_universe[l].counts[s] != 0
                ]
                supply.append((-1, f"a_{b}_{s}"))
                rows.append(f"supply_{b}_{s}: {_expr(supply)} = 0")
        for b in range(n_b):
            eta = inst.branches[b].demand.values
            for s in range(n_s):
                rows.append(
                    f"dev_hi_{b}_{s}: {_expr([(1, f'a_{b}_{s}'), (-1, f'z_{b}_{s}')])} <= {_num(eta[s])}"
                )
                rows.append(
                    f"dev_lo_{b}_{s}: {_expr([(-1, f'a_{b}_{s}'), (-1, f'z_{b}_{s}')])} <= {_num(-eta[s])}"
                )

    return MilpModel(
        formulation=formulation,
        objective=objective,
        constraints=tuple(rows),
        binaries=tuple(x_names + y_names),
        num_x=len(x_names),
        num_y=len(y_names),
        num_alpha=num_alpha,
        num_z=num_z,
    )
