"""Lot-type supply planning toolkit.

Branch demand is served in whole lots: pick at most kappa lot-types from a
universe, give every branch one lot-type and an integral multiplier, keep
the shipped item total inside a window, and minimize the summed deviation
between demand and supply.  The package provides an anytime heuristic, an
exact solver for small universes, MILP emission for everything else,
demand estimation from reference products, plus a CLI and HTTP service.
"""

from .enumeration import LotBounds, count_lot_types, enumerate_lot_types
from .errors import (
    ContractViolation,
    EstimationError,
    InvalidParameter,
    LotOptError,
    MissingProductError,
    ProblemTooLarge,
    SchemaError,
    UniverseTooLarge,
    UnsupportedModel,
)
from .estimation import (
    EstimationConfig,
    RawEstimate,
    SalesHistory,
    estimate_raw,
    scale_to_total,
    sellout_day,
)
from .exact import brute_force, dp_fixed_subset, exact_solve
from .heuristic import (
    DEFAULT_K,
    FitTable,
    Incumbent,
    ScoreTable,
    assign_within_subset,
    best_fit_table,
    build_score_table,
    k_best_fits,
    repair_cardinality,
    solve_anytime,
    subset_iterator,
)
from .instances import (
    GeneratorProfile,
    gap_report,
    gap_report_csv,
    generate_instance,
    instance_from_dict,
    instance_to_dict,
    norm_from_dict,
    norm_to_dict,
    plan_from_dict,
    plan_to_dict,
    read_instance,
    write_instance,
    write_plan,
)
from .milp import MilpModel, emit_milp
from .model import (
    L1,
    L2,
    LINF,
    Branch,
    DeliveryPlan,
    DemandVector,
    Instance,
    LotType,
    Norm,
    SizeSet,
    best_multiplier,
    deviation,
    evaluate_plan,
    lp_norm,
    norm_eval,
    norm_eval_rows,
    plan_objective,
    plan_total_items,
)

__version__ = "0.1.0"
