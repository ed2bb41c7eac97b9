"""Command line entry points.

    lotopt solve instance.json [--kappa K] [--budget-ms N | --deterministic-subsets N]
                               [--k N] [--exact] [--emit-lp strong|weak] [--out PATH]
    lotopt generate --seed 7 --branches 50 --sizes 4 ... --out instance.json
    lotopt serve [--host H] [--port P]

``solve`` writes the plan as JSON and prints one summary line; exit status
is 0 for a feasible plan, 2 when no feasible plan exists, 1 on any error.
"""

import argparse
import sys

from . import service
from .enumeration import LotBounds
from .errors import LotOptError
from .exact import exact_solve
from .heuristic import DEFAULT_K, solve_anytime
from .instances import (
    GeneratorProfile,
    generate_instance,
    read_instance,
    write_instance,
    write_plan,
)
from .milp import emit_milp

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_INFEASIBLE = 2


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="lotopt")
    sub = parser.add_subparsers(dest="command", required=True)

    solve = sub.add_parser("solve", help="solve an instance file")
    solve.add_argument("instance", help="path to an instance JSON document")
    solve.add_argument("--kappa", type=int, default=None, help="override the lot-type budget")
    solve.add_argument("--budget-ms", type=float, default=None, help="wall-clock budget for the heuristic")
    solve.add_argument("--k", type=int, default=DEFAULT_K, help="best-fit list depth for scoring")
    solve.add_argument(
        "--deterministic-subsets",
        type=int,
        default=None,
        metavar="N",
        help="visit exactly N subsets instead of racing the clock",
    )
    solve.add_argument("--exact", action="store_true", help="run the exact subset solver")
    solve.add_argument("--emit-lp", choices=("strong", "weak"), default=None,
                       help="emit a MILP model instead of solving")
    solve.add_argument("--out", default=None, help="output path (plan JSON or LP text)")

    gen = sub.add_parser("generate", help="write a synthetic instance")
    gen.add_argument("--seed", type=int, required=True)
    gen.add_argument("--branches", type=int, required=True)
    gen.add_argument("--sizes", type=int, required=True)
    gen.add_argument("--kappa", type=int, required=True)
    gen.add_argument("--m-max", type=int, required=True)
    gen.add_argument("--per-size-lo", type=int, default=0)
    gen.add_argument("--per-size-hi", type=int, default=3)
    gen.add_argument("--total-lo", type=int, default=2)
    gen.add_argument("--total-hi", type=int, default=6)
    gen.add_argument("--window", default="demand-band",
                     help='"demand-band" or an explicit "lo:hi" pair')
    gen.add_argument("--out", required=True)

    serve = sub.add_parser("serve", help="run the HTTP service")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=None)
    return parser


def _cmd_solve(args: argparse.Namespace) -> int:
    inst = read_instance(args.instance)
    if args.kappa is not None:
        inst = inst.with_overrides(kappa=args.kappa)

    if args.emit_lp is not None:
        model = emit_milp(inst, args.emit_lp)
        out = args.out or "model.lp"
        with open(out, "w") as f:
            f.write(model.lp_text())
        print(
            f"wrote {out}: {model.num_variables} variables, "
            f"{len(model.constraints)} constraints ({model.formulation})"
        )
        return EXIT_OK

    if args.exact:
        plan = exact_solve(inst)
    else:
        budget_ms = args.budget_ms
        if budget_ms is None and args.deterministic_subsets is None:
            budget_ms = 1000.0
        incumbent = solve_anytime(
            inst,
            budget_ms=budget_ms,
            max_subsets=args.deterministic_subsets,
            k=args.k,
        )
        plan = incumbent.plan if incumbent is not None else None

    if plan is None:
        print("no feasible plan", file=sys.stderr)
        return EXIT_INFEASIBLE
    out = args.out or "plan.json"
    write_plan(inst, plan, out)
    print(
        f"objective={plan.objective} items={plan.total_items} "
        f"lot_types={len(plan.used_lot_indices)}"
    )
    return EXIT_OK


def _cmd_generate(args: argparse.Namespace) -> int:
    if args.window == "demand-band":
        window: object = "demand-band"
    else:
        lo, _, hi = args.window.partition(":")
        window = (int(lo), int(hi))
    profile = GeneratorProfile(
        branches=args.branches,
        sizes=args.sizes,
        bounds=LotBounds(
            per_size_lo=(args.per_size_lo,) * args.sizes,
            per_size_hi=(args.per_size_hi,) * args.sizes,
            total_lo=args.total_lo,
            total_hi=args.total_hi,
        ),
        kappa=args.kappa,
        m_max=args.m_max,
        window=window,
    )
    inst = generate_instance(args.seed, profile)
    write_instance(inst, args.out)
    print(f"wrote {args.out}: {inst.n_branches} branches, {inst.n_lots} lot-types")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_ERROR
    try:
        if args.command == "solve":
            return _cmd_solve(args)
        if args.command == "generate":
            return _cmd_generate(args)
        if args.command == "serve":
            serve_args = ["--host", args.host]
            if args.port is not None:
                serve_args += ["--port", str(args.port)]
            service.main(serve_args)
            return EXIT_OK
    except (LotOptError, OSError, ValueError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_ERROR
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
