"""HTTP facade: instance registry, anytime solve sessions, estimation.

Sessions run the heuristic on a background thread and stream incumbents
into an in-memory store (LRU, capped).  What-if solves override instance
parameters on a copy; the stored instance never mutates.  Cancellation is
cooperative and idempotent.

Run with ``lotopt serve`` or ``python -m lotopt.service``; the port comes
from --port or the LOTOPT_PORT environment variable (default 8080).
"""

import os
import threading
import uuid
from collections import OrderedDict
from typing import Any

from fastapi import FastAPI, HTTPException
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel, Field

from .errors import ContractViolation, EstimationError, LotOptError, SchemaError
from .estimation import EstimationConfig, SalesHistory, estimate_raw, scale_to_total
from .heuristic import DEFAULT_K, Incumbent, solve_anytime
from .instances import instance_from_dict, instance_to_dict, plan_to_dict
from .model import Instance

MAX_SESSIONS = 64
MAX_INSTANCES = 256
DEFAULT_BUDGET_MS = 1000.0


class SolveRequest(BaseModel):
    instance_id: str
    kappa: int | None = None
    m_max: int | None = None
    card_lo: int | None = None
    card_hi: int | None = None
    k: int = DEFAULT_K
    budget_ms: float | None = Field(default=None, ge=0)
    max_subsets: int | None = Field(default=None, ge=0)


class EstimateConfigBody(BaseModel):
    similar_products: list[str]
    sellout_fraction: float = 0.8
    target_total: float | None = None
    supply_totals: dict[str, float] | None = None
    strategy: str = "direct"


class EstimateRequest(BaseModel):
    sales_csv: str
    placements_csv: str
    config: EstimateConfigBody
    scope: dict[str, list[str]]


class _Session:
    def __init__(self, session_id: str, inst: Instance, params: dict):
        self.id = session_id
        self.inst = inst
        self.params = params
        self.status = "running"
        self.incumbents: list[dict] = []
        self.best: Incumbent | None = None
        self.cancel_event = threading.Event()
        self.lock = threading.Lock()
        self.thread: threading.Thread | None = None


def _incumbent_record(inst: Instance, inc: Incumbent) -> dict:
    per_lot: dict[int, dict] = {}
    for _, (l, m) in inc.plan.assignment.items():
        entry = per_lot.setdefault(l, {"branches": 0, "multipliers": {}})
        entry["branches"] += 1
        entry["multipliers"][str(m)] = entry["multipliers"].get(str(m), 0) + 1
    return {
        "objective": inc.objective,
        "total_items": inc.plan.total_items,
        "elapsed_ms": inc.found_at * 1000.0,
        "subsets_visited": inc.subsets_visited,
        "lot_types": [
            {
                "lot_index": l,
                "lot": list(inst.lot_universe[l].counts),
                "branches": info["branches"],
                "multipliers": info["multipliers"],
            }
            for l, info in sorted(per_lot.items())
        ],
    }


class _Store:
    """Thread-safe LRU maps for instances and solve sessions."""

    def __init__(self):
        self.lock = threading.Lock()
        self.instances: OrderedDict[str, Instance] = OrderedDict()
        self.sessions: OrderedDict[str, _Session] = OrderedDict()

    def put_instance(self, inst: Instance) -> str:
        iid = uuid.uuid4().hex[:12]
        with self.lock:
            self.instances[iid] = inst
            while len(self.instances) > MAX_INSTANCES:
                self.instances.popitem(last=False)
        return iid

    def get_instance(self, iid: str) -> Instance:
        with self.lock:
            if iid not in self.instances:
                raise HTTPException(status_code=404, detail=f"unknown instance {iid}")
            self.instances.move_to_end(iid)
            return self.instances[iid]

    def put_session(self, session: _Session) -> None:
        with self.lock:
            self.sessions[session.id] = session
            while len(self.sessions) > MAX_SESSIONS:
                _, evicted = self.sessions.popitem(last=False)
                evicted.cancel_event.set()  # do not orphan a running sweep

    def get_session(self, sid: str) -> _Session:
        with self.lock:
            if sid not in self.sessions:
                raise HTTPException(status_code=404, detail=f"unknown session {sid}")
            self.sessions.move_to_end(sid)
            return self.sessions[sid]


def create_app() -> FastAPI:
    app = FastAPI(title="lotopt")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    store = _Store()
    app.state.store = store

    @app.post("/instances")
    def create_instance(doc: dict):
        try:
            inst = instance_from_dict(doc)
        except SchemaError as e:
            raise HTTPException(
                status_code=422, detail={"field": e.path, "message": str(e)}
            ) from None
        return {"instance_id": store.put_instance(inst)}

    @app.get("/instances/{iid}")
    def get_instance(iid: str):
        return instance_to_dict(store.get_instance(iid))

    @app.post("/solve")
    def solve(req: SolveRequest):
        base = store.get_instance(req.instance_id)
        try:
            inst = base.with_overrides(
                kappa=req.kappa, m_max=req.m_max, card_lo=req.card_lo, card_hi=req.card_hi
            )
        except ContractViolation as e:
            raise HTTPException(status_code=422, detail=str(e)) from None

        budget_ms = req.budget_ms
        if budget_ms is None and req.max_subsets is None:
            budget_ms = DEFAULT_BUDGET_MS
        session = _Session(
            uuid.uuid4().hex[:12],
            inst,
            params={
                "instance_id": req.instance_id,
                "kappa": inst.kappa,
                "m_max": inst.m_max,
                "card_lo": inst.card_lo,
                "card_hi": inst.card_hi,
                "k": req.k,
                "budget_ms": budget_ms,
                "max_subsets": req.max_subsets,
            },
        )

        def on_incumbent(inc: Incumbent) -> None:
            with session.lock:
                session.best = inc
                session.incumbents.append(_incumbent_record(inst, inc))

        def run() -> None:
            try:
                solve_anytime(
                    inst,
                    budget_ms=budget_ms,
                    max_subsets=req.max_subsets,
                    k=req.k,
                    callback=on_incumbent,
                    cancel=session.cancel_event.is_set,
                )
            except Exception as e:  # surface solver bugs to pollers
                with session.lock:
                    session.status = "error"
                    session.params["error"] = str(e)
                return
            with session.lock:
                if session.cancel_event.is_set():
                    session.status = "cancelled"
                elif session.best is None:
                    session.status = "infeasible"
                else:
                    session.status = "done"

        session.thread = threading.Thread(target=run, daemon=True)
        store.put_session(session)
        session.thread.start()
        return {"session_id": session.id, "status": "running"}

    @app.get("/sessions/{sid}")
    def get_session(sid: str):
        session = store.get_session(sid)
        with session.lock:
            return {
                "session_id": session.id,
                "status": session.status,
                "params": session.params,
                "incumbents": list(session.incumbents),
            }

    @app.post("/sessions/{sid}/cancel")
    def cancel_session(sid: str):
        session = store.get_session(sid)
        session.cancel_event.set()
        with session.lock:
            if session.status == "running":
                session.status = "cancelled"
            return {"session_id": session.id, "status": session.status}

    @app.get("/sessions/{sid}/plan")
    def get_plan(sid: str):
        session = store.get_session(sid)
        with session.lock:
            if session.best is None:
                raise HTTPException(status_code=404, detail="no incumbent plan yet")
            return plan_to_dict(session.inst, session.best.plan)

    @app.post("/estimate")
    def estimate(req: EstimateRequest):
        scope_branches = req.scope.get("branches") or []
        scope_sizes = req.scope.get("sizes") or []
        try:
            history = SalesHistory.from_csv_text(req.sales_csv, req.placements_csv)
            config = EstimationConfig(
                similar_products=tuple(req.config.similar_products),
                sellout_fraction=req.config.sellout_fraction,
                target_total=req.config.target_total,
                supply_totals=req.config.supply_totals,
            )
            raw = estimate_raw(
                history, config, scope_branches, scope_sizes, strategy=req.config.strategy
            )
            if config.target_total is not None:
                scaled = scale_to_total(raw, config.target_total)
                rows = {b: list(scaled[b].values) for b in raw.branches}
            else:
                rows = {
                    b: [float(x) for x in raw.values[i]]
                    for i, b in enumerate(raw.branches)
                }
        except (SchemaError, ContractViolation, EstimationError, LotOptError) as e:
            raise HTTPException(status_code=422, detail=str(e)) from None
        return {
            "sizes": list(raw.sizes),
            "branches": [{"id": b, "demand": rows[b]} for b in raw.branches],
            "missing": sorted(list(m) for m in raw.missing),
            "dropped": [list(d) for d in raw.dropped],
            "raw_total": raw.total(),
            "target_total": config.target_total,
        }

    return app


app = create_app()


def main(argv: list[str] | None = None) -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(prog="lotopt-service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument(
        "--port", type=int, default=int(os.environ.get("LOTOPT_PORT", "8080"))
    )
    args = parser.parse_args(argv)
    uvicorn.run(app, host=args.host, port=args.port)


if __name__ == "__main__":
    main()
