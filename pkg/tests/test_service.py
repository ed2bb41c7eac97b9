import time

import pytest
from fastapi.testclient import TestClient

from lotopt import LotBounds, GeneratorProfile, generate_instance, instance_to_dict
from lotopt.service import MAX_INSTANCES, MAX_SESSIONS, create_app
from conftest import make_instance

from test_estimation import placements_csv, sales_csv
from test_instances import micro_doc


@pytest.fixture()
def client():
    with TestClient(create_app()) as c:
        yield c


def wait_for(client, sid, *, until, timeout=15.0):
    deadline = time.time() + timeout
    while time.time() < deadline:
        doc = client.get(f"/sessions/{sid}").json()
        if until(doc):
            return doc
        time.sleep(0.01)
    raise AssertionError(f"session {sid} never satisfied the wait condition")


def wait_done(client, sid):
    return wait_for(client, sid, until=lambda d: d["status"] != "running")


def post_instance(client, doc=None):
    resp = client.post("/instances", json=doc if doc is not None else micro_doc())
    assert resp.status_code == 200
    return resp.json()["instance_id"]


def wide_doc():
    # six lots over two sizes, window wide open: every subset is feasible
    inst = make_instance(
        demands=[(4.0, 2.0), (1.0, 5.0), (3.0, 3.0), (0.5, 2.5)],
        lots=[(1, 0), (0, 1), (1, 1), (2, 1), (1, 2), (2, 2)],
        kappa=1,
        m_max=3,
        card_lo=0,
        card_hi=10**6,
    )
    return instance_to_dict(inst)


# --- instances ---------------------------------------------------------------


def test_instance_round_trip_through_the_api(client):
    iid = post_instance(client)
    doc = client.get(f"/instances/{iid}").json()
    assert doc["kappa"] == 1
    assert doc["lot_universe"] == [[1, 1], [1, 2]]
    assert doc["branch_norm"] == {"type": "L1"}


def test_unknown_instance_404s(client):
    assert client.get("/instances/zzz").status_code == 404
    resp = client.post("/solve", json={"instance_id": "zzz"})
    assert resp.status_code == 404


def test_bad_instance_document_names_the_field(client):
    doc = micro_doc()
    del doc["kappa"]
    resp = client.post("/instances", json=doc)
    assert resp.status_code == 422
    assert resp.json()["detail"]["field"] == "kappa"


# --- solve sessions ----------------------------------------------------------


def test_solve_micro_to_completion(client):
    iid = post_instance(client)
    resp = client.post("/solve", json={"instance_id": iid, "max_subsets": 100})
    assert resp.status_code == 200
    sid = resp.json()["session_id"]
    doc = wait_done(client, sid)
    assert doc["status"] == "done"
    assert doc["params"]["instance_id"] == iid
    assert doc["incumbents"][-1]["objective"] == 1.0

    plan = client.get(f"/sessions/{sid}/plan").json()
    assert plan["assignment"]["b1"] == {"lot": [1, 1], "m": 2}
    assert plan["feasible"] is True
    assert plan["total_items"] == 6


def test_incumbent_records_shape_and_monotonicity(client):
    iid = post_instance(client, wide_doc())
    resp = client.post(
        "/solve", json={"instance_id": iid, "kappa": 3, "max_subsets": 10_000}
    )
    doc = wait_done(client, resp.json()["session_id"])
    assert doc["status"] == "done"
    incs = doc["incumbents"]
    assert incs
    objs = [i["objective"] for i in incs]
    assert objs == sorted(objs, reverse=True)
    assert all(a > b for a, b in zip(objs, objs[1:]))
    for inc in incs:
        assert set(inc) == {
            "objective", "total_items", "elapsed_ms", "subsets_visited", "lot_types",
        }
        assert sum(lt["branches"] for lt in inc["lot_types"]) == 4
        for lt in inc["lot_types"]:
            assert sum(lt["multipliers"].values()) == lt["branches"]


def test_kappa_override_improves_and_does_not_mutate(client):
    iid = post_instance(client, wide_doc())
    best = {}
    for kappa in (1, 2, 4):
        resp = client.post(
            "/solve", json={"instance_id": iid, "kappa": kappa, "max_subsets": 10_000}
        )
        doc = wait_done(client, resp.json()["session_id"])
        assert doc["status"] == "done"
        assert doc["params"]["kappa"] == kappa
        best[kappa] = doc["incumbents"][-1]["objective"]
    assert best[1] >= best[2] >= best[4]
    # the stored instance still has its original kappa
    assert client.get(f"/instances/{iid}").json()["kappa"] == 1


def test_bad_override_rejected(client):
    iid = post_instance(client)
    resp = client.post(
        "/solve", json={"instance_id": iid, "card_lo": 9, "card_hi": 2}
    )
    assert resp.status_code == 422
    resp = client.post("/solve", json={"instance_id": iid, "budget_ms": -5})
    assert resp.status_code == 422


def test_infeasible_session_and_plan_404(client):
    iid = post_instance(client)
    resp = client.post("/solve", json={"instance_id": iid, "max_subsets": 0})
    sid = resp.json()["session_id"]
    doc = wait_done(client, sid)
    assert doc["status"] == "infeasible"
    assert doc["incumbents"] == []
    resp = client.get(f"/sessions/{sid}/plan")
    assert resp.status_code == 404
    assert client.get("/sessions/nope").status_code == 404


def test_cancel_keeps_the_best_plan(client):
    # a subset space far too large to sweep: the session must be cancelled
    inst = generate_instance(
        3,
        GeneratorProfile(
            branches=300,
            sizes=5,
            bounds=LotBounds((0,) * 5, (3,) * 5, 1, 8),
            kappa=5,
            m_max=5,
            window=(0, 10**9),
        ),
    )
    iid = post_instance(client, instance_to_dict(inst))
    resp = client.post("/solve", json={"instance_id": iid, "budget_ms": 120_000})
    sid = resp.json()["session_id"]
    wait_for(client, sid, until=lambda d: d["incumbents"])

    resp = client.post(f"/sessions/{sid}/cancel")
    assert resp.json() == {"session_id": sid, "status": "cancelled"}
    doc = wait_for(client, sid, until=lambda d: d["status"] == "cancelled")
    assert doc["incumbents"]
    # plan survives cancellation; cancelling again is a no-op
    assert client.get(f"/sessions/{sid}/plan").status_code == 200
    assert client.post(f"/sessions/{sid}/cancel").json()["status"] == "cancelled"


# --- eviction ----------------------------------------------------------------


def test_session_store_evicts_oldest(client):
    iid = post_instance(client)
    first = client.post(
        "/solve", json={"instance_id": iid, "max_subsets": 0}
    ).json()["session_id"]
    for _ in range(MAX_SESSIONS):
        client.post("/solve", json={"instance_id": iid, "max_subsets": 0})
    assert client.get(f"/sessions/{first}").status_code == 404


def test_instance_store_evicts_oldest(client):
    first = post_instance(client)
    for _ in range(MAX_INSTANCES):
        post_instance(client)
    assert client.get(f"/instances/{first}").status_code == 404


# --- estimation --------------------------------------------------------------


def estimate_body(**config_overrides):
    config = {"similar_products": ["u"], "sellout_fraction": 1.0}
    config.update(config_overrides)
    return {
        "sales_csv": sales_csv(
            [(f"b{i}", "u", "M", 1, v) for i, v in enumerate([4, 3, 2, 1, 0], start=1)]
        ),
        "placements_csv": placements_csv([(f"b{i}", "u", "M") for i in range(1, 6)]),
        "config": config,
        "scope": {"branches": [f"b{i}" for i in range(1, 6)], "sizes": ["M"]},
    }


def test_estimate_endpoint_raw(client):
    resp = client.post("/estimate", json=estimate_body())
    assert resp.status_code == 200
    doc = resp.json()
    assert doc["sizes"] == ["M"]
    assert [b["demand"][0] for b in doc["branches"]] == [2.0, 1.5, 1.0, 0.5, 0.0]
    assert doc["missing"] == [["b5", "M"]]
    assert doc["raw_total"] == 5.0
    assert doc["target_total"] is None


def test_estimate_endpoint_scales_to_target(client):
    resp = client.post("/estimate", json=estimate_body(target_total=50.0))
    doc = resp.json()
    assert doc["target_total"] == 50.0
    assert sum(b["demand"][0] for b in doc["branches"]) == pytest.approx(50.0)


def test_estimate_endpoint_rejects_bad_csv(client):
    body = estimate_body()
    body["sales_csv"] = "a,b\n1,2\n"
    resp = client.post("/estimate", json=body)
    assert resp.status_code == 422
    assert "sales csv header" in resp.json()["detail"]


def test_cors_headers_for_browser_clients(client):
    resp = client.get("/instances/nope", headers={"Origin": "http://localhost:5173"})
    assert resp.status_code == 404
    assert resp.headers["access-control-allow-origin"] == "*"
