import json

import numpy as np
import pytest

from lotopt import (
    ContractViolation,
    GeneratorProfile,
    LotBounds,
    SchemaError,
    SizeSet,
    enumerate_lot_types,
    exact_solve,
    gap_report,
    gap_report_csv,
    generate_instance,
    instance_from_dict,
    instance_to_dict,
    lp_norm,
    norm_from_dict,
    norm_to_dict,
    plan_from_dict,
    plan_to_dict,
    read_instance,
    write_instance,
    write_plan,
    L1,
    L2,
    LINF,
)


def micro_doc():
    return {
        "sizes": ["s0", "s1"],
        "branches": [
            {"id": "b1", "demand": [2.0, 3.0]},
            {"id": "b2", "demand": [1.0, 1.0]},
        ],
        "lot_universe": [[1, 1], [1, 2]],
        "kappa": 1,
        "m_max": 2,
        "card_lo": 5,
        "card_hi": 7,
    }


# --- documents ---------------------------------------------------------------


def test_dict_round_trip(micro):
    assert instance_from_dict(instance_to_dict(micro)) == micro
    assert instance_from_dict(micro_doc()) == micro


def test_file_round_trip_is_byte_deterministic(tmp_path, micro):
    p1, p2 = tmp_path / "a.json", tmp_path / "b.json"
    write_instance(micro, p1)
    write_instance(read_instance(p1), p2)
    assert p1.read_bytes() == p2.read_bytes()
    assert p1.read_bytes().endswith(b"\n")


def test_bounds_form_enumerates_universe(micro):
    doc = micro_doc()
    del doc["lot_universe"]
    doc["lot_bounds"] = {
        "per_size_lo": [0, 0],
        "per_size_hi": [1, 2],
        "total_lo": 2,
        "total_hi": 3,
    }
    inst = instance_from_dict(doc)
    bounds = LotBounds((0, 0), (1, 2), 2, 3)
    assert inst.lot_universe == tuple(enumerate_lot_types(bounds, SizeSet(("s0", "s1"))))
    # serialization always spells the universe out
    assert "lot_universe" in instance_to_dict(inst)


def test_bounds_admitting_nothing_rejected():
    doc = micro_doc()
    del doc["lot_universe"]
    doc["lot_bounds"] = {
        "per_size_lo": [0, 0],
        "per_size_hi": [1, 0],
        "total_lo": 2,
        "total_hi": 3,
    }
    with pytest.raises(SchemaError) as e:
        instance_from_dict(doc)
    assert e.value.path == "lot_bounds"


def test_universe_and_bounds_are_mutually_exclusive():
    doc = micro_doc()
    doc["lot_bounds"] = {"per_size_lo": [0, 0], "per_size_hi": [1, 1], "total_lo": 1, "total_hi": 2}
    with pytest.raises(SchemaError, match="exactly one"):
        instance_from_dict(doc)
    doc = micro_doc()
    del doc["lot_universe"]
    with pytest.raises(SchemaError, match="exactly one"):
        instance_from_dict(doc)


def test_missing_and_mistyped_fields_name_their_path():
    doc = micro_doc()
    del doc["kappa"]
    with pytest.raises(SchemaError) as e:
        instance_from_dict(doc)
    assert e.value.path == "kappa"

    doc = micro_doc()
    doc["kappa"] = True  # bools are not acceptable integers
    with pytest.raises(SchemaError) as e:
        instance_from_dict(doc)
    assert e.value.path == "kappa"

    doc = micro_doc()
    doc["branches"][1]["demand"] = [1.0, "x"]
    with pytest.raises(SchemaError) as e:
        instance_from_dict(doc)
    assert e.value.path == "branches[1].demand"

    doc = micro_doc()
    doc["lot_universe"][0] = [1, 1.5]
    with pytest.raises(SchemaError) as e:
        instance_from_dict(doc)
    assert e.value.path == "lot_universe[0]"

    doc = micro_doc()
    doc["sizes"] = ["s0", "s0"]
    with pytest.raises(SchemaError) as e:
        instance_from_dict(doc)
    assert e.value.path == "sizes"


def test_instance_level_violations_surface_at_root():
    doc = micro_doc()
    doc["card_lo"] = 9  # window inverted
    with pytest.raises(SchemaError) as e:
        instance_from_dict(doc)
    assert e.value.path == "$"


def test_norm_dicts_round_trip():
    for norm in (L1, L2, LINF, lp_norm(1.5)):
        assert norm_from_dict(norm_to_dict(norm)) == norm
    assert norm_to_dict(lp_norm(1.5)) == {"type": "LP", "p": 1.5}
    with pytest.raises(SchemaError) as e:
        norm_from_dict({"type": "L9"})
    assert e.value.path == "branch_norm.type"
    with pytest.raises(SchemaError):
        norm_from_dict({"type": "LP"})  # p required
    with pytest.raises(SchemaError):
        norm_from_dict({"type": "L1", "p": 2})  # p forbidden


def test_norm_survives_instance_round_trip(micro):
    doc = instance_to_dict(micro)
    doc["branch_norm"] = {"type": "LP", "p": 3.0}
    inst = instance_from_dict(doc)
    assert inst.branch_norm == lp_norm(3.0)
    assert instance_from_dict(instance_to_dict(inst)) == inst


def test_json_parse_error_reports_line(tmp_path):
    p = tmp_path / "broken.json"
    p.write_text('{\n  "sizes": [}\n')
    with pytest.raises(SchemaError) as e:
        read_instance(p)
    assert str(p) in e.value.path
    assert e.value.path.endswith(":2")


# --- plans -------------------------------------------------------------------


def test_plan_round_trip(tmp_path, micro):
    plan = exact_solve(micro)
    doc = plan_to_dict(micro, plan)
    assert doc["assignment"]["b1"] == {"lot": [1, 1], "m": 2}
    assert doc["objective"] == 1.0
    assert doc["feasible"] is True
    assert plan_from_dict(micro, doc) == plan

    path = tmp_path / "plan.json"
    write_plan(micro, plan, path)
    assert plan_from_dict(micro, json.loads(path.read_text())) == plan


def test_plan_with_unknown_lot_rejected(micro):
    plan = exact_solve(micro)
    doc = plan_to_dict(micro, plan)
    doc["assignment"]["b1"]["lot"] = [9, 9]
    with pytest.raises(SchemaError) as e:
        plan_from_dict(micro, doc)
    assert e.value.path == "assignment.b1.lot"
    with pytest.raises(SchemaError):
        plan_from_dict(micro, {"objective": 1.0})


# --- generator ---------------------------------------------------------------


def profile(**overrides):
    base = dict(
        branches=6,
        sizes=3,
        bounds=LotBounds((0, 0, 0), (2, 2, 2), 1, 4),
        kappa=2,
        m_max=3,
    )
    base.update(overrides)
    return GeneratorProfile(**base)


def test_generator_is_deterministic_and_shaped():
    a = generate_instance(7, profile())
    b = generate_instance(7, profile())
    assert a == b
    assert a.n_branches == 6
    assert a.sizes.labels == ("s0", "s1", "s2")
    assert [br.id for br in a.branches][:2] == ["b0000", "b0001"]
    assert a.lot_universe == tuple(
        enumerate_lot_types(LotBounds((0, 0, 0), (2, 2, 2), 1, 4), a.sizes)
    )
    c = generate_instance(8, profile())
    assert c != a


def test_generator_window_brackets_total_demand():
    inst = generate_instance(11, profile())
    total = sum(b.demand.total for b in inst.branches)
    assert inst.card_lo <= total <= inst.card_hi
    assert inst.card_lo == int(np.floor(0.95 * total))
    explicit = generate_instance(11, profile(window=(3, 9)))
    assert (explicit.card_lo, explicit.card_hi) == (3, 9)


def test_profile_validation():
    with pytest.raises(ContractViolation):
        profile(window=(9, 3))
    with pytest.raises(ContractViolation):
        profile(branches=0)
    with pytest.raises(ContractViolation):
        profile(kappa=0)


# --- gap reporting -----------------------------------------------------------


def test_gap_report_strings():
    assert gap_report(100.0, 114.694) == "14.694%"
    assert gap_report(100.0, 100.0) == "0.000%"
    assert gap_report(100.0, 112.9346) == "12.935%"
    # exact .0005 ties round up, not to even
    assert gap_report(100.0, 100.0625) == "0.063%"
    assert gap_report(100.0, 99.9375) == "-0.063%"


def test_gap_report_rejects_nonpositive_exact():
    with pytest.raises(ContractViolation):
        gap_report(0.0, 1.0)
    with pytest.raises(ContractViolation):
        gap_report(-2.0, 1.0)


def test_gap_report_csv():
    text = gap_report_csv(
        [("k=1", 100.0, 114.694), ("k=2", 200.0, 200.0)]
    )
    assert text == (
        "config,exact,heuristic,gap_pct\n"
        "k=1,100.0,114.694,14.694%\n"
        "k=2,200.0,200.0,0.000%\n"
    )
