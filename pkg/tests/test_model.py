"""Scenario validation, decision types, and the feasibility predicate."""

from __future__ import annotations

import json
import math

import numpy as np
import pytest

import mecsim as ms
from conftest import make_doc, random_doc


# ---------------------------------------------------------------------------
# validate_scenario


def test_well_formed_document_accepted():
    s = ms.validate_scenario(make_doc())
    assert s.num_clouds == 3
    assert s.num_users == 2
    assert s.coverage_at(0, 1) == (0, 1, 2)


def test_walkthrough_scenario_accepted(walkthrough_path):
    s = ms.load_scenario(walkthrough_path)
    assert (s.num_clouds, s.num_users, s.num_slots) == (3, 1, 2)


def test_missing_field_rejected():
    doc = make_doc()
    del doc["demand"]
    with pytest.raises(ms.ParseError):
        ms.validate_scenario(doc)


def test_zero_capacity_rejected():
    doc = make_doc(bs_capacity=[10.0, 10.0, 0.0])
    with pytest.raises(ms.NonPositiveCapacityError):
        ms.validate_scenario(doc)


def test_non_positive_demand_rejected():
    doc = make_doc(demand=[[1.0, -0.5], [1.0, 1.0]])
    with pytest.raises(ms.NonPositiveCapacityError):
        ms.validate_scenario(doc)


def test_empty_coverage_reports_user_and_slot():
    doc = random_doc(0, m=3, n=2, slots=4)
    doc["coverage"][3][1] = []
    with pytest.raises(ms.EmptyCoverageError) as err:
        ms.validate_scenario(doc)
    assert err.value.user == 1
    assert err.value.slot == 3


def test_latency_shape_mismatch_rejected():
    doc = make_doc(link_latency=[[[0.0, 1.0], [1.0, 0.0]]] * 2)
    with pytest.raises(ms.DimensionMismatchError):
        ms.validate_scenario(doc)


def test_negative_latency_rejected():
    doc = make_doc()
    doc["link_latency"][0][0][1] = -1.0
    with pytest.raises(ms.ParseError):
        ms.validate_scenario(doc)


def test_coverage_station_out_of_range_rejected():
    doc = make_doc()
    doc["coverage"][1][0] = [0, 7]
    with pytest.raises(ms.DimensionMismatchError):
        ms.validate_scenario(doc)


# ---------------------------------------------------------------------------
# decision types


def test_slot_decision_indicator_matrices():
    d = ms.SlotDecision(placement=(2, 0), selection=(1, 1))
    x = d.placement_matrix(3)
    y = d.selection_matrix(3)
    assert x.shape == (3, 2)
    assert x[2, 0] == 1.0 and x[0, 1] == 1.0 and x.sum() == 2.0
    assert y[1, 0] == 1.0 and y[1, 1] == 1.0 and y.sum() == 2.0


def test_slot_decision_length_mismatch_rejected():
    with pytest.raises(ValueError):
        ms.SlotDecision(placement=(0, 1), selection=(0,))


def test_fractional_decision_shape_mismatch_rejected():
    with pytest.raises(ValueError):
        ms.FractionalDecision(x=np.ones((2, 2)) / 2, y=np.ones((3, 2)) / 3)


# ---------------------------------------------------------------------------
# decision_feasible


def _one_user_doc(**overrides):
    doc = make_doc(
        num_users=1,
        service_size=[1.0],
        coverage=[[[0, 1, 2]], [[0, 1, 2]]],
        demand=[[1.0], [1.0]],
    )
    doc.update(overrides)
    return doc


def test_feasible_when_capacities_dominate():
    s = ms.validate_scenario(_one_user_doc())
    for j in range(3):
        d = ms.SlotDecision((0,), (j,))
        assert ms.decision_feasible(s, 0, d)


def test_overload_is_infeasible_even_at_zero_margin():
    doc = make_doc(
        num_users=3,
        service_size=[1.0, 1.0, 1.0],
        coverage=[[[0, 1, 2]] * 3] * 2,
        demand=[[4.0, 4.0, 4.0]] * 2,
    )
    s = ms.validate_scenario(doc)
    d = ms.SlotDecision((0, 1, 2), (0, 0, 0))
    assert not ms.decision_feasible(s, 0, d, margin=0.0)


def test_exact_load_violates_strict_margin():
    doc = make_doc(
        num_users=2,
        demand=[[5.0, 5.0]] * 2,
    )
    s = ms.validate_scenario(doc)
    d = ms.SlotDecision((0, 1), (0, 0))
    # load == capacity: allowed only when no margin is demanded
    assert ms.decision_feasible(s, 0, d, margin=0.0)
    assert not ms.decision_feasible(s, 0, d, margin=1e-6)


def test_out_of_coverage_selection_infeasible():
    doc = make_doc()
    doc["coverage"][0] = [[0, 1], [2]]
    s = ms.validate_scenario(doc)
    assert not ms.decision_feasible(s, 0, ms.SlotDecision((0, 0), (2, 2)))
    assert ms.decision_feasible(s, 0, ms.SlotDecision((0, 0), (1, 2)))


def test_storage_capacity_checked():
    doc = make_doc(service_size=[3.0, 3.0])
    s = ms.validate_scenario(doc)
    stacked = ms.SlotDecision((1, 1), (0, 1))
    spread = ms.SlotDecision((0, 1), (0, 1))
    assert not ms.decision_feasible(s, 0, stacked)
    assert ms.decision_feasible(s, 0, spread)


def test_wrong_user_count_infeasible():
    s = ms.validate_scenario(make_doc())
    assert not ms.decision_feasible(s, 0, ms.SlotDecision((0,), (0,)))


def test_margin_must_be_finite():
    s = ms.validate_scenario(make_doc())
    d = ms.SlotDecision((0, 1), (0, 1))
    with pytest.raises(ValueError):
        ms.decision_feasible(s, 0, d, margin=math.inf)


def test_feasibility_monotone_in_margin():
    margins = [0.0, 1e-6, 1e-3, 0.1, 1.0, 5.0]
    rng = np.random.default_rng(7)
    for seed in range(20):
        doc = random_doc(seed, tight=True)
        s = ms.validate_scenario(doc)
        d = ms.SlotDecision(
            tuple(rng.integers(0, 3, size=3)),
            tuple(int(rng.choice(doc["coverage"][0][k])) for k in range(3)),
        )
        flags = [ms.decision_feasible(s, 0, d, margin=m) for m in margins]
        # once infeasible at some margin, larger margins stay infeasible
        for a, b in zip(flags, flags[1:]):
            assert a or not b


# ---------------------------------------------------------------------------
# persistence round-trip


def test_save_load_round_trip(tmp_path):
    s = ms.validate_scenario(random_doc(3, m=4, n=2, slots=3))
    path = tmp_path / "scenario.json"
    ms.save_scenario(s, path)
    assert ms.load_scenario(path) == s


def test_saved_scenario_matches_schema(tmp_path):
    jsonschema = pytest.importorskip("jsonschema")
    s = ms.validate_scenario(make_doc())
    path = tmp_path / "scenario.json"
    ms.save_scenario(s, path)
    schema = json.loads(ms.SCHEMA_PATH.read_text(encoding="utf-8"))
    jsonschema.validate(json.loads(path.read_text(encoding="utf-8")), schema)


def test_truncated_file_raises_parse_error(tmp_path):
    path = tmp_path / "broken.json"
    path.write_text('{"num_clouds": 3, "num_u', encoding="utf-8")
    with pytest.raises(ms.ParseError):
        ms.load_scenario(path)
