"""Exhaustive slot search and the offline DP against literal enumeration."""

from __future__ import annotations

import pytest

import mecsim as ms
import reference as ref
from conftest import random_doc


def _two_cloud_doc(bs, slots=1, lat=None, size=2.0):
    lat = lat or [[0.0, 3.0], [3.0, 0.0]]
    return {
        "num_clouds": 2,
        "num_users": 1,
        "num_slots": slots,
        "bs_capacity": bs,
        "cloud_capacity": [5.0, 5.0],
        "service_size": [size],
        "link_latency": [lat] * slots,
        "coverage": [[[0, 1]]] * slots,
        "demand": [[1.0]] * slots,
    }


def test_strictly_cheaper_option_wins():
    doc = _two_cloud_doc(bs=[10.0, 5.0])
    s = ms.validate_scenario(doc)
    decision, value = ms.best_slot_decision(s, 0)
    assert decision == ms.SlotDecision((0,), (0,))
    assert value == pytest.approx(1.0 / 9.0, abs=1e-12)
    brute = ref.brute_best(doc, 0)
    assert decision.placement == brute[0]
    assert decision.selection == brute[1]
    assert value == pytest.approx(brute[2], rel=1e-12)


def test_symmetric_tie_breaks_lexicographically():
    doc = _two_cloud_doc(bs=[10.0, 10.0])
    s = ms.validate_scenario(doc)
    decision, _ = ms.best_slot_decision(s, 0)
    assert decision == ms.SlotDecision((0,), (0,))


def test_matches_brute_force_on_random_instances():
    for seed in range(15):
        doc = random_doc(seed, tight=(seed % 2 == 0))
        s = ms.validate_scenario(doc)
        brute = ref.brute_best(doc, 0)
        if brute is None:
            with pytest.raises(ms.InfeasibleError):
                ms.best_slot_decision(s, 0)
            continue
        decision, value = ms.best_slot_decision(s, 0)
        assert decision.placement == brute[0]
        assert decision.selection == brute[1]
        assert value == pytest.approx(brute[2], rel=1e-12)


def test_previous_placement_adds_switching_cost():
    doc = _two_cloud_doc(bs=[10.0, 5.0], lat=[[0.0, 0.1], [0.1, 0.0]], size=2.0)
    s = ms.validate_scenario(doc)
    prev = ms.SlotDecision((1,), (0,))
    decision, value = ms.best_slot_decision(s, 0, x_prev=prev)
    brute = ref.brute_best(doc, 0, prev_placement=(1,))
    assert decision.placement == brute[0]
    assert value == pytest.approx(brute[2], rel=1e-12)
    # moving to the faster cloud costs the full service size, so stay put
    assert decision.placement == (1,)


def test_value_bounds_the_fractional_objective():
    for seed in (1, 4, 9):
        doc = random_doc(seed)
        s = ms.validate_scenario(doc)
        _, value = ms.best_slot_decision(s, 0)
        _, report = ms.solve_fractional(s, 0)
        assert report.objective <= value + 1e-9


def test_slot_enumeration_budget_guard():
    doc = random_doc(0, m=3, n=3)
    s = ms.validate_scenario(doc)
    with pytest.raises(ms.OracleTooLargeError):
        ms.best_slot_decision(s, 0, budget=10)


def test_offline_single_slot_equals_slot_optimum():
    doc = random_doc(3, m=3, n=2, slots=1)
    s = ms.validate_scenario(doc)
    decisions, total = ms.offline_optimal(s)
    slot_decision, slot_value = ms.best_slot_decision(s, 0)
    assert decisions == [slot_decision]
    assert total == pytest.approx(slot_value, rel=1e-12)


def test_static_scenario_never_migrates_in_the_optimum():
    doc = _two_cloud_doc(bs=[10.0, 5.0], slots=2)
    s = ms.validate_scenario(doc)
    decisions, total = ms.offline_optimal(s)
    assert decisions[0] == decisions[1]
    brute = ref.brute_sequence(doc)
    assert total == pytest.approx(brute[1], rel=1e-12)


def test_profitable_single_migration_is_taken():
    doc = _two_cloud_doc(bs=[10.0, 10.0], slots=2, size=2.0)
    # cloud 1 is remote at slot 0, cloud 0 at slot 1; moving costs only s=2,
    # far below the 9-unit links, so the optimum migrates exactly once
    doc["link_latency"] = [
        [[0.0, 3.0], [9.0, 9.0]],
        [[9.0, 9.0], [0.0, 0.0]],
    ]
    s = ms.validate_scenario(doc)
    decisions, total = ms.offline_optimal(s)
    assert decisions[0].placement == (0,)
    assert decisions[1].placement == (1,)
    brute = ref.brute_sequence(doc)
    assert total == pytest.approx(brute[1], rel=1e-12)
    assert [
        (d.placement, d.selection) for d in decisions
    ] == [(p, sel) for p, sel in brute[0]]


def test_dp_equals_sequence_enumeration():
    for seed in range(8):
        doc = random_doc(seed, m=2, n=2, slots=3, tight=(seed % 2 == 1))
        s = ms.validate_scenario(doc)
        brute = ref.brute_sequence(doc)
        if brute is None:
            with pytest.raises(ms.InfeasibleError):
                ms.offline_optimal(s)
            continue
        decisions, total = ms.offline_optimal(s)
        assert total == pytest.approx(brute[1], rel=1e-12)
        assert [
            (d.placement, d.selection) for d in decisions
        ] == [(p, sel) for p, sel in brute[0]]


def test_first_decision_pinning():
    doc = random_doc(7, m=2, n=1, slots=3)
    s = ms.validate_scenario(doc)
    pinned = ms.SlotDecision((1,), (doc["coverage"][0][0][0],))
    decisions, _ = ms.offline_optimal(s, first_decision=pinned)
    assert decisions[0] == pinned
    _, free_total = ms.offline_optimal(s)
    _, pinned_total = ms.offline_optimal(s, first_decision=pinned)
    assert free_total <= pinned_total + 1e-12


def test_offline_budget_guard():
    doc = random_doc(2, m=3, n=3, slots=4)
    s = ms.validate_scenario(doc)
    with pytest.raises(ms.OracleTooLargeError):
        ms.offline_optimal(s, budget=100)
