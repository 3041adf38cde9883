"""Tests for readout schedule search, consistency and correctness."""

import pytest

from sscsim.codes import CodeLayout
from sscsim.scheduling import (
    Schedule,
    check_consistent,
    check_correct,
    find_schedule,
    make_schedule,
)


@pytest.fixture(scope="module")
def schedule():
    return find_schedule()


def test_found_schedule_is_consistent_at_all_sizes(schedule):
    for L in range(2, 7):
        assert check_consistent(schedule, CodeLayout(L, "toric"))


def test_found_schedule_is_correct(schedule):
    assert check_correct(schedule)


def test_found_schedule_measurement_pattern(schedule):
    assert {schedule.measure_round(k) for k in ("SW", "NE")} == {3, 0}
    assert {schedule.measure_round(k) for k in ("SE", "NW")} == {1, 2}


def test_found_schedule_is_exchange_symmetric(schedule):
    assert schedule.is_exchange_symmetric()


def test_local_schedule_round_bookkeeping(schedule):
    for kind, loc in schedule.local.items():
        rounds = {loc.measure_round}
        for role in range(3):
            rounds.add(loc.round_of_role(role))
        assert rounds == {0, 1, 2, 3}, kind


def test_all_triangles_gating_in_one_round_is_inconsistent():
    # measuring every kind in the same round forces all 4 L^2 triangles to
    # gate simultaneously in the other rounds, but there are only 3 L^2
    # code qubits
    rounds = {"SW": 0, "NE": 0, "SE": 0, "NW": 0}
    orders = {k: (0, 1, 2) for k in rounds}
    sched = make_schedule(rounds, orders)
    assert not check_consistent(sched, CodeLayout(4, "toric"))


def test_shared_vertex_collision_is_inconsistent():
    # SW touches its vertex at round 0 (measure 3, first gate) and SE at
    # round 0 as well (measure 1, third gate); they share vertices
    rounds = {"SW": 3, "NE": 0, "SE": 1, "NW": 2}
    orders = {"SW": (0, 1, 2), "SE": (1, 2, 0), "NE": (0, 1, 2), "NW": (0, 1, 2)}
    sched = make_schedule(rounds, orders)
    assert not check_consistent(sched, CodeLayout(4, "toric"))


def test_lemma_violating_gate_order_is_incorrect():
    # consistent, but the leading triangle's last gate grabs the shared
    # vertex exactly when the tailing triangle's first gate wants it
    rounds = {"SW": 3, "NE": 0, "SE": 1, "NW": 2}
    orders = {"SW": (0, 1, 2), "SE": (0, 1, 2), "NE": (2, 1, 0), "NW": (2, 1, 0)}
    sched = make_schedule(rounds, orders)
    assert check_consistent(sched, CodeLayout(4, "toric"))
    assert not check_correct(sched)


def test_schedule_requires_all_kinds():
    with pytest.raises(ValueError):
        Schedule(local={})


def test_24_choices_per_triangle():
    # 6 qubit orders x 4 measurement rounds
    import itertools

    combos = {
        (m, perm)
        for m in range(4)
        for perm in itertools.permutations(range(3))
    }
    assert len(combos) == 24
