import math
import random

import pytest
from hypothesis import given, strategies as st

from skipweb.core import LINK, NODE, Universe, incidence_consistent
from skipweb.errors import DuplicateKey, InvalidItem, ItemNotFound
from skipweb.list1d import Interval, ListStructure, list_insert_local, list_locate

U = Universe.total_order()
INF = math.inf


def build(items):
    return ListStructure.build(U, items)


@pytest.mark.parametrize("q,expected", [
    (20, (NODE, 20)),
    (25, (LINK, 20, 30)),
    (5, (LINK, -INF, 10)),
    (99, (LINK, 30, INF)),
])
def test_locate(q, expected):
    assert list_locate(build([10, 20, 30]), q) == expected


def test_locate_walk_from_start():
    d = build([10, 20, 30])
    path = d.locate_path(25, (NODE, 10))
    assert path == [(NODE, 10), (LINK, 10, 20), (NODE, 20), (LINK, 20, 30)]
    assert d.locate_path(5, (NODE, 20))[-1] == (LINK, -INF, 10)


def test_insert_between():
    new, replaced, created = list_insert_local(build([10, 30]), 20)
    assert replaced == [(LINK, 10, 30)]
    assert created == sorted([(NODE, 20), (LINK, 10, 20), (LINK, 20, 30)])
    assert new == build([10, 20, 30])


def test_insert_splits_sentinel_link():
    _, replaced, _ = list_insert_local(build([10, 30]), 5)
    assert replaced == [(LINK, -INF, 10)]


def test_insert_into_empty():
    new, replaced, created = list_insert_local(build([]), 7)
    assert replaced == [(LINK, -INF, INF)]
    assert (NODE, 7) in created and new == build([7])


def test_delete_round_trip():
    d = build([1, 2, 3])
    new, replaced, created = d.delete_local(2)
    assert created == [(LINK, 1, 3)]
    assert new == build([1, 3])
    with pytest.raises(ItemNotFound):
        new.delete_local(2)


def test_errors():
    with pytest.raises(DuplicateKey):
        build([1, 1])
    with pytest.raises(DuplicateKey):
        build([1]).insert_local(1)
    with pytest.raises(InvalidItem):
        build([math.nan])


def test_interval_rules():
    assert Interval(1, 2).intersects(Interval(1.5, 3))
    assert not Interval(1, 2).intersects(Interval(2, 3))
    assert Interval(2, 2).intersects(Interval(1, 2))
    assert Interval(1, 5).occupancy(build([0, 1, 3, 5, 9])) == 3


@given(st.sets(st.integers(-1000, 1000), max_size=30), st.integers(-1100, 1100))
def test_locate_matches_brute_force(items, q):
    d = build(items)
    best = d.best_containing(d.element_ids(), q)
    assert d.locate(q) == best
    assert d.locate_path(q, d.root())[-1] == best


@given(st.lists(st.integers(-50, 50), unique=True, max_size=25))
def test_incremental_equals_build(seq):
    d = build([])
    for x in seq:
        d, replaced, created = d.insert_local(x)
        assert len(replaced) == 1 and len(created) == 3
    assert d == build(seq)
    assert incidence_consistent(d)


def test_conflicts_match_brute_force():
    rng = random.Random(8)
    d = build(rng.sample(range(200), 40))
    for _ in range(200):
        a, b = sorted(rng.sample(range(-10, 210), 2))
        r = Interval(a, b if rng.random() < 0.8 else a)
        brute = sorted(e for e, x in d.ranges.items() if r.intersects(x))
        assert d.conflicts(r) == brute
