import math
import random

import pytest

from skipweb.core import (LINK, NODE, Universe, build_structure, child_rng, conflict_list, halve,
                          halving_oracle, incidence_consistent)
from skipweb.errors import UniverseMismatch
from skipweb.list1d import Interval
from skipweb.quadtree import CellChain

from oracles import uncompressed_quadtree


class FixedBits:
    def __init__(self, bits):
        self.bits = list(bits)

    def getrandbits(self, k):
        return self.bits.pop(0)


def test_halve_empty():
    assert halve([], random.Random(1)) == (frozenset(), frozenset())


def test_halve_follows_bit_stream():
    zeros, ones = halve(["d", "b", "a", "c"], FixedBits([0, 1, 0, 1]))
    assert zeros == {"a", "c"} and ones == {"b", "d"}


def test_halve_partitions():
    s = set(range(100))
    zeros, ones = halve(s, random.Random(3))
    assert zeros | ones == s and not zeros & ones


def test_build_empty_list_has_sentinels():
    d = build_structure(Universe.total_order(), [])
    assert d.nodes() == [(NODE, -math.inf), (NODE, math.inf)]
    assert d.links() == [(LINK, -math.inf, math.inf)]


def test_build_list_of_three():
    d = build_structure(Universe.total_order(), [30, 10, 20])
    assert [e for e in d.nodes()] == [(NODE, x) for x in (-math.inf, 10, 20, 30, math.inf)]
    assert (LINK, 10, 20) in d.ranges and (LINK, 20, 30) in d.ranges
    assert len(d.links()) == 4


def test_build_quadtree_matches_uncompressed_oracle():
    u = Universe.points(bits=8)
    rng = random.Random(5)
    for _ in range(20):
        pts = {(rng.randrange(256), rng.randrange(256)) for _ in range(5)}
        d = build_structure(u, pts)
        assert set(d.ranges) == uncompressed_quadtree(u, pts)


def test_conflict_list_point_query():
    d = build_structure(Universe.total_order(), [10, 20, 30])
    assert conflict_list(Interval(20, 20), d) == sorted([(NODE, 20), (LINK, 10, 20), (LINK, 20, 30)])


def test_conflict_list_interval_query():
    # proper intervals meeting only at an endpoint do not conflict
    d = build_structure(Universe.total_order(), [10, 20, 30])
    assert conflict_list(Interval(20, 30), d) == sorted([(NODE, 20), (NODE, 30), (LINK, 20, 30)])


def test_root_to_leaf_chain_meets_whole_path():
    u = Universe.points(bits=6)
    rng = random.Random(2)
    d = build_structure(u, {(rng.randrange(64), rng.randrange(64)) for _ in range(12)})
    leaf = max(d.nodes(), key=lambda e: e[1][0])
    chain = CellChain(d.root()[1], leaf[1], u.bits)
    hits = set(conflict_list(chain, d))
    path = set(d.locate_path(d.point_at(leaf[1])))
    assert path <= hits
    assert all(e[0] == LINK or e in path for e in hits)


def test_conflict_list_universe_mismatch():
    d = build_structure(Universe.total_order(), [1, 2])
    with pytest.raises(UniverseMismatch):
        conflict_list(CellChain((0, (0, 0)), (0, (0, 0)), 4), d)


@pytest.mark.parametrize("universe,items", [
    (Universe.total_order(), [3, 1, 4, 15, 9]),
    (Universe.points(bits=5), [(1, 2), (30, 4), (7, 7), (8, 31)]),
    (Universe.strings("ab"), ["ab", "aab", "b", "bba"]),
])
def test_incidence_consistency(universe, items):
    assert incidence_consistent(build_structure(universe, items))


def test_child_rng_is_deterministic_and_labelled():
    a = child_rng(7, "x").random()
    assert a == child_rng(7, "x").random()
    assert a != child_rng(7, "y").random()


def test_oracle_degenerate_counts_self():
    stats = halving_oracle(Universe.total_order(), 16, 50, random.Random(1), degenerate=True)
    assert stats.mean >= 1
    assert min(stats.histogram) >= 1


def test_oracle_list_small_run():
    stats = halving_oracle(Universe.total_order(), 64, 400, random.Random(4))
    assert stats.trials == 400
    assert 3 < stats.mean < 11
    assert sum(stats.histogram.values()) == 400
