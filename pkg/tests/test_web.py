import random
import statistics

import pytest
from hypothesis import given, settings, strategies as st

from skipweb.core import Universe, build_structure
from skipweb.errors import DuplicateKey, ItemNotFound
from skipweb.generators import random_items, random_query, random_strings
from skipweb.web import (ROOT_KEY, height_for, item_keys, rebuild_equivalent, sw_build, sw_delete,
                         sw_insert, sw_query_sequential)

LIST = Universe.total_order()


class FixedBits:
    def __init__(self, bits):
        self.bits = list(bits)

    def getrandbits(self, k):
        return self.bits.pop(0)


def test_helpers():
    assert [height_for(n) for n in (0, 1, 2, 3, 4, 5, 1024)] == [0, 0, 1, 2, 2, 3, 10]
    assert item_keys("01") == ["0", "00", "001"]


def test_single_item_single_level():
    web = sw_build(LIST, [42], random.Random(0))
    assert web.keys() == [ROOT_KEY]
    assert web.query(42).answer == ("n", 42)


def test_four_items_follow_bit_stream():
    stream = [0, 1, 1, 1, 0, 0, 1, 0]
    web = sw_build(LIST, [1, 2, 3, 4], FixedBits(stream))
    assert web.paths == {1: "01", 2: "11", 3: "00", 4: "10"}
    assert {len(k) for k in web.keys()} == {1, 2, 3}
    assert web.levels["000"].items == {3} and web.levels["001"].items == {1}
    assert web.levels["01"].items == {2, 4}
    web.check_hyperlinks()


@pytest.mark.parametrize("kind", ["list", "quadtree", "trie", "trapmap"])
def test_hyperlinks_exhaustive(kind):
    u = {"list": LIST, "quadtree": Universe.points(bits=12), "trie": Universe.strings(),
         "trapmap": Universe.segments()}[kind]
    rng = random.Random(1)
    web = sw_build(u, random_items(u, 40, rng), rng)
    web.check_hyperlinks()


def test_mean_top_level_size_small():
    rng = random.Random(3)
    sizes = []
    for _ in range(30):
        web = sw_build(LIST, random_items(LIST, 1024, rng), rng)
        sizes.extend(len(web.levels[k].items) for k in web.top_keys())
    assert statistics.mean(sizes) <= 4


@pytest.mark.parametrize("kind", ["list", "quadtree", "trie", "trapmap"])
def test_query_matches_sequential_structure(kind):
    u = {"list": LIST, "quadtree": Universe.points(bits=16), "trie": Universe.strings("ab"),
         "trapmap": Universe.segments()}[kind]
    rng = random.Random(7)
    items = random_items(u, 120, rng, **({"length": 10} if kind == "trie" else {}))
    web = sw_build(u, items, rng)
    flat = build_structure(u, items)
    for _ in range(300):
        q = random_query(u, rng, flat)
        res = sw_query_sequential(web, q)
        assert res.answer == flat.locate(q)
        assert len(res.steps) <= web.height + 1


def test_insert_into_empty_web():
    web = sw_build(LIST, [])
    web, report = sw_insert(web, 5, random.Random(1))
    assert web.keys() == [ROOT_KEY] and web.items == {5}


def test_delete_only_item():
    web = sw_build(LIST, [5], random.Random(1))
    web, _ = sw_delete(web, 5)
    assert len(web) == 0 and web.same_as(sw_build(LIST, []))


def test_deleted_key_falls_in_link():
    web = sw_build(LIST, [10, 20, 30], random.Random(2))
    sw_delete(web, 20)
    assert web.query(20).answer == ("l", 10, 30)
    with pytest.raises(ItemNotFound):
        web.delete(20)
    with pytest.raises(DuplicateKey):
        web.insert(10, random.Random(0))


def test_hundred_inserts_equal_rebuild():
    rng = random.Random(11)
    web = sw_build(LIST, random_items(LIST, 64, rng), rng)
    for x in random_items(LIST, 100, rng):
        if x not in web.paths:
            web.insert(x, rng)
    assert rebuild_equivalent(web)
    web.check_hyperlinks()


def test_trie_insert_then_query():
    u = Universe.strings()
    rng = random.Random(5)
    web = sw_build(u, random_strings(u, 200, rng, length=12), rng)
    web.insert("ACGTACGT", rng)
    assert web.query("ACGTACGT").answer == ("n", "ACGTACGT$")


def test_copy_is_independent():
    rng = random.Random(4)
    web = sw_build(LIST, range(20), rng)
    snap = web.copy()
    web.insert(100, rng)
    assert 100 not in snap.paths and snap.same_as(sw_build(LIST, range(20), bits=snap.paths))


def test_rebuild_triggers_on_growth():
    rng = random.Random(9)
    web = sw_build(LIST, range(4), rng)
    reports = [web.insert(x, rng) for x in range(10, 20)]
    assert any(r.rebuilt for r in reports)
    assert web.height == height_for(len(web))


@settings(max_examples=25, deadline=None)
@given(st.lists(st.tuples(st.booleans(), st.integers(0, 40)), max_size=60), st.integers(0, 2**16))
def test_interleaved_updates_equal_rebuild(ops, seed):
    rng = random.Random(seed)
    for u, gen in ((LIST, lambda v: v), (Universe.points(bits=6), lambda v: (v, (v * 7) % 64)),
                   (Universe.strings("01"), lambda v: format(v, "b"))):
        web = sw_build(u, [], rng)
        for ins, v in ops:
            x = gen(v)
            if ins and x not in web.paths:
                web.insert(x, rng)
            elif not ins and x in web.paths:
                web.delete(x)
        assert rebuild_equivalent(web)
        web.check_hyperlinks()
