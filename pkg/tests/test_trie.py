import random

import pytest
from hypothesis import given, settings, strategies as st

from skipweb.core import LINK, NODE, Universe, incidence_consistent
from skipweb.errors import DuplicateString, SymbolOutsideAlphabet
from skipweb.generators import random_strings
from skipweb.trie import CompressedTrie, PrefixChain, trie_build, trie_insert_local, trie_search

from oracles import uncompressed_trie

LOWER = Universe.strings("abcdefghijklmnopqrstuvwxyz")
CCD = ["cat", "car", "dog"]


def test_single_string():
    t = trie_build(LOWER, ["a"])
    assert t.links() == [(LINK, "", "a$")]


def test_empty():
    assert trie_build(LOWER, []).element_ids() == [(NODE, "")]


def test_cat_car_dog():
    t = trie_build(LOWER, CCD)
    assert set(t.children[""]) == {"c", "d"}
    assert t.children[""]["c"] == "ca"
    assert set(t.children["ca"]) == {"t", "r"}
    assert set(t.ranges) == uncompressed_trie(CCD)


def test_search_stored():
    m = trie_search(trie_build(LOWER, CCD), "car")
    assert m.element == (NODE, "car$") and m.exact


def test_search_prefix_exhausted():
    m = trie_search(trie_build(LOWER, CCD), "ca")
    assert m.element == (NODE, "ca") and m.index == 2 and not m.exact


def test_search_divergence():
    # "c" is not a node of the compressed trie; q leaves the edge toward "ca" at index 1
    m = trie_search(trie_build(LOWER, CCD), "cow")
    assert m.element == (LINK, "", "ca") and m.index == 1


def test_insert_prefix_string():
    t, replaced, created = trie_insert_local(trie_build(LOWER, ["dog"]), "do")
    assert replaced == [(LINK, "", "dog$")]
    assert (NODE, "do$") in created and (NODE, "do") in created
    assert t == trie_build(LOWER, ["dog", "do"])


def test_insert_first_string():
    t, replaced, created = trie_insert_local(trie_build(LOWER, []), "x")
    assert replaced == [] and created == [(LINK, "", "x$"), (NODE, "x$")]


def test_insert_splits_at_index_two():
    t, replaced, created = trie_insert_local(trie_build(LOWER, ["dog"]), "dot")
    assert (NODE, "do") in created
    assert {(NODE, "dog$"), (NODE, "dot$")} <= set(t.nodes())
    assert t == trie_build(LOWER, ["dog", "dot"])


def test_errors():
    with pytest.raises(SymbolOutsideAlphabet):
        trie_build(Universe.strings("ab"), ["abc"])
    with pytest.raises(DuplicateString):
        trie_build(LOWER, ["a", "a"])
    with pytest.raises(ValueError):
        Universe.strings("a$")


def test_locate_matches_brute_force():
    u = Universe.strings("ab")
    rng = random.Random(3)
    t = trie_build(u, random_strings(u, 50, rng, length=8))
    starts = t.element_ids()
    for _ in range(500):
        q = "".join(rng.choice("ab") for _ in range(rng.randrange(12)))
        best = t.best_containing(starts, q)
        assert t.locate(q) == best
        assert t.locate(q, rng.choice(starts)) == best


def test_path_property():
    # every edge of D(T) is covered by a path of D(S)
    u = Universe.strings("ACGT")
    rng = random.Random(9)
    s = random_strings(u, 80, rng, length=10)
    t_items = [x for x in s if rng.random() < 0.5]
    ds, dt = trie_build(u, s), trie_build(u, t_items)
    for e in dt.links():
        _, top, bottom = e
        assert (NODE, top) in ds.ranges and (NODE, bottom) in ds.ranges
        nodes_between = [n for n in ds.nodes() if bottom.startswith(n[1]) and len(n[1]) >= len(top)]
        assert len(ds.conflicts(PrefixChain(top, bottom))) >= 2 * len(nodes_between) - 1


@settings(max_examples=60, deadline=None)
@given(st.lists(st.text("ab", max_size=6), unique=True, max_size=20), st.data())
def test_updates_equal_rebuild(words, data):
    u = Universe.strings("ab")
    t = CompressedTrie.build(u, [])
    for w in words:
        t, _, _ = t.insert_local(w)
    assert t == CompressedTrie.build(u, words)
    assert set(t.ranges) == uncompressed_trie(words)
    assert incidence_consistent(t)
    left = set(words)
    for w in data.draw(st.permutations(words)):
        t, _, _ = t.delete_local(w)
        left.discard(w)
        assert t == CompressedTrie.build(u, left)
