import collections
import math
import random

import pytest

from skipweb.core import Universe
from skipweb.errors import MemoryTooSmall, WrongUniverse
from skipweb.generators import random_items
from skipweb.hosting import (assign_arbitrary, assign_bucketed_1d, congestion, pointer_counts, references,
                             top_elements)
from skipweb.web import level_of, sw_build

LIST = Universe.total_order()


def web_of(n, seed=1, universe=LIST):
    rng = random.Random(seed)
    return sw_build(universe, random_items(universe, n, rng), rng)


@pytest.fixture(scope="module")
def web1024():
    return web_of(1024)


def test_ten_elements_one_host():
    web = web_of(1)
    assert web.element_count() <= 10
    a = assign_arbitrary(web, 10, random.Random(0))
    assert a.hosts == 1 and set(a.home.values()) == {0}
    web = web_of(3)
    a = assign_arbitrary(web, web.element_count(), random.Random(0))
    assert a.hosts == 1


def test_arbitrary_memory_and_hosts(web1024):
    m = math.ceil(math.log2(1024))
    for seed in (1, 2):
        a = assign_arbitrary(web1024, m, random.Random(seed))
        assert a.max_memory() <= m
        assert a.hosts == math.ceil(web1024.element_count() / m)
        assert a.hosts <= 4 * 1024  # Theta(n) hosts
        assert set(a.home) == set(web1024.elements())


def test_memory_too_small(web1024):
    with pytest.raises(MemoryTooSmall):
        assign_arbitrary(web1024, 0, random.Random(0))
    with pytest.raises(MemoryTooSmall):
        assign_bucketed_1d(web1024, 0)


def test_bucketed_needs_list():
    with pytest.raises(WrongUniverse):
        assign_bucketed_1d(web_of(16, universe=Universe.strings()), 16)


def test_bucketed_basic_levels_and_contiguity():
    web = web_of(16)
    a = assign_bucketed_1d(web, 16)
    assert a.group == 4
    basic = sorted({level_of(k) for k in web.keys() if level_of(k) % a.group == 0})
    assert basic == ([0, 4] if web.height >= 4 else [0])
    # each host's block on a basic list is a contiguous run of elements
    order = {}
    for key in web.keys():
        if level_of(key) % a.group:
            continue
        struct = web.levels[key]
        for i, e in enumerate(sorted(struct.element_ids(), key=lambda e: (e[1], e[0] == "l"))):
            order[(key, e)] = i
    runs = collections.defaultdict(list)
    for el, h in a.home.items():
        if el in order:
            runs[(h, el[0])].append(order[el])
    for idx in runs.values():
        idx.sort()
        assert idx == list(range(idx[0], idx[0] + len(idx)))


def test_bucketed_replicas_are_boundary_ranges():
    web = web_of(4096, seed=3)
    a = assign_bucketed_1d(web, 12)
    assert a.hosts <= 4 * 4096
    per = collections.Counter()
    links = collections.Counter()
    for el, hs in a.copies.items():
        assert level_of(el[0]) % a.group != 0
        for h in hs:
            per[(h, el[0])] += 1
            if el[1][0] == "l":
                links[(h, el[0])] += 1
    assert sum(per.values()) / len(per) <= 3
    assert max(links.values()) <= 3


def test_bucketed_basic_level_count_sqrt_memory():
    web = web_of(4096, seed=2)
    a = assign_bucketed_1d(web, 64)
    assert a.group == 6
    above = {level_of(k) for k in web.keys() if level_of(k) % a.group == 0} - {0}
    assert len(above) == web.height // a.group == 2


def test_roots_are_top_level_copies(web1024):
    a = assign_arbitrary(web1024, 10, random.Random(0))
    tops = {k for k, _ in top_elements(web1024)}
    for h in a.host_ids():
        key, eid = a.roots[h]
        assert key in tops and a.holds(h, (key, eid))


def test_congestion_arbitrary(web1024):
    a = assign_arbitrary(web1024, 10, random.Random(0))
    c = congestion(a, web1024)
    assert c.max <= 20 * math.log2(1024)
    assert sum(c.local_refs.values()) == sum(1 for _ in references(web1024))
    assert sum(pointer_counts(a, web1024).values()) == sum(1 for _ in references(web1024))


def test_congestion_bucketed_tracks_storage():
    web = web_of(1024, seed=4)
    a = assign_bucketed_1d(web, 32)
    c = congestion(a, web)
    stored = a.stored_counts()
    assert all(c.per_host[h] <= 10 * stored[h] + c.start_load for h in a.host_ids())
    assert c.start_load == pytest.approx(1024 / a.hosts)
