import math
import random
import statistics

import pytest

from skipweb.core import Universe, build_structure
from skipweb.errors import DanglingHyperlink
from skipweb.generators import random_items, random_query
from skipweb.hosting import assign_arbitrary
from skipweb.netsim import HyperLink, make_network, messages_csv, net_load, net_route_update, sw_query
from skipweb.web import sw_build

LIST = Universe.total_order()


def network(n, blocking="arbitrary", memory=None, seed=1, universe=LIST):
    rng = random.Random(seed)
    web = sw_build(universe, random_items(universe, n, rng), rng)
    memory = memory or max(1, math.ceil(math.log2(max(n, 2))))
    return make_network(web, blocking, memory, random.Random(seed + 1)), rng


def test_single_host_everything_local():
    rng = random.Random(1)
    web = sw_build(LIST, random_items(LIST, 50, rng), rng)
    net = make_network(web, "arbitrary", web.element_count(), rng)
    assert net.assignment.hosts == 1
    for key, eid in web.hyperlinks:
        assert all(link.host == 0 for link in net.pointer(key, eid))
    for _ in range(50):
        _, trace = sw_query(net, rng.randrange(1 << 62), 0)
        assert trace.count == 0


def test_single_item():
    net, rng = network(1)
    for h in net.hosts:
        answer, trace = sw_query(net, 5, h)
        assert trace.count <= 2


def test_every_hyperlink_resolves():
    net, _ = network(64)
    net.verify()
    for key, eid in net.web.hyperlinks:
        for link in net.pointer(key, eid):
            net.resolve(link)


def test_dangling_hyperlink_detected():
    net, _ = network(64)
    key, eid = next(iter(net.web.hyperlinks))
    link = net.pointer(key, eid)[0]
    bad = HyperLink((link.host + 1) % net.assignment.hosts, link.address)
    with pytest.raises(DanglingHyperlink):
        net.resolve(bad)
    del net.assignment.home[link.address]
    with pytest.raises(DanglingHyperlink):
        net.verify()


@pytest.mark.parametrize("blocking", ["arbitrary", "bucketed"])
def test_queries_agree_with_sequential(blocking):
    net, rng = network(512, blocking)
    flat = build_structure(LIST, net.web.items)
    for _ in range(200):
        q = rng.randrange(1 << 62)
        answer, _ = sw_query(net, q, rng.randrange(net.assignment.hosts))
        assert answer == flat.locate(q)


def test_quadtree_messages_logarithmic():
    u = Universe.points(bits=20)
    net, rng = network(1024, universe=u)
    counts = [sw_query(net, random_query(u, rng), rng.randrange(net.assignment.hosts))[1].count
              for _ in range(300)]
    assert statistics.mean(counts) <= 15 * math.log2(1024)


def test_updates_keep_network_consistent():
    net, rng = network(128)
    present = sorted(net.web.items)
    for i in range(150):
        if i % 3 == 2:
            x = present.pop(rng.randrange(len(present)))
            report, trace = net_route_update(net, "delete", x, 0)
        else:
            x = rng.randrange(1 << 62)
            present.append(x)
            report, trace = net_route_update(net, "insert", x, rng.randrange(net.assignment.hosts), rng)
        assert trace.count % 2 == 0
    net.verify()
    net.web.check_hyperlinks()
    flat = build_structure(LIST, present)
    for _ in range(100):
        q = rng.randrange(1 << 62)
        assert sw_query(net, q, 0)[0] == flat.locate(q)


def run_trace(seed):
    net, rng = network(256, seed=seed)
    for _ in range(20):
        net_route_update(net, "insert", rng.randrange(1 << 62), 0, rng)
    for _ in range(50):
        sw_query(net, rng.randrange(1 << 62), rng.randrange(net.assignment.hosts))
    return messages_csv(net.log)


def test_deterministic_traces():
    a = run_trace(5)
    assert a == run_trace(5)
    assert a != run_trace(6)
    assert a.splitlines()[0] == "op_id,seq,src,dst,level,kind"


def test_reload_after_insert_same_results():
    net, rng = network(128)
    net_route_update(net, "insert", 12345, 0, rng)
    snapshot = net.web.copy()
    again = net_load(snapshot, net.assignment)
    for _ in range(50):
        q = rng.randrange(1 << 62)
        h = rng.randrange(net.assignment.hosts)
        a1, t1 = sw_query(net, q, h)
        a2, t2 = sw_query(again, q, h)
        assert a1 == a2
        assert [(m.src, m.dst, m.level, m.kind) for m in t1.messages] == \
            [(m.src, m.dst, m.level, m.kind) for m in t2.messages]


def test_arbitrary_assignment_is_seeded():
    rng = random.Random(1)
    web = sw_build(LIST, random_items(LIST, 100, rng), rng)
    a = assign_arbitrary(web, 8, random.Random(3))
    b = assign_arbitrary(web, 8, random.Random(3))
    assert a.home == b.home
