"""Deterministic in-process simulation of a skip-web spread over hosts.

Cost model: a query is processed on one host at a time and touching an
element the current host does not store moves processing to a host that
stores it, at the price of a request and a reply (2 messages).  When a
level's hyperlink targets are all remote and none stored locally contains
the query, every distinct host holding targets is probed (2 messages
each) and processing continues at the host of the best target.  Under
bucketed blocking a pointer also names the block span of each copy, so
a single probe to the copy whose block covers the query suffices.
Walking over locally stored elements is free.
"""

from __future__ import annotations

import csv
import io
import random
from dataclasses import dataclass, field

from .errors import DanglingHyperlink
from .hosting import HostAssignment, assign_arbitrary, assign_bucketed_1d, choose_roots
from .web import ROOT_KEY, SkipWeb, level_of, parent_key


@dataclass(frozen=True)
class HyperLink:
    host: int
    address: tuple  # (level key, element id)


@dataclass(frozen=True)
class Message:
    op_id: int
    seq: int
    src: int
    dst: int
    level: int
    kind: str


@dataclass
class MessageTrace:
    op_id: int
    messages: list = field(default_factory=list)
    levels: set = field(default_factory=set)
    rebuilt: bool = False

    @property
    def count(self) -> int:
        return len(self.messages)

    def send(self, src, dst, level, kind):
        self.messages.append(Message(self.op_id, len(self.messages), src, dst, level, kind))
        self.levels.add(level)


MESSAGE_FIELDS = ("op_id", "seq", "src", "dst", "level", "kind")


def messages_csv(traces) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(MESSAGE_FIELDS)
    for t in traces:
        for m in t.messages:
            w.writerow((m.op_id, m.seq, m.src, m.dst, m.level, m.kind))
    return buf.getvalue()


class SimNetwork:
    def __init__(self, web: SkipWeb, assignment: HostAssignment, reassign=None, rng=None):
        self.web = web
        self.assignment = assignment
        # picks hosts for new elements under arbitrary blocking
        self.rng = rng if rng is not None else random.Random(0)
        self.log: list = []
        self._next_op = 0
        self.last_host = None  # host where the latest query ended
        # called after a rebuild to compute a fresh assignment
        self._reassign = reassign

    @property
    def hosts(self) -> range:
        return self.assignment.host_ids()

    def root(self, h):
        return self.assignment.roots[h]

    def pointer(self, key, eid) -> tuple:
        """Hyperlinks of an element as (host, address) pairs."""
        pk = parent_key(key)
        return tuple(HyperLink(self.assignment.home[(pk, t)], (pk, t)) for t in self.web.hyperlinks[(key, eid)])

    def resolve(self, link: HyperLink):
        key, eid = link.address
        struct = self.web.levels.get(key)
        if struct is None or eid not in struct.ranges or self.assignment.home.get(link.address) != link.host:
            raise DanglingHyperlink("hyperlink %r does not resolve" % (link,))
        return struct.ranges[eid]

    def verify(self):
        """Resolve every hyperlink and root; raise on the first failure."""
        home = self.assignment.home
        for el in self.web.elements():
            if el not in home:
                raise DanglingHyperlink("element %r has no host" % (el,))
        for (key, eid) in self.web.hyperlinks:
            for link in self.pointer(key, eid):
                self.resolve(link)
        for h in self.hosts:
            r = self.root(h)
            self.resolve(HyperLink(home[r], r))

    def _op(self) -> MessageTrace:
        t = MessageTrace(self._next_op)
        self._next_op += 1
        return t

    # -- queries -------------------------------------------------------

    def route_query(self, q, origin: int, trace: MessageTrace | None = None):
        if trace is None:
            trace = self._op()
            self.log.append(trace)
        a = self.assignment
        web = self.web
        cur = origin

        def access(el):
            nonlocal cur
            if not a.holds(cur, el):
                dst = a.route_host(el, q)
                lvl = level_of(el[0])
                trace.send(cur, dst, lvl, "request")
                trace.send(dst, cur, lvl, "reply")
                cur = dst

        key, eid = self.root(origin)
        access((key, eid))
        struct = web.levels[key]
        path = struct.locate_path(q, eid)
        for e in path[1:]:
            access((key, e))
        while key != ROOT_KEY:
            cands = web.hyperlinks.get((key, path[-1]))
            if cands is None:
                raise DanglingHyperlink("no hyperlinks for %r at %r" % (path[-1], key))
            key = parent_key(key)
            struct = web.levels[key]
            local = [t for t in cands if a.holds(cur, (key, t))]
            best = struct.best_containing(local, q)
            if best is None:
                lvl = level_of(key)
                covering = a.covering_host([(key, t) for t in cands], q)
                if covering is not None:
                    # that host stores every target containing q
                    trace.send(cur, covering, lvl, "probe")
                    trace.send(covering, cur, lvl, "reply")
                    cur = covering
                    best = struct.best_containing([t for t in cands if a.holds(cur, (key, t))], q)
                else:
                    for h in sorted({a.route_host((key, t), q) for t in cands} - {cur}):
                        trace.send(cur, h, lvl, "probe")
                        trace.send(h, cur, lvl, "reply")
                    best = struct.best_containing(cands, q)
                    if best is None:
                        raise DanglingHyperlink("no hyperlink target contains the query")
                    if not a.holds(cur, (key, best)):
                        cur = a.route_host((key, best), q)
            path = struct.locate_path(q, best)
            for e in path[1:]:
                access((key, e))
            trace.levels.add(level_of(key))
        self.last_host = cur
        return path[-1], trace

    # -- updates -------------------------------------------------------

    def route_update(self, op: str, x, origin: int, rng=None):
        """Insert or delete ``x`` starting from ``origin``.

        The item is first located at level 0 and the host where the search
        ends coordinates the update.  Every level on the item's path is
        updated bottom-up; each other host storing a touched element
        (replaced, created, re-linked, or a copy of one) costs one request
        and one acknowledgement per update.

        New elements of a level go to one host: a uniformly random one
        under arbitrary blocking, the home of a replaced element (with its
        replicas) under bucketed blocking.
        """
        trace = self._op()
        self.log.append(trace)
        self.route_query(x, origin, trace)
        if op == "insert":
            report = self.web.insert(x, rng)
        elif op == "delete":
            report = self.web.delete(x)
        else:
            raise ValueError("unknown update %r" % (op,))
        if report.rebuilt:
            trace.rebuilt = True
            self.assignment = self._reassign(self.web)
            return report, trace
        a = self.assignment
        coordinator = self.last_host
        first_seen = {}  # host -> first level it is touched on
        below = None  # home of x's element on the previous level
        for ch in report.changes:
            key = ch.key
            lvl = level_of(key)
            touched = set()
            anchor = None
            for e in ch.replaced:
                el = (key, e)
                if el in a.home:
                    touched.update(a.holders(el))
                    if anchor is None:
                        anchor = el
            if a.strategy == "arbitrary":
                replica_hosts = set()
                home = self.rng.randrange(a.hosts) if ch.created else None
            else:
                replica_hosts = set(a.holders(anchor)[1:]) if anchor else set()
                home = a.home[anchor] if anchor else (below if below is not None else coordinator)
            for e in ch.replaced:
                a.forget((key, e))
            for e in ch.created:
                a.place((key, e), home, replica_hosts)
                touched.add(home)
                touched.update(replica_hosts)
            for ck, e in ch.relinked:
                el = (ck, e)
                if el in a.home:
                    touched.update(a.holders(el))
            if ch.replaced or ch.created:
                touched.update(a.root_hosts(key))  # refresh root copies
            for h in touched:
                first_seen.setdefault(h, lvl)
            trace.levels.add(lvl)
            if home is not None:
                below = home
        # one request and one acknowledgement per host; a host applies
        # every change it stores, on all levels, in that one round
        for h in sorted(first_seen, key=lambda h: (first_seen[h], h)):
            if h != coordinator:
                trace.send(coordinator, h, first_seen[h], "update")
                trace.send(h, coordinator, first_seen[h], "ack")
        self._fix_roots({ch.key for ch in report.changes if ch.key in self.web.levels})
        return report, trace

    def _fix_roots(self, changed=None):
        a = self.assignment
        if any(k not in self.web.levels for k in a.copied_keys()):
            choose_roots(self.web, a)
            return
        keys = a.copied_keys() if changed is None else changed
        for k in keys:
            root = (k, self.web.levels[k].root())
            for h in a.root_hosts(k):
                a.roots[h] = root


def net_load(web: SkipWeb, assignment: HostAssignment, reassign=None, rng=None) -> SimNetwork:
    net = SimNetwork(web, assignment, reassign, rng)
    net.verify()
    return net


def net_route_query(net: SimNetwork, q, origin: int):
    return net.route_query(q, origin)


def sw_query(net: SimNetwork, q, origin: int):
    """Distributed query: the level-0 answer and its message trace."""
    return net.route_query(q, origin)


def net_route_update(net: SimNetwork, op: str, x, origin: int, rng=None):
    return net.route_update(op, x, origin, rng)


def make_network(web: SkipWeb, blocking: str, memory: int, rng) -> SimNetwork:
    """Assign ``web`` with the named strategy and load it."""
    def reassign(w):
        if blocking == "bucketed":
            return assign_bucketed_1d(w, memory)
        return assign_arbitrary(w, memory, rng)

    return net_load(web, reassign(web), reassign, rng)
