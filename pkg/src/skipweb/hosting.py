"""Assigning skip-web elements to hosts, plus memory and congestion metrics.

Memory is counted in stored elements (nodes and links); pointer counts are
reported next to it.  Every element has exactly one home host.  The
bucketed strategy may also place read-only replicas on other hosts.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import Kind
from .errors import MemoryTooSmall, WrongUniverse
from .web import ROOT_KEY, SkipWeb, level_of


@dataclass
class HostAssignment:
    strategy: str
    memory: int
    hosts: int
    home: dict  # (key, eid) -> host id
    copies: dict = field(default_factory=dict)  # (key, eid) -> set of replica host ids
    roots: dict = field(default_factory=dict)  # host id -> (key, eid)
    group: int = 1  # levels per basic group (bucketed only)
    spans: dict = field(default_factory=dict)  # (host, basic key) -> (lo, hi) of its block
    root_keys: dict = field(default_factory=dict)  # host id -> top key copied onto it

    def __post_init__(self):
        self._homed: dict = {}
        for el, h in self.home.items():
            self._homed.setdefault(h, set()).add(el)

    def _roots_by_key(self) -> dict:
        if getattr(self, "_root_index", None) is None:
            self._root_index = {}
            for h, k in sorted(self.root_keys.items()):
                self._root_index.setdefault(k, []).append(h)
        return self._root_index

    def root_hosts(self, key) -> list:
        return self._roots_by_key().get(key, [])

    def copied_keys(self) -> list:
        """Level keys that have a root copy on some host."""
        return list(self._roots_by_key())

    def host_ids(self) -> range:
        return range(self.hosts)

    def homed(self, h) -> set:
        return self._homed.get(h, set())

    def replicas(self, h) -> set:
        return {el for el, hs in self.copies.items() if h in hs}

    def holds(self, h, el) -> bool:
        return self.home.get(el) == h or h in self.copies.get(el, ()) or self.root_keys.get(h) == el[0]

    def holders(self, el) -> list:
        """Home host first, then replica hosts in id order."""
        home = self.home[el]
        return [home] + sorted(self.copies.get(el, set()) - {home})

    def route_host(self, el, q):
        """The copy of ``el`` a query for ``q`` should be sent to.

        Pointers to replicated elements carry the block span of each
        copy, so the sender picks the copy whose block covers ``q``.
        """
        reps = self.copies.get(el)
        if not reps:
            return self.home[el]
        level = len(el[0]) - 1
        basic = el[0][:1 + (level // self.group) * self.group]
        for h in self.holders(el):
            span = self.spans.get((h, basic))
            if span is not None and span[0] <= q <= span[1]:
                return h
        return self.home[el]

    def covering_host(self, elements, q):
        """A host whose block covers ``q`` and stores some of ``elements``.

        Only meaningful for bucketed blocking, where such a host stores
        every element of its block, and of the tower above it, that
        contains ``q``.
        """
        if not self.spans:
            return None
        for el in elements:
            level = len(el[0]) - 1
            basic = el[0][:1 + (level // self.group) * self.group]
            for h in self.holders(el):
                span = self.spans.get((h, basic))
                if span is not None and span[0] <= q <= span[1]:
                    return h
        return None

    def memory_of(self, h) -> int:
        return len(self.homed(h))

    def max_memory(self) -> int:
        return max((self.memory_of(h) for h in self.host_ids()), default=0)

    def replica_count(self) -> int:
        return sum(len(v) for v in self.copies.values())

    def stored_counts(self, web=None) -> dict:
        """Home elements plus replicas (and root copies, given ``web``) per host."""
        out = {h: self.memory_of(h) for h in self.host_ids()}
        for hs in self.copies.values():
            for h in hs:
                out[h] += 1
        if web is not None:
            for h, k in self.root_keys.items():
                out[h] += len(web.levels[k]) if k in web.levels else 0
        return out

    def max_stored(self, web=None) -> int:
        return max(self.stored_counts(web).values(), default=0)

    # -- bookkeeping for updates ----------------------------------------

    def place(self, el, h, replica_hosts=()):
        self.home[el] = h
        self._homed.setdefault(h, set()).add(el)
        reps = set(replica_hosts) - {h}
        if reps:
            self.copies[el] = reps

    def forget(self, el):
        h = self.home.pop(el, None)
        if h is not None:
            self._homed[h].discard(el)
        self.copies.pop(el, None)


def _check_memory(memory):
    if not isinstance(memory, int) or memory < 1:
        raise MemoryTooSmall("memory must hold at least one element, got %r" % (memory,))


def top_elements(web: SkipWeb) -> list:
    return [(k, e) for k in web.top_keys() for e in web.levels[k].element_ids()]


def choose_roots(web: SkipWeb, assignment: HostAssignment) -> None:
    """Give every host a read-only copy of one top-level structure.

    Searches start at the root of that copy, so the first level is always
    processed on the originating host.  Top-level structures hold O(1)
    items in expectation, so the copy is cheap.
    """
    tops = web.top_keys()
    assignment.root_keys = {h: tops[h % len(tops)] for h in assignment.host_ids()}
    assignment._root_index = None
    assignment.roots = {h: (k, web.levels[k].root()) for h, k in assignment.root_keys.items()}


def assign_arbitrary(web: SkipWeb, memory: int, rng) -> HostAssignment:
    """Shuffle all elements and deal them round-robin over ceil(E/M) hosts."""
    _check_memory(memory)
    elements = list(web.elements())
    rng.shuffle(elements)
    hosts = max(1, math.ceil(len(elements) / memory))
    home = {el: i % hosts for i, el in enumerate(elements)}
    a = HostAssignment("arbitrary", memory, hosts, home)
    choose_roots(web, a)
    return a


def assign_bucketed_1d(web: SkipWeb, memory: int, group: int | None = None) -> HostAssignment:
    """Contiguous blocks on basic levels, each with its tower above.

    Levels whose index is a multiple of ``group`` (default ceil(log2 M))
    are basic.  Basic lists are cut greedily into contiguous blocks, and
    consecutive small lists may share a host;
    a host stores its block plus every element of the non-basic levels
    above that conflicts, transitively, with the block.  An element is
    homed on the first host that claims it and replicated on later ones.
    A block always takes at least one basic element, so a host can exceed
    ``memory`` when a single element's tower is larger than the budget.
    """
    if web.universe.kind is not Kind.TOTAL_ORDER:
        raise WrongUniverse("bucketed blocking needs a totally ordered universe")
    _check_memory(memory)
    if group is None:
        group = max(1, math.ceil(math.log2(memory)))
    home: dict = {}
    copies: dict = {}
    spans: dict = {}
    host = 0
    used = 0
    basic = [k for k in web.keys() if level_of(k) % group == 0]
    for key in basic:
        for e in _list_order(web.levels[key]):
            tower = _tower(web, key, e, group)
            fresh = [el for el in tower if el not in home]
            if used and used + len(fresh) > memory:
                host += 1
                used = 0
            for el in tower:
                if el in home:
                    if home[el] != host:
                        copies.setdefault(el, set()).add(host)
                else:
                    home[el] = host
                    used += 1
            lo, hi = (e[1], e[1]) if e[0] == "n" else (e[1], e[2])
            span = spans.get((host, key))
            spans[(host, key)] = (lo, hi) if span is None else (span[0], hi)
    for el in web.elements():  # cannot happen for a consistent web
        if el not in home:
            home[el] = host
    a = HostAssignment("bucketed", memory, host + 1, home, copies, group=group, spans=spans)
    choose_roots(web, a)
    return a


def _list_order(struct) -> list:
    keys = struct.keys
    out = []
    for i, k in enumerate(keys):
        out.append(("n", k))
        if i + 1 < len(keys):
            out.append(("l", k, keys[i + 1]))
    return out


def _tower(web: SkipWeb, key, eid, group) -> list:
    """``(key, eid)`` and every non-basic element above it that conflicts."""
    out = [(key, eid)]
    frontier = [(key, eid)]
    seen = {(key, eid)}
    while frontier:
        nxt = []
        for el in frontier:
            for child in sorted(web.reverse.get(el, ())):
                if level_of(child[0]) % group == 0 or child in seen:
                    continue
                seen.add(child)
                out.append(child)
                nxt.append(child)
        frontier = nxt
    return out


# -- congestion -------------------------------------------------------------


def references(web: SkipWeb):
    """Every pointer in the web as ``(holder element, target element)``."""
    for key in web.keys():
        struct = web.levels[key]
        for v, e in sorted(struct.incidences()):
            yield (key, v), (key, e)
            yield (key, e), (key, v)
        if key == ROOT_KEY:
            continue
        pk = key[:-1]
        for e in struct.conflict_elements():
            for t in web.hyperlinks.get((key, e), ()):
                yield (key, e), (pk, t)


@dataclass
class CongestionReport:
    per_host: dict
    local_refs: dict
    remote_refs: dict
    start_load: float

    @property
    def max(self) -> float:
        return max(self.per_host.values(), default=0.0)

    @property
    def mean(self) -> float:
        return sum(self.per_host.values()) / len(self.per_host) if self.per_host else 0.0


def congestion(assignment: HostAssignment, web: SkipWeb) -> CongestionReport:
    """References into each host, remote references out of it, plus n/H."""
    home = assignment.home
    incoming = {h: 0 for h in assignment.host_ids()}
    outgoing = {h: 0 for h in assignment.host_ids()}
    for src, dst in references(web):
        hs, hd = home[src], home[dst]
        incoming[hd] += 1
        if hs != hd:
            outgoing[hs] += 1
    start = len(web) / assignment.hosts
    per_host = {h: incoming[h] + outgoing[h] + start for h in assignment.host_ids()}
    return CongestionReport(per_host, incoming, outgoing, start)


def pointer_counts(assignment: HostAssignment, web: SkipWeb) -> dict:
    """Pointers held by each host's home elements."""
    out = {h: 0 for h in assignment.host_ids()}
    for src, _ in references(web):
        out[assignment.home[src]] += 1
    return out
