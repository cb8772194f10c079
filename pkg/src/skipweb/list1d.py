"""Sorted doubly-linked list over a total order.

Nodes carry singleton ranges ``[x, x]`` and the link between consecutive
keys ``x < y`` carries the closed interval ``[x, y]``.  Two sentinel nodes
at -inf and +inf make every query fall in some range.
"""

from __future__ import annotations

import math
import numbers
from bisect import bisect_left, bisect_right, insort
from dataclasses import dataclass

from .core import LINK, NODE, Kind, LinkStructure, Universe
from .errors import DuplicateKey, InvalidItem, ItemNotFound

NEG = -math.inf
POS = math.inf


@dataclass(frozen=True)
class Interval:
    """Closed interval; ``lo == hi`` is a point.

    Two proper intervals conflict only when they overlap in more than a
    shared endpoint; a point conflicts with any interval containing it.
    """

    lo: float
    hi: float

    @property
    def is_point(self) -> bool:
        return self.lo == self.hi

    def intersects(self, other: "Interval") -> bool:
        if self.is_point or other.is_point:
            return self.lo <= other.hi and other.lo <= self.hi
        return self.lo < other.hi and other.lo < self.hi

    def contains(self, q) -> bool:
        return self.lo <= q <= self.hi

    def occupancy(self, structure: "ListStructure") -> int:
        """Number of stored items of ``structure`` inside this interval."""
        keys = structure.keys
        return max(0, bisect_right(keys, self.hi, 1, len(keys) - 1) - bisect_left(keys, self.lo, 1, len(keys) - 1))


def _check_key(x):
    if isinstance(x, bool) or not isinstance(x, numbers.Real):
        raise InvalidItem("list keys must be real numbers, got %r" % (x,))
    if isinstance(x, float) and not math.isfinite(x):
        raise InvalidItem("list keys must be finite, got %r" % (x,))


class ListStructure(LinkStructure):
    kind = Kind.TOTAL_ORDER
    range_type = Interval

    def __init__(self, universe: Universe, keys: list):
        super().__init__(universe)
        self.keys = keys
        self.items = frozenset(keys[1:-1])
        r = {}
        prev = None
        for k in keys:
            r[(NODE, k)] = Interval(k, k)
            if prev is not None:
                r[(LINK, prev, k)] = Interval(prev, k)
            prev = k
        self.ranges = r

    @classmethod
    def build(cls, universe: Universe, s) -> "ListStructure":
        items = list(s)
        for x in items:
            _check_key(x)
        keys = sorted(items)
        for a, b in zip(keys, keys[1:]):
            if a == b:
                raise DuplicateKey("duplicate key %r" % (a,))
        return cls(universe, [NEG] + keys + [POS])

    def root(self):
        return (NODE, NEG)

    def _position(self, eid) -> int:
        # nodes sit at even positions, links at odd ones
        i = bisect_left(self.keys, eid[1])
        return 2 * i if eid[0] == NODE else 2 * i + 1

    def _element_at(self, pos: int):
        i = pos // 2
        if pos % 2 == 0:
            return (NODE, self.keys[i])
        return (LINK, self.keys[i], self.keys[i + 1])

    def _target(self, q):
        keys = self.keys
        i = bisect_left(keys, q)
        if keys[i] == q:
            return (NODE, q)
        return (LINK, keys[i - 1], keys[i])

    def locate_path(self, q, start=None) -> list:
        target = self._target(q)
        if start is None:
            return [target]
        a, b = self._position(start), self._position(target)
        step = 1 if b >= a else -1
        return [self._element_at(p) for p in range(a, b + step, step)]

    def specificity(self, eid):
        return 1 if eid[0] == NODE else 0

    def conflicts(self, rng: Interval) -> list:
        keys = self.keys
        out = []
        if rng.is_point:
            x = rng.lo
            i = bisect_left(keys, x)
            if i < len(keys) and keys[i] == x:
                out.append((NODE, x))
                if i > 0:
                    out.append((LINK, keys[i - 1], x))
                if i + 1 < len(keys):
                    out.append((LINK, x, keys[i + 1]))
            else:
                out.append((LINK, keys[i - 1], keys[i]))
            return sorted(out)
        lo, hi = rng.lo, rng.hi
        i = bisect_left(keys, lo)
        j = bisect_right(keys, hi)
        for k in keys[i:j]:
            out.append((NODE, k))
        # links (keys[m], keys[m+1]) with keys[m] < hi and keys[m+1] > lo
        first = max(bisect_right(keys, lo) - 1, 0)
        last = min(bisect_left(keys, hi), len(keys) - 1)
        for m in range(first, last):
            out.append((LINK, keys[m], keys[m + 1]))
        return sorted(out)

    def incidences(self) -> set:
        inc = set()
        for a, b in zip(self.keys, self.keys[1:]):
            inc.add(((NODE, a), (LINK, a, b)))
            inc.add(((NODE, b), (LINK, a, b)))
        return inc

    def neighbors(self, eid) -> list:
        if eid[0] == NODE:
            i = bisect_left(self.keys, eid[1])
            out = []
            if i > 0:
                out.append((LINK, self.keys[i - 1], eid[1]))
            if i + 1 < len(self.keys):
                out.append((LINK, eid[1], self.keys[i + 1]))
            return out
        return [(NODE, eid[1]), (NODE, eid[2])]

    def insert_local(self, x):
        """Insert ``x``; returns ``(new, replaced_ids, created_ids)``."""
        _check_key(x)
        if x in self.items:
            raise DuplicateKey("duplicate key %r" % (x,))
        keys = list(self.keys)
        i = bisect_left(keys, x)
        a, b = keys[i - 1], keys[i]
        insort(keys, x)
        new = self._derive(keys, removed=[(LINK, a, b)],
                           added={(NODE, x): Interval(x, x), (LINK, a, x): Interval(a, x), (LINK, x, b): Interval(x, b)})
        return new, [(LINK, a, b)], sorted([(NODE, x), (LINK, a, x), (LINK, x, b)])

    def delete_local(self, x):
        if x not in self.items:
            raise ItemNotFound(x)
        keys = list(self.keys)
        i = bisect_left(keys, x)
        a, b = keys[i - 1], keys[i + 1]
        del keys[i]
        replaced = sorted([(NODE, x), (LINK, a, x), (LINK, x, b)])
        new = self._derive(keys, removed=replaced, added={(LINK, a, b): Interval(a, b)})
        return new, replaced, [(LINK, a, b)]

    def _derive(self, keys, removed, added) -> "ListStructure":
        new = ListStructure.__new__(ListStructure)
        LinkStructure.__init__(new, self.universe)
        new.keys = keys
        new.items = frozenset(keys[1:-1])
        r = dict(self.ranges)
        for e in removed:
            del r[e]
        r.update(added)
        new.ranges = r
        return new


def list_locate(structure: ListStructure, q, start=None):
    return structure.locate(q, start)


def list_insert_local(structure: ListStructure, x):
    return structure.insert_local(x)
