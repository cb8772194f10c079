"""Trapezoidal maps of non-crossing segments.

Segments are pairs of integer points ``((x1, y1), (x2, y2))`` with
``x1 < x2``.  Inputs must be in general position: every endpoint has its own
x-coordinate and no segment touches another.  Predicates use integer
cross products; the few places that need a coordinate use ``Fraction``.

Construction is randomized incremental over a search DAG (the DAG also
answers point location and region queries).  Trapezoids are the nodes of
the link structure; links join trapezoids that share part of a wall.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .core import LINK, NODE, Kind, LinkStructure, Universe
from .errors import CrossingSegments, DegenerateInput, InvalidItem, OnBoundary, PointOutsideBounds, UnsupportedOperation


def normalize_segment(seg) -> tuple:
    (x1, y1), (x2, y2) = seg
    for c in (x1, y1, x2, y2):
        if isinstance(c, bool) or not isinstance(c, int):
            raise InvalidItem("segment coordinates must be integers, got %r" % (seg,))
    if x1 == x2:
        raise DegenerateInput("vertical segment %r" % (seg,))
    if x1 > x2:
        x1, y1, x2, y2 = x2, y2, x1, y1
    return ((x1, y1), (x2, y2))


def y_at(seg, x) -> Fraction:
    (x1, y1), (x2, y2) = seg
    return y1 + Fraction((y2 - y1) * (x - x1), x2 - x1)


def compare_at_ratio(s, g, num, den) -> int:
    """Sign of ``s(x) - g(x)`` at ``x = num / den`` (``den > 0``), exactly."""
    (sx1, sy1), (sx2, sy2) = s
    (gx1, gy1), (gx2, gy2) = g
    sdx, gdx = sx2 - sx1, gx2 - gx1
    ns = sy1 * sdx * den + (sy2 - sy1) * (num - sx1 * den)
    ng = gy1 * gdx * den + (gy2 - gy1) * (num - gx1 * den)
    c = ns * gdx - ng * sdx
    return (c > 0) - (c < 0)


def side(seg, p) -> int:
    """+1 if ``p`` is above ``seg``, -1 below, 0 on its supporting line."""
    (x1, y1), (x2, y2) = seg
    c = (x2 - x1) * (p[1] - y1) - (y2 - y1) * (p[0] - x1)
    return (c > 0) - (c < 0)


def compare_at(s, g, x) -> int:
    """Sign of ``s(x) - g(x)`` for two non-vertical segments."""
    (sx1, sy1), (sx2, sy2) = s
    (gx1, gy1), (gx2, gy2) = g
    sdx, gdx = sx2 - sx1, gx2 - gx1
    ns = sy1 * sdx + (sy2 - sy1) * (x - sx1)
    ng = gy1 * gdx + (gy2 - gy1) * (x - gx1)
    c = ns * gdx - ng * sdx
    return (c > 0) - (c < 0)


def _orient(a, b, c) -> int:
    v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
    return (v > 0) - (v < 0)


def _on_segment(a, b, p) -> bool:
    return min(a[0], b[0]) <= p[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= p[1] <= max(a[1], b[1])


def segments_touch(s, t) -> bool:
    """Closed-segment intersection test."""
    a, b = s
    c, d = t
    o1, o2, o3, o4 = _orient(a, b, c), _orient(a, b, d), _orient(c, d, a), _orient(c, d, b)
    if o1 != o2 and o3 != o4:
        return True
    return ((o1 == 0 and _on_segment(a, b, c)) or (o2 == 0 and _on_segment(a, b, d))
            or (o3 == 0 and _on_segment(c, d, a)) or (o4 == 0 and _on_segment(c, d, b)))


def validate_segments(universe: Universe, segments) -> list:
    x0, y0, x1, y1 = universe.bbox
    segs = [normalize_segment(s) for s in segments]
    if len(set(segs)) != len(segs):
        raise DegenerateInput("duplicate segment")
    xs = set()
    for s in segs:
        for (x, y) in s:
            if not (x0 < x < x1 and y0 < y < y1):
                raise PointOutsideBounds("segment %r not strictly inside the box" % (s,))
            if x in xs:
                raise DegenerateInput("two endpoints share x = %r" % (x,))
            xs.add(x)
    order = sorted(segs)
    for i, s in enumerate(order):
        for t in order[i + 1:]:
            if t[0][0] > s[1][0]:
                break
            if segments_touch(s, t):
                raise CrossingSegments("%r meets %r" % (s, t))
    return segs


@dataclass(frozen=True)
class TrapRange:
    """Open trapezoid between ``bottom`` and ``top`` for left.x < x < right.x."""

    top: tuple
    bottom: tuple
    left: tuple
    right: tuple

    def intersects(self, other) -> bool:
        if isinstance(other, WallRange):
            return other.intersects(self)
        lo = max(self.left[0], other.left[0])
        hi = min(self.right[0], other.right[0])
        if lo >= hi:
            return False
        # interiors are non-empty and edges do not cross, so testing the
        # middle of the shared x-span decides
        m = lo + hi
        return (compare_at_ratio(self.bottom, other.top, m, 2) < 0
                and compare_at_ratio(other.bottom, self.top, m, 2) < 0)

    def contains(self, q) -> bool:
        return (self.left[0] < q[0] < self.right[0]
                and side(self.bottom, q) > 0 and side(self.top, q) < 0)

    def extent_at(self, x) -> tuple:
        return y_at(self.bottom, x), y_at(self.top, x)


@dataclass(frozen=True)
class WallRange:
    """Open vertical piece of a wall shared by two trapezoids."""

    x: int
    lo: Fraction
    hi: Fraction

    def intersects(self, other) -> bool:
        if isinstance(other, WallRange):
            return self.x == other.x and max(self.lo, other.lo) < min(self.hi, other.hi)
        if not other.left[0] <= self.x <= other.right[0]:
            return False
        b, t = other.extent_at(self.x)
        return max(b, self.lo) < min(t, self.hi)

    def contains(self, q) -> bool:
        return q[0] == self.x and self.lo < q[1] < self.hi


class _Trap:
    __slots__ = ("top", "bottom", "leftp", "rightp", "node")

    def __init__(self, top, bottom, leftp, rightp):
        self.top, self.bottom, self.leftp, self.rightp = top, bottom, leftp, rightp
        self.node = None

    def key(self):
        return (self.top, self.bottom, self.leftp, self.rightp)


class _Dag:
    """Search DAG node: kind 'x' (point), 'y' (segment) or 'leaf'."""

    __slots__ = ("kind", "item", "a", "b")

    def __init__(self, kind, item, a=None, b=None):
        # for 'x' a/b are left/right, for 'y' above/below
        self.kind, self.item, self.a, self.b = kind, item, a, b


def _leaf(trap):
    node = _Dag("leaf", trap)
    trap.node = node
    return node


class TrapezoidalMap(LinkStructure):
    kind = Kind.SEGMENTS
    range_type = TrapRange
    conflict_kinds = (NODE,)

    def __init__(self, universe: Universe):
        super().__init__(universe)
        x0, y0, x1, y1 = universe.bbox
        self.top_edge = ((x0, y1), (x1, y1))
        self.bottom_edge = ((x0, y0), (x1, y0))
        self.dag = None
        self.adjacent: dict = {}
        self.segment_xs: frozenset = frozenset()

    @classmethod
    def build(cls, universe: Universe, segments, validate: bool = True, order_seed=0) -> "TrapezoidalMap":
        if validate:
            segs = validate_segments(universe, segments)
        else:
            segs = [normalize_segment(s) for s in segments]
        tm = cls(universe)
        tm.items = frozenset(segs)
        x0, y0, x1, y1 = universe.bbox
        first = _Trap(tm.top_edge, tm.bottom_edge, (x0, y0), (x1, y1))
        tm.dag = _leaf(first)
        live = {first}
        order = sorted(segs)
        random.Random(order_seed).shuffle(order)
        for s in order:
            tm._insert(s, live)
        tm._finish(live)
        return tm

    # -- DAG search ------------------------------------------------------

    def _find_point(self, p) -> _Trap:
        node = self.dag
        while node.kind != "leaf":
            if node.kind == "x":
                if p[0] == node.item[0]:
                    raise OnBoundary("point %r on a wall" % (p,))
                node = node.b if p[0] > node.item[0] else node.a
            else:
                sd = side(node.item, p)
                if sd == 0:
                    raise OnBoundary("point %r on segment %r" % (p, node.item))
                node = node.a if sd > 0 else node.b
        return node.item

    def _find_after(self, s, x) -> _Trap:
        # trapezoid met by segment s just to the right of abscissa x
        node = self.dag
        while node.kind != "leaf":
            if node.kind == "x":
                node = node.b if node.item[0] <= x else node.a
            else:
                node = node.a if compare_at(s, node.item, x) > 0 else node.b
        return node.item

    def _insert(self, s, live):
        p, q = s
        traps = [self._find_point(p)]
        while traps[-1].rightp[0] < q[0]:
            traps.append(self._find_after(s, traps[-1].rightp[0]))
        k = len(traps) - 1
        uppers, lowers = [], []
        up_of, low_of = [], []
        for i, d in enumerate(traps):
            lx = p if i == 0 else d.leftp
            rx = q if i == k else d.rightp
            if i > 0 and side(s, d.leftp) < 0:
                assert uppers[-1].top == d.top
                uppers[-1].rightp = rx
            else:
                uppers.append(_Trap(d.top, s, lx, rx))
            if i > 0 and side(s, d.leftp) > 0:
                assert lowers[-1].bottom == d.bottom
                lowers[-1].rightp = rx
            else:
                lowers.append(_Trap(s, d.bottom, lx, rx))
            up_of.append(uppers[-1])
            low_of.append(lowers[-1])
        for t in uppers + lowers:
            _leaf(t)
        d0, dk = traps[0], traps[-1]
        left = _Trap(d0.top, d0.bottom, d0.leftp, p)
        right = _Trap(dk.top, dk.bottom, q, dk.rightp)
        _leaf(left)
        _leaf(right)
        for i, d in enumerate(traps):
            node = d.node
            ynode = _Dag("y", s, up_of[i].node, low_of[i].node)
            if k == 0:
                node.kind, node.item = "x", p
                node.a, node.b = left.node, _Dag("x", q, ynode, right.node)
            elif i == 0:
                node.kind, node.item, node.a, node.b = "x", p, left.node, ynode
            elif i == k:
                node.kind, node.item, node.a, node.b = "x", q, ynode, right.node
            else:
                node.kind, node.item, node.a, node.b = "y", s, up_of[i].node, low_of[i].node
            live.discard(d)
        live.update(uppers)
        live.update(lowers)
        live.add(left)
        live.add(right)

    def _finish(self, live):
        self.ranges = {}
        by_left, by_right = {}, {}
        for t in live:
            key = t.key()
            self.ranges[(NODE,) + key] = TrapRange(*key)
            by_left.setdefault(t.leftp[0], []).append(key)
            by_right.setdefault(t.rightp[0], []).append(key)
        adj = {(NODE,) + t.key(): [] for t in live}
        for x, lefts in by_right.items():
            for a in lefts:
                ra = TrapRange(*a)
                for b in by_left.get(x, ()):
                    rb = TrapRange(*b)
                    lo = max(ra.extent_at(x)[0], rb.extent_at(x)[0])
                    hi = min(ra.extent_at(x)[1], rb.extent_at(x)[1])
                    if lo < hi:
                        eid = (LINK, a, b)
                        self.ranges[eid] = WallRange(x, lo, hi)
                        adj[(NODE,) + a].append(((NODE,) + b, eid))
                        adj[(NODE,) + b].append(((NODE,) + a, eid))
        for v in adj.values():
            v.sort()
        self.adjacent = adj
        self.segment_xs = frozenset(x for s in self.items for (x, _) in s)

    # -- queries ---------------------------------------------------------

    def root(self):
        return min(e for e in self.ranges if e[0] == NODE)

    def check_query(self, q):
        x0, y0, x1, y1 = self.universe.bbox
        if not (x0 < q[0] < x1 and y0 < q[1] < y1):
            raise PointOutsideBounds("query %r outside the box" % (q,))
        if q[0] in self.segment_xs:
            raise OnBoundary("query %r lies on a wall" % (q,))

    def locate_path(self, q, start=None) -> list:
        self.check_query(q)
        target = (NODE,) + self._find_point(q).key()
        if start is None:
            return [target]
        if start[0] == LINK:
            start = min(n for n, _ in self.adjacent[(NODE,) + start[1]])
        # breadth-first walk over shared walls
        prev = {start: None}
        frontier = [start]
        while target not in prev:
            nxt = []
            for t in frontier:
                for u, _ in self.adjacent[t]:
                    if u not in prev:
                        prev[u] = t
                        nxt.append(u)
            frontier = nxt
        path = [target]
        while prev[path[-1]] is not None:
            path.append(prev[path[-1]])
        return path[::-1]

    def specificity(self, eid):
        return 1 if eid[0] == NODE else 0

    def conflicts(self, rng) -> list:
        """Trapezoids whose interior meets the open trapezoid ``rng``."""
        found = set()
        stack = [(self.dag, rng.left[0], rng.right[0])]
        while stack:
            node, lo, hi = stack.pop()
            if node.kind == "leaf":
                found.add(node.item)
            elif node.kind == "x":
                x = node.item[0]
                if lo < x:
                    stack.append((node.a, lo, min(hi, x)))
                if hi > x:
                    stack.append((node.b, max(lo, x), hi))
            else:
                seg = node.item
                a = max(lo, seg[0][0])
                b = min(hi, seg[1][0])
                if compare_at_ratio(rng.top, seg, a + b, 2) > 0:
                    stack.append((node.a, lo, hi))
                if compare_at_ratio(rng.bottom, seg, a + b, 2) < 0:
                    stack.append((node.b, lo, hi))
        out = []
        for t in found:
            eid = (NODE,) + t.key()
            if rng.intersects(self.ranges[eid]):
                out.append(eid)
        return sorted(out)

    def incidences(self) -> set:
        inc = set()
        for e in self.ranges:
            if e[0] == LINK:
                inc.add(((NODE,) + e[1], e))
                inc.add(((NODE,) + e[2], e))
        return inc

    def trapezoids(self) -> list:
        return sorted(e[1:] for e in self.ranges if e[0] == NODE)

    def insert_local(self, x):
        raise UnsupportedOperation("trapezoidal maps do not support skip-web updates")

    delete_local = insert_local


@dataclass(frozen=True)
class TrapConflictCount:
    a: int
    b: int
    c: int

    @property
    def total(self) -> int:
        return 1 + self.a + 2 * self.b + 3 * self.c


def trap_conflict_count(t: TrapRange, segments) -> TrapConflictCount:
    """Classify segments meeting the interior of ``t`` by endpoints inside it."""
    a = b = c = 0
    for s in segments:
        s = normalize_segment(s)
        lo = max(s[0][0], t.left[0])
        hi = min(s[1][0], t.right[0])
        if lo >= hi:
            continue
        m = lo + hi
        if not (compare_at_ratio(t.bottom, s, m, 2) < 0 < compare_at_ratio(t.top, s, m, 2)):
            continue
        inside = sum(1 for p in s if t.contains(p))
        if inside == 0:
            a += 1
        elif inside == 1:
            b += 1
        else:
            c += 1
    return TrapConflictCount(a, b, c)


def trap_build(universe: Universe, segments) -> TrapezoidalMap:
    return TrapezoidalMap.build(universe, segments)


def trap_locate(tmap: TrapezoidalMap, q, start=None):
    return tmap.locate(q, start)
