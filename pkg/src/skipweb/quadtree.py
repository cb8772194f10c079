"""Compressed quadtrees (d = 2) and octrees (d >= 3).

Coordinates are integers on a ``2**bits`` grid, so every cell is an exact
dyadic sub-hypercube ``(depth, index)`` of the root.  A node's range is its
cell; a link from ``P`` down to ``C`` covers the chain of dyadic cells
between them (both included), the same way a trie edge covers the prefixes
spelled along it.  Leaves are the child quadrant of their parent that holds
the point; chains of single-child cells are contracted into one link.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import LINK, NODE, Kind, LinkStructure, Universe
from .errors import DuplicatePoint, InvalidItem, ItemNotFound, PointOutsideBounds


def cell_of(p: tuple, depth: int, bits: int) -> tuple:
    sh = bits - depth
    return (depth, tuple(c >> sh for c in p))


def cell_contains(a: tuple, c: tuple) -> bool:
    da, ia = a
    dc, ic = c
    if da > dc:
        return False
    sh = dc - da
    return all((y >> sh) == x for x, y in zip(ia, ic))


def cell_lca(a: tuple, c: tuple) -> tuple:
    da, ia = a
    dc, ic = c
    m = min(da, dc)
    xs = [x >> (da - m) for x in ia]
    ys = [y >> (dc - m) for y in ic]
    t = min(m - (x ^ y).bit_length() for x, y in zip(xs, ys))
    return (t, tuple(x >> (m - t) for x in xs))


def child_toward(a: tuple, c: tuple) -> tuple:
    """The child cell of ``a`` that contains the deeper cell ``c``."""
    da = a[0]
    sh = c[0] - da - 1
    return (da + 1, tuple(y >> sh for y in c[1]))


def min_cell(points, bits: int) -> tuple:
    """Smallest dyadic cell containing every point (at least two)."""
    first = points[0]
    diff = [0] * len(first)
    for p in points[1:]:
        for j, (x, y) in enumerate(zip(first, p)):
            diff[j] |= x ^ y
    depth = min(bits - dj.bit_length() for dj in diff)
    return cell_of(first, depth, bits)


@dataclass(frozen=True)
class CellChain:
    """The dyadic cells ``c`` with ``bottom <= c <= top``."""

    top: tuple
    bottom: tuple
    bits: int

    def intersects(self, other: "CellChain") -> bool:
        t = cell_lca(self.bottom, other.bottom)[0]
        return t >= self.top[0] and t >= other.top[0]

    def contains(self, q: tuple) -> bool:
        if self.top == self.bottom:
            head = self.top
        else:
            head = child_toward(self.top, self.bottom)
        return cell_contains(head, cell_of(q, self.bits, self.bits))


class CompressedTree(LinkStructure):
    kind = Kind.POINTS
    range_type = CellChain

    def __init__(self, universe: Universe):
        super().__init__(universe)
        self.bits = universe.bits
        self.root_cell = (0, (0,) * universe.dim)
        self.children: dict = {}  # node cell -> {quadrant cell: child cell}
        self.parent: dict = {}
        self.leaf_point: dict = {}  # leaf cell -> normalized point

    # -- coordinates -----------------------------------------------------

    def normalize(self, p) -> tuple:
        u = self.universe
        if len(p) != u.dim:
            raise InvalidItem("point %r has wrong dimension" % (p,))
        out = []
        for c, o in zip(p, u.origin):
            if isinstance(c, bool) or not isinstance(c, int):
                raise InvalidItem("coordinates must be integers on the dyadic grid, got %r" % (p,))
            c -= o
            if not 0 <= c < u.side:
                raise PointOutsideBounds("point %r outside the bounding hypercube" % (p,))
            out.append(c)
        return tuple(out)

    def denormalize(self, p: tuple) -> tuple:
        return tuple(c + o for c, o in zip(p, self.universe.origin))

    # -- construction ----------------------------------------------------

    @classmethod
    def build(cls, universe: Universe, points) -> "CompressedTree":
        tree = cls(universe)
        pts = [tree.normalize(p) for p in points]
        if len(set(pts)) != len(pts):
            raise DuplicatePoint("duplicate point")
        tree.items = frozenset(tree.denormalize(p) for p in pts)
        root = tree.root_cell
        tree.ranges[(NODE, root)] = CellChain(root, root, tree.bits)
        if len(pts) == 1:
            tree.leaf_point[root] = pts[0]
        elif pts:
            tree._grow(root, pts)
        return tree

    def _grow(self, top: tuple, pts: list):
        bits = self.bits
        stack = [(top, pts)]
        while stack:
            node, group = stack.pop()
            d = node[0] + 1
            sub: dict = {}
            for p in group:
                sub.setdefault(cell_of(p, d, bits), []).append(p)
            kids = self.children.setdefault(node, {})
            for quad, g in sub.items():
                if len(g) == 1:
                    child = quad
                    self.leaf_point[child] = g[0]
                else:
                    child = min_cell(g, bits)
                    stack.append((child, g))
                kids[quad] = child
                self.parent[child] = node
                self.ranges[(NODE, child)] = CellChain(child, child, bits)
                self.ranges[(LINK, node, child)] = CellChain(node, child, bits)

    # -- queries ---------------------------------------------------------

    def root(self):
        return (NODE, self.root_cell)

    def specificity(self, eid):
        if eid[0] == NODE:
            return 2 * eid[1][0]
        return 2 * eid[1][0] + 1

    def locate_path(self, q, start=None) -> list:
        """Walk from ``start`` to the deepest element containing ``q``."""
        qn = self.normalize(q)
        qcell = cell_of(qn, self.bits, self.bits)
        path = []
        if start is None:
            node = self.root_cell
        elif start[0] == LINK:
            path.append(start)
            _, p, c = start
            if self.ranges[start].contains(qn):
                if not cell_contains(c, qcell):
                    return path
                node = c
            else:
                node = self._climb(p, qcell, path)
        else:
            node = start[1]
            if not cell_contains(node, qcell):
                path.append(start)
                node = self._climb(self.parent[node], qcell, path)
        while True:
            path.append((NODE, node))
            kids = self.children.get(node)
            if not kids:
                return path
            child = kids.get(child_toward(node, qcell))
            if child is None:
                return path
            path.append((LINK, node, child))
            if not cell_contains(child, qcell):
                return path
            node = child

    def _climb(self, node, qcell, path) -> tuple:
        while not cell_contains(node, qcell):
            path.append((NODE, node))
            up = self.parent[node]
            path.append((LINK, up, node))
            node = up
        return node

    def conflicts(self, rng: CellChain) -> list:
        top, bot = rng.top, rng.bottom
        dt = top[0]
        out = []
        node = self.root_cell
        while True:
            kids = self.children.get(node, {})
            if node[0] >= dt:
                out.append((NODE, node))
                out.extend((LINK, node, c) for c in kids.values())
            if node[0] >= bot[0]:
                break
            child = kids.get(child_toward(node, bot))
            if child is None:
                break
            if node[0] < dt and cell_lca(child, bot)[0] >= dt:
                out.append((LINK, node, child))
            if not cell_contains(child, bot):
                break
            node = child
        return sorted(out)

    def incidences(self) -> set:
        inc = set()
        for e in self.ranges:
            if e[0] == LINK:
                inc.add(((NODE, e[1]), e))
                inc.add(((NODE, e[2]), e))
        return inc

    def depth(self) -> int:
        """Number of nodes on the longest root-to-leaf path."""
        best = 0
        stack = [(self.root_cell, 1)]
        while stack:
            node, k = stack.pop()
            best = max(best, k)
            for c in self.children.get(node, {}).values():
                stack.append((c, k + 1))
        return best

    def point_at(self, leaf_cell):
        p = self.leaf_point.get(leaf_cell)
        return None if p is None else self.denormalize(p)

    # -- local updates ---------------------------------------------------

    def _clone(self) -> "CompressedTree":
        new = CompressedTree(self.universe)
        new.items = self.items
        new.ranges = dict(self.ranges)
        new.children = dict(self.children)
        new.parent = dict(self.parent)
        new.leaf_point = dict(self.leaf_point)
        return new

    def _kids(self, node) -> dict:
        # copy-on-write for the child table of ``node``
        kids = dict(self.children.get(node, {}))
        self.children[node] = kids
        return kids

    def _add_node(self, cell, added):
        self.ranges[(NODE, cell)] = CellChain(cell, cell, self.bits)
        added.add((NODE, cell))

    def _add_link(self, up, down, added):
        self._kids(up)[child_toward(up, down)] = down
        self.parent[down] = up
        self.ranges[(LINK, up, down)] = CellChain(up, down, self.bits)
        added.add((LINK, up, down))

    def _drop(self, eid, removed):
        del self.ranges[eid]
        removed.add(eid)
        if eid[0] == LINK:
            _, up, down = eid
            kids = self._kids(up)
            quad = child_toward(up, down)
            if kids.get(quad) == down:
                del kids[quad]
            if not kids:
                del self.children[up]
            if self.parent.get(down) == up:
                del self.parent[down]
        else:
            self.leaf_point.pop(eid[1], None)
            self.children.pop(eid[1], None)

    def _delta(self, new, removed, added):
        touched = removed | added
        old_r, new_r = self.ranges, new.ranges
        replaced = [e for e in touched if e in old_r and old_r[e] != new_r.get(e)]
        created = [e for e in touched if e in new_r and new_r[e] != old_r.get(e)]
        return sorted(replaced), sorted(created)

    def insert_local(self, p):
        """Insert ``p``; returns ``(new, replaced_ids, created_ids)``."""
        pn = self.normalize(p)
        if self.denormalize(pn) in self.items:
            raise DuplicatePoint("duplicate point %r" % (p,))
        bits = self.bits
        pcell = cell_of(pn, bits, bits)
        ans = self.locate_path(p)[-1]
        new = self._clone()
        new.items = self.items | {self.denormalize(pn)}
        removed, added = set(), set()
        if ans[0] == NODE:
            node = ans[1]
            other = self.leaf_point.get(node)
            if other is None and node == self.root_cell and not self.children.get(node):
                new.leaf_point[node] = pn
            elif other is None:
                leaf = child_toward(node, pcell)
                new._add_node(leaf, added)
                new.leaf_point[leaf] = pn
                new._add_link(node, leaf, added)
            else:
                m = min_cell([other, pn], bits)
                if node == self.root_cell:
                    del new.leaf_point[node]
                    new._grow_pair(node, m, other, pn, added)
                else:
                    up = self.parent[node]
                    new._drop((LINK, up, node), removed)
                    new._drop((NODE, node), removed)
                    new._add_node(m, added)
                    new._add_link(up, m, added)
                    new._split_pair(m, other, pn, added)
        else:
            _, up, down = ans
            m = cell_lca(down, pcell)
            new._drop(ans, removed)
            new._add_node(m, added)
            new._add_link(up, m, added)
            new._add_link(m, down, added)
            leaf = child_toward(m, pcell)
            new._add_node(leaf, added)
            new.leaf_point[leaf] = pn
            new._add_link(m, leaf, added)
        replaced, created = self._delta(new, removed, added)
        return new, replaced, created

    def _split_pair(self, m, a, b, added):
        bits = self.bits
        for pt in (a, b):
            leaf = child_toward(m, cell_of(pt, bits, bits))
            self._add_node(leaf, added)
            self.leaf_point[leaf] = pt
            self._add_link(m, leaf, added)

    def _grow_pair(self, node, m, a, b, added):
        # ``node`` gains the two points a, b below it
        if m == node:
            self._split_pair(node, a, b, added)
        else:
            self._add_node(m, added)
            self._add_link(node, m, added)
            self._split_pair(m, a, b, added)

    def delete_local(self, p):
        pn = self.normalize(p)
        if self.denormalize(pn) not in self.items:
            raise ItemNotFound(p)
        bits = self.bits
        ans = self.locate_path(p)[-1]
        leaf = ans[1]
        assert ans[0] == NODE and self.leaf_point.get(leaf) == pn
        new = self._clone()
        new.items = self.items - {self.denormalize(pn)}
        removed, added = set(), set()
        if leaf == self.root_cell:
            del new.leaf_point[leaf]
            return new, [], []
        up = self.parent[leaf]
        new._drop((LINK, up, leaf), removed)
        new._drop((NODE, leaf), removed)
        kids = new.children.get(up, {})
        if len(kids) == 1 and up != self.root_cell:
            (only,) = kids.values()
            lone = new.leaf_point.get(only)
            grand = new.parent[up]
            new._drop((LINK, up, only), removed)
            new._drop((LINK, grand, up), removed)
            new._drop((NODE, up), removed)
            if lone is not None:
                new._drop((NODE, only), removed)
                moved = child_toward(grand, cell_of(lone, bits, bits))
                new._add_node(moved, added)
                new.leaf_point[moved] = lone
                new._add_link(grand, moved, added)
            else:
                new._add_link(grand, only, added)
        root = self.root_cell
        kids = new.children.get(root, {})
        if len(kids) == 1:
            (only,) = kids.values()
            lone = new.leaf_point.get(only)
            if lone is not None:
                # a single remaining point lives in the root itself
                new._drop((LINK, root, only), removed)
                new._drop((NODE, only), removed)
                new.leaf_point[root] = lone
        replaced, created = self._delta(new, removed, added)
        return new, replaced, created

    def same_shape(self, other: "CompressedTree") -> bool:
        return (self.ranges == other.ranges and self.leaf_point == other.leaf_point
                and self.children == other.children and self.items == other.items)


def qt_build(universe: Universe, points) -> CompressedTree:
    return CompressedTree.build(universe, points)


def qt_locate(tree: CompressedTree, q, start=None):
    return tree.locate(q, start)


def qt_insert_local(tree: CompressedTree, p):
    return tree.insert_local(p)
