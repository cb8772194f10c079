"""Skip-webs: a hierarchy of link structures over random halvings.

Level keys are binary strings.  The root key ``"0"`` holds every item and
key ``b + "0"`` / ``b + "1"`` holds the items of ``b`` whose next random
bit is 0 / 1, so a key of length ``i + 1`` lives on level ``i``.  Each item
carries a bit string of length ``height``; its keys are the prefixes
``"0" + bits[:i]``.

Every element of a non-root level keeps hyperlinks to exactly the elements
of its parent level whose ranges conflict with its own range.  Only keys
holding at least one item get a structure (the root key always has one).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .core import LinkStructure, Universe, build_structure
from .errors import DuplicateItem, ItemNotFound, UnresolvableHyperlink

ROOT_KEY = "0"


def level_of(key: str) -> int:
    return len(key) - 1


def parent_key(key: str) -> str:
    if key == ROOT_KEY:
        raise ValueError("the root key has no parent")
    return key[:-1]


def height_for(n: int) -> int:
    """Number of random bits per item for a set of size ``n``."""
    return math.ceil(math.log2(n)) if n > 1 else 0


def draw_bits(rng, length: int) -> str:
    return "".join("1" if rng.getrandbits(1) else "0" for _ in range(length))


def item_keys(bits: str) -> list:
    """Keys of the levels an item with ``bits`` belongs to, bottom-up."""
    return [ROOT_KEY + bits[:i] for i in range(len(bits) + 1)]


@dataclass
class LevelStep:
    """What a query did on one level."""

    key: str
    start: tuple
    path: list
    candidates: list = field(default_factory=list)

    @property
    def answer(self):
        return self.path[-1]


@dataclass
class QueryResult:
    answer: tuple
    steps: list

    @property
    def hyperlinks_followed(self) -> list:
        return [len(s.candidates) for s in self.steps[1:]]


@dataclass
class LevelChange:
    key: str
    replaced: list
    created: list
    relinked: list  # (child key, element id) whose hyperlinks were rewritten
    removed_key: bool = False
    new_key: bool = False


@dataclass
class UpdateReport:
    op: str
    item: object
    bits: str
    changes: list = field(default_factory=list)
    rebuilt: bool = False


class SkipWeb:
    def __init__(self, universe: Universe, height: int):
        self.universe = universe
        self.height = height
        self.levels: dict = {}
        self.paths: dict = {}
        self.hyperlinks: dict = {}  # (key, eid) -> tuple of parent element ids
        self.reverse: dict = {}  # (parent key, eid) -> {(child key, eid)}
        self.built_size = 0

    # -- construction ----------------------------------------------------

    @classmethod
    def build(cls, universe: Universe, s, rng=None, bits: dict | None = None, height: int | None = None) -> "SkipWeb":
        """Build the web over ``s``.

        Items missing from ``bits`` draw fresh bits from ``rng`` in sorted
        order; recorded strings are truncated or extended to ``height``.
        """
        items = sorted(s)
        if height is None:
            height = height_for(len(items))
        web = cls(universe, height)
        web.built_size = len(items)
        bits = bits or {}
        for x in items:
            b = bits.get(x, "")[:height]
            if len(b) < height:
                if rng is None:
                    raise ValueError("need a random source to draw bits for %r" % (x,))
                b += draw_bits(rng, height - len(b))
            web.paths[x] = b
        groups: dict = {}
        for x in items:
            for key in item_keys(web.paths[x]):
                groups.setdefault(key, []).append(x)
        groups.setdefault(ROOT_KEY, [])
        for key in sorted(groups, key=lambda k: (len(k), k)):
            web.levels[key] = _build(universe, groups[key], key)
        for key in web.levels:
            if key != ROOT_KEY:
                struct = web.levels[key]
                parent = web.levels[parent_key(key)]
                for e in struct.conflict_elements():
                    web._link(key, e, parent.conflicts(struct.range(e)))
        return web

    def copy(self) -> "SkipWeb":
        new = SkipWeb(self.universe, self.height)
        new.levels = dict(self.levels)
        new.paths = dict(self.paths)
        new.hyperlinks = dict(self.hyperlinks)
        new.reverse = {k: set(v) for k, v in self.reverse.items()}
        new.built_size = self.built_size
        return new

    def _link(self, key, eid, targets):
        targets = tuple(targets)
        self.hyperlinks[(key, eid)] = targets
        pk = key[:-1]
        for t in targets:
            self.reverse.setdefault((pk, t), set()).add((key, eid))

    def _unlink(self, key, eid):
        targets = self.hyperlinks.pop((key, eid), ())
        pk = key[:-1]
        for t in targets:
            back = self.reverse.get((pk, t))
            if back is not None:
                back.discard((key, eid))
                if not back:
                    del self.reverse[(pk, t)]

    # -- inspection ------------------------------------------------------

    def __len__(self):
        return len(self.paths)

    @property
    def items(self) -> frozenset:
        return self.levels[ROOT_KEY].items

    @property
    def level0(self) -> LinkStructure:
        return self.levels[ROOT_KEY]

    def keys(self) -> list:
        return sorted(self.levels, key=lambda k: (len(k), k))

    def top_keys(self) -> list:
        top = max(len(k) for k in self.levels)
        return sorted(k for k in self.levels if len(k) == top)

    def elements(self):
        """Every (key, element id) of the web, in canonical order."""
        for key in self.keys():
            for e in self.levels[key].element_ids():
                yield (key, e)

    def element_count(self) -> int:
        return sum(len(s) for s in self.levels.values())

    def entry(self):
        """Canonical start element: the root of the first top-level structure."""
        key = self.top_keys()[0]
        return (key, self.levels[key].root())

    def signature(self) -> tuple:
        """Everything that defines the web, for structural comparison."""
        return (self.universe, self.height, tuple(sorted(self.paths.items())),
                tuple((k, self.levels[k]) for k in self.keys()),
                tuple(sorted(self.hyperlinks.items())))

    def same_as(self, other: "SkipWeb") -> bool:
        if self.universe != other.universe or self.height != other.height or self.paths != other.paths:
            return False
        if set(self.levels) != set(other.levels):
            return False
        if any(self.levels[k] != other.levels[k] for k in self.levels):
            return False
        return self.hyperlinks == other.hyperlinks

    def check_hyperlinks(self) -> None:
        """Exhaustively compare every hyperlink set to a brute-force scan."""
        from .core import conflict_list

        expected = set()
        for key, struct in self.levels.items():
            if key == ROOT_KEY:
                continue
            parent = self.levels[parent_key(key)]
            for e in struct.conflict_elements():
                expected.add((key, e))
                want = conflict_list(struct.range(e), parent)
                if sorted(self.hyperlinks.get((key, e), ())) != want:
                    raise UnresolvableHyperlink("hyperlinks of %r at %r are wrong" % (e, key))
        if set(self.hyperlinks) != expected:
            raise UnresolvableHyperlink("stale hyperlinks present")
        for key, struct in self.levels.items():
            child_items = set()
            for c in (key + "0", key + "1"):
                if c in self.levels:
                    child_items |= self.levels[c].items
            if len(key) < self.height + 1 and child_items != set(struct.items):
                raise UnresolvableHyperlink("children of %r do not partition it" % (key,))

    # -- queries ---------------------------------------------------------

    def query(self, q, start=None) -> QueryResult:
        """Descend from ``start`` (default :meth:`entry`) to level 0."""
        key, eid = start or self.entry()
        struct = self.levels[key]
        path = struct.locate_path(q, eid)
        steps = [LevelStep(key, eid, path)]
        while key != ROOT_KEY:
            cands = self.hyperlinks.get((key, path[-1]))
            if cands is None:
                raise UnresolvableHyperlink("no hyperlinks for %r at %r" % (path[-1], key))
            key = parent_key(key)
            struct = self.levels[key]
            best = struct.best_containing(cands, q)
            if best is None:
                raise UnresolvableHyperlink("no hyperlink target of %r contains the query" % (path[-1],))
            path = struct.locate_path(q, best)
            steps.append(LevelStep(key, best, path, list(cands)))
        return QueryResult(path[-1], steps)

    # -- updates ---------------------------------------------------------

    def _apply(self, key, old, new, replaced, created) -> LevelChange:
        kinds = (new if new is not None else old).conflict_kinds
        rep = [e for e in replaced if e[0] in kinds]
        cre = [e for e in created if e[0] in kinds]
        change = LevelChange(key, list(replaced), list(created), [], removed_key=new is None, new_key=old is None)
        if new is None:
            del self.levels[key]
        else:
            self.levels[key] = new
        for e in rep:
            self._unlink(key, e)
        if key != ROOT_KEY and new is not None:
            parent = self.levels[parent_key(key)]
            for e in cre:
                self._link(key, e, parent.conflicts(new.range(e)))
        if new is None:
            return change
        for ck in (key + "0", key + "1"):
            child = self.levels.get(ck)
            if child is None:
                continue
            cands = set()
            for r in rep:
                cands.update(e for k, e in self.reverse.get((key, r), ()) if k == ck)
            for c in cre:
                cands.update(child.conflicts(new.range(c)))
            for e in sorted(cands):
                self._unlink(ck, e)
                self._link(ck, e, new.conflicts(child.range(e)))
                change.relinked.append((ck, e))
        return change

    def insert(self, x, rng) -> UpdateReport:
        """Insert ``x`` bottom-up along a fresh random path (in place)."""
        if x in self.paths:
            raise DuplicateItem("item %r already present" % (x,))
        bits = draw_bits(rng, self.height)
        report = UpdateReport("insert", x, bits)
        for key in item_keys(bits):
            old = self.levels.get(key)
            if old is None:
                new = _build(self.universe, [x], key)
                rep, cre = [], new.element_ids()
            else:
                new, rep, cre = old.insert_local(x)
            report.changes.append(self._apply(key, old, new, rep, cre))
        self.paths[x] = bits
        self._maybe_rebuild(report, rng)
        return report

    def delete(self, x) -> UpdateReport:
        if x not in self.paths:
            raise ItemNotFound(x)
        bits = self.paths[x]
        report = UpdateReport("delete", x, bits)
        for key in item_keys(bits):
            old = self.levels[key]
            if key != ROOT_KEY and old.items == {x}:
                new, rep, cre = None, old.element_ids(), []
            else:
                new, rep, cre = old.delete_local(x)
            report.changes.append(self._apply(key, old, new, rep, cre))
        del self.paths[x]
        self._maybe_rebuild(report, None)
        return report

    def needs_rebuild(self) -> bool:
        n, n0 = len(self.paths), self.built_size
        return n > 2 * n0 or 2 * n < n0

    def _maybe_rebuild(self, report, rng):
        if not self.needs_rebuild():
            return
        fresh = SkipWeb.build(self.universe, self.paths, rng, bits=self.paths, height=height_for(len(self.paths)))
        self.__dict__.update(fresh.__dict__)
        report.rebuilt = True


def _build(universe, items, key):
    if universe.kind.value == "trapmap":
        from .trapmap import TrapezoidalMap
        # subsets of a validated set need no re-validation
        return TrapezoidalMap.build(universe, items, validate=(key == ROOT_KEY))
    return build_structure(universe, items)


def sw_build(universe: Universe, s, rng=None, bits=None, height=None) -> SkipWeb:
    return SkipWeb.build(universe, s, rng, bits=bits, height=height)


def sw_query_sequential(web: SkipWeb, q, start=None) -> QueryResult:
    return web.query(q, start)


def sw_insert(web: SkipWeb, x, rng):
    report = web.insert(x, rng)
    return web, report


def sw_delete(web: SkipWeb, x):
    report = web.delete(x)
    return web, report


def rebuild_equivalent(web: SkipWeb) -> bool:
    """Whether ``web`` equals a fresh build from its recorded bit strings."""
    fresh = SkipWeb.build(web.universe, web.paths, bits=web.paths, height=web.height)
    return web.same_as(fresh)
