"""Range-determined link structures, conflict lists and random halving.

Every concrete structure (sorted list, compressed quadtree, compressed trie,
trapezoidal map) subclasses :class:`LinkStructure`.  A structure is a set of
elements (nodes and links), each carrying a range; element ids are tuples
whose first entry is ``"n"`` for nodes and ``"l"`` for links.
"""

from __future__ import annotations

import enum
import math
import random
import statistics
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Hashable, Iterable

from .errors import InvalidItem, UniverseMismatch

NODE = "n"
LINK = "l"


class Kind(enum.Enum):
    TOTAL_ORDER = "list"
    POINTS = "quadtree"
    STRINGS = "trie"
    SEGMENTS = "trapmap"


@dataclass(frozen=True)
class Universe:
    """The universe items and queries are drawn from.

    ``bits`` fixes the quadtree grid: the bounding hypercube is
    ``[origin, origin + 2**bits)`` in every coordinate and points have
    integer coordinates.  ``bbox`` is ``(xmin, ymin, xmax, ymax)`` for
    segment sets.
    """

    kind: Kind
    dim: int = 1
    bits: int = 32
    origin: tuple = ()
    alphabet: str = "ACGT"
    bbox: tuple = (0, 0, 1 << 20, 1 << 20)

    def __post_init__(self):
        if self.kind is Kind.POINTS:
            if self.dim < 2:
                raise ValueError("point universes need dim >= 2")
            if self.bits < 1:
                raise ValueError("bounding hypercube must have positive side")
            if not self.origin:
                object.__setattr__(self, "origin", (0,) * self.dim)
            if len(self.origin) != self.dim:
                raise ValueError("origin has wrong dimension")
        if self.kind is Kind.STRINGS:
            if not self.alphabet:
                raise ValueError("alphabet must be non-empty")
            if "$" in self.alphabet:
                raise ValueError("'$' is reserved as the terminator symbol")
            if len(set(self.alphabet)) != len(self.alphabet):
                raise ValueError("alphabet has repeated symbols")
        if self.kind is Kind.SEGMENTS:
            x0, y0, x1, y1 = self.bbox
            if not (x0 < x1 and y0 < y1):
                raise ValueError("bounding box must have positive area")

    @classmethod
    def total_order(cls) -> "Universe":
        return cls(Kind.TOTAL_ORDER)

    @classmethod
    def points(cls, dim: int = 2, bits: int = 32, origin: tuple = ()) -> "Universe":
        return cls(Kind.POINTS, dim=dim, bits=bits, origin=tuple(origin))

    @classmethod
    def strings(cls, alphabet: str = "ACGT") -> "Universe":
        return cls(Kind.STRINGS, alphabet=alphabet)

    @classmethod
    def segments(cls, bbox: tuple = (0, 0, 1 << 20, 1 << 20)) -> "Universe":
        return cls(Kind.SEGMENTS, bbox=tuple(bbox))

    @property
    def side(self) -> int:
        return 1 << self.bits


class LinkStructure:
    """Base class for range-determined link structures.

    Subclasses fill ``self.ranges`` (element id -> range) and ``self.items``
    and implement ``locate_path``, ``conflicts``, ``specificity`` and
    ``incidences``.  Structures are treated as immutable values; local
    updates return a new structure.
    """

    kind: Kind
    range_type: type = object
    # element kinds that take part in conflict lists and hyperlinks
    conflict_kinds: tuple = (NODE, LINK)

    def __init__(self, universe: Universe):
        self.universe = universe
        self.items: frozenset = frozenset()
        self.ranges: dict = {}

    def __len__(self):
        return len(self.ranges)

    def __eq__(self, other):
        if not isinstance(other, LinkStructure):
            return NotImplemented
        return (type(self) is type(other) and self.universe == other.universe
                and self.items == other.items and self.ranges == other.ranges)

    def __repr__(self):
        return "<%s items=%d elements=%d>" % (type(self).__name__, len(self.items), len(self.ranges))

    __hash__ = None

    def element_ids(self) -> list:
        return sorted(self.ranges)

    def nodes(self) -> list:
        return sorted(e for e in self.ranges if e[0] == NODE)

    def links(self) -> list:
        return sorted(e for e in self.ranges if e[0] == LINK)

    def conflict_elements(self) -> list:
        return sorted(e for e in self.ranges if e[0] in self.conflict_kinds)

    def range(self, eid):
        return self.ranges[eid]

    def contains(self, eid, q) -> bool:
        return self.ranges[eid].contains(q)

    def locate(self, q, start=None):
        return self.locate_path(q, start)[-1]

    def locate_path(self, q, start=None) -> list:
        raise NotImplementedError

    def conflicts(self, rng) -> list:
        """Sorted ids of elements whose range intersects ``rng``."""
        return conflict_list(rng, self)

    def specificity(self, eid):
        """Sort key: the element a locate prefers among those containing q."""
        raise NotImplementedError

    def best_containing(self, candidates: Iterable, q):
        found = [e for e in candidates if e in self.ranges and self.ranges[e].contains(q)]
        if not found:
            return None
        return max(found, key=self.specificity)

    def incidences(self) -> set:
        """Structural (node id, link id) incidences."""
        raise NotImplementedError

    def root(self):
        """A canonical entry element for searches."""
        raise NotImplementedError

    def insert_local(self, x):
        raise NotImplementedError

    def delete_local(self, x):
        raise NotImplementedError


@dataclass
class ConflictList:
    query_range: Any
    ids: list

    def __len__(self):
        return len(self.ids)

    def __iter__(self):
        return iter(self.ids)


def conflict_list(q_range, target: LinkStructure) -> list:
    """Brute-force scan for every element of ``target`` meeting ``q_range``.

    A range equal to ``q_range`` counts as a conflict.
    """
    if not isinstance(q_range, target.range_type):
        raise UniverseMismatch("%r does not belong to %s" % (type(q_range).__name__, type(target).__name__))
    kinds = target.conflict_kinds
    return sorted(e for e, r in target.ranges.items() if e[0] in kinds and q_range.intersects(r))


def incidence_consistent(structure: LinkStructure) -> bool:
    """Check that node/link incidence coincides with range intersection."""
    structural = structure.incidences()
    nodes = structure.nodes()
    links = structure.links()
    for v in nodes:
        rv = structure.ranges[v]
        for e in links:
            if rv.intersects(structure.ranges[e]) != ((v, e) in structural):
                return False
    return True


def halve(s: Iterable, rng) -> tuple:
    """Split ``s`` by one fresh random bit per item, in canonical order.

    Returns ``(zeros, ones)`` as frozensets.
    """
    zeros, ones = [], []
    for x in sorted(s):
        (ones if rng.getrandbits(1) else zeros).append(x)
    return frozenset(zeros), frozenset(ones)


def build_structure(universe: Universe, s: Iterable) -> LinkStructure:
    """Build D(S) for the structure matching ``universe.kind``."""
    if universe.kind is Kind.TOTAL_ORDER:
        from .list1d import ListStructure
        return ListStructure.build(universe, s)
    if universe.kind is Kind.POINTS:
        from .quadtree import CompressedTree
        return CompressedTree.build(universe, s)
    if universe.kind is Kind.STRINGS:
        from .trie import CompressedTrie
        return CompressedTrie.build(universe, s)
    if universe.kind is Kind.SEGMENTS:
        from .trapmap import TrapezoidalMap
        return TrapezoidalMap.build(universe, s)
    raise InvalidItem("unknown universe kind %r" % (universe.kind,))


def child_rng(seed: Hashable, *labels) -> random.Random:
    """An independent stream derived from a master seed and labels."""
    return random.Random(":".join(str(p) for p in (seed,) + labels))


@dataclass
class OracleStats:
    mean: float
    max: int
    stderr: float
    trials: int
    samples: int
    histogram: Counter = field(default_factory=Counter)
    mean_occupancy: float = math.nan

    def as_dict(self) -> dict:
        return {
            "mean": self.mean,
            "max": self.max,
            "stderr": self.stderr,
            "trials": self.trials,
            "samples": self.samples,
            "mean_occupancy": self.mean_occupancy,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
        }


def halving_oracle(universe: Universe, n: int, trials: int, rng, queries_per_sample: int = 1,
                   degenerate: bool = False, **gen_options) -> OracleStats:
    """Monte-Carlo estimate of |C(Q,S)| for the set-halving template.

    Each sample draws S, keeps each item with probability 1/2 to form T,
    and evaluates ``queries_per_sample`` random query points against the
    pair.  ``trials`` counts (S, T, q) triples.  The standard error is
    computed over per-sample means so correlated queries are not
    over-counted.  With ``degenerate=True`` halving is skipped (T = S).
    """
    from . import generators

    if n < 2 or trials < 1:
        raise ValueError("need n >= 2 and trials >= 1")
    per_sample = []
    counts = Counter()
    occupancy = []
    done = 0
    while done < trials:
        s = generators.random_items(universe, n, rng, **gen_options)
        t = s if degenerate else halve(s, rng)[0]
        ds = build_structure(universe, s)
        dt = build_structure(universe, t)
        vals = []
        for _ in range(min(queries_per_sample, trials - done)):
            q = generators.random_query(universe, rng, ds)
            qe = dt.locate(q)
            c = len(ds.conflicts(dt.range(qe)))
            vals.append(c)
            counts[c] += 1
            if universe.kind is Kind.TOTAL_ORDER:
                occupancy.append(dt.range(qe).occupancy(ds))
        done += len(vals)
        per_sample.append(sum(vals) / len(vals))
    total = sum(k * v for k, v in counts.items())
    mean = total / done
    if len(per_sample) > 1:
        stderr = statistics.stdev(per_sample) / math.sqrt(len(per_sample))
    else:
        stderr = math.nan
    return OracleStats(mean=mean, max=max(counts), stderr=stderr, trials=done,
                       samples=len(per_sample), histogram=counts,
                       mean_occupancy=statistics.fmean(occupancy) if occupancy else math.nan)
