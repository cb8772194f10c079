"""Random workloads: item sets and query points for every universe."""

from __future__ import annotations

from .core import Kind, Universe
from .errors import OnBoundary

KEY_SPACE = 1 << 62


def random_keys(n: int, rng) -> list:
    keys = set()
    while len(keys) < n:
        keys.add(rng.randrange(KEY_SPACE))
    return sorted(keys)


def random_points(universe: Universe, n: int, rng) -> list:
    pts = set()
    side = universe.side
    while len(pts) < n:
        pts.add(tuple(o + rng.randrange(side) for o in universe.origin))
    return sorted(pts)


def deep_chain_points(universe: Universe, n: int) -> list:
    """Points forcing a compressed quadtree of depth n.

    Point i sits at coordinate 2**i in every axis, so each internal cell
    separates exactly one point from the rest.  Needs ``bits > n``.
    """
    if universe.bits <= n:
        raise ValueError("deep chain of %d points needs bits > %d" % (n, n))
    return [tuple(o + (1 << i) for o in universe.origin) for i in range(n)]


def random_strings(universe: Universe, n: int, rng, length: int = 32) -> list:
    out = set()
    alphabet = universe.alphabet
    while len(out) < n:
        out.add("".join(rng.choice(alphabet) for _ in range(length)))
    return sorted(out)


def random_segments(universe: Universe, n: int, rng) -> list:
    """Non-crossing segments in general position.

    Each segment lives in its own horizontal band (bands are shuffled and
    segments are long, so vertical walls interact heavily).  Coordinates
    are even; :func:`random_query` uses odd ones so queries never fall on
    walls.
    """
    x0, y0, x1, y1 = universe.bbox
    band = (y1 - y0) // (n + 1)
    if band < 8 or (x1 - x0) // 2 < 2 * n + 2:
        raise ValueError("bounding box too small for %d segments" % n)
    half = band // 2
    xs = rng.sample(range(x0 // 2 + 1, (x1 + 1) // 2), 2 * n)
    xs = [2 * x for x in xs]
    levels = list(range(n))
    rng.shuffle(levels)
    segs = []
    for i in range(n):
        a, b = sorted(xs[2 * i:2 * i + 2])
        centre = y0 + band * (levels[i] + 1)
        ya = centre + 2 * rng.randrange(-(half // 2) + 1, half // 2)
        yb = centre + 2 * rng.randrange(-(half // 2) + 1, half // 2)
        segs.append(((a, ya), (b, yb)))
    return sorted(segs)


def random_items(universe: Universe, n: int, rng, **options) -> list:
    if universe.kind is Kind.TOTAL_ORDER:
        return random_keys(n, rng)
    if universe.kind is Kind.POINTS:
        if options.get("adversarial"):
            return deep_chain_points(universe, n)
        return random_points(universe, n, rng)
    if universe.kind is Kind.STRINGS:
        return random_strings(universe, n, rng, options.get("length", 32))
    return random_segments(universe, n, rng)


def random_query(universe: Universe, rng, structure=None):
    """A random query point; for segments it avoids walls and segments."""
    if universe.kind is Kind.TOTAL_ORDER:
        return rng.randrange(KEY_SPACE)
    if universe.kind is Kind.POINTS:
        return tuple(o + rng.randrange(universe.side) for o in universe.origin)
    if universe.kind is Kind.STRINGS:
        length = rng.randrange(1, 40)
        return "".join(rng.choice(universe.alphabet) for _ in range(length))
    x0, y0, x1, y1 = universe.bbox
    while True:
        q = (2 * rng.randrange((x0 + 1) // 2, (x1 - 1) // 2) + 1, 2 * rng.randrange((y0 + 1) // 2, (y1 - 1) // 2) + 1)
        if not (x0 < q[0] < x1 and y0 < q[1] < y1):
            continue
        if structure is None:
            return q
        try:
            structure.locate(q)
        except OnBoundary:
            continue
        return q
