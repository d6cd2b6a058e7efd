"""Primitive degree-d majors.

A major is a finite set of pairwise unlinked vertex classes on the circle;
each class collapses to one point under multiplication by d and the
criticalities (class size minus one) add up to d - 1.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from math import ceil, gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from .angle import Angle, as_angle, cyclic_between, format_angle, parse_angle, tuple_map

__all__ = [
    "MajorError",
    "DegenerateInputError",
    "PrimitiveMajor",
    "StartSequence",
    "QuotientGraph",
    "validate",
    "from_starting_points",
    "normalize_starts",
    "normalize_steps",
    "normalize_bound",
    "starting_points",
    "derive",
    "quotient_graph",
    "met_eval",
    "distance",
    "cubic_from_bisector",
    "random_generic_major",
    "rotate",
    "complementary_regions",
]


class MajorError(ValueError):
    """Invalid or unsupported major / parameter."""


class DegenerateInputError(MajorError):
    pass


Class = Tuple[Angle, ...]


def _canon_classes(classes: Iterable[Iterable]) -> Tuple[Class, ...]:
    out = []
    for c in classes:
        pts = tuple(sorted({as_angle(a) for a in c}))
        out.append(pts)
    out.sort()
    return tuple(out)


@dataclass(frozen=True)
class PrimitiveMajor:
    degree: int
    classes: Tuple[Class, ...]

    def __post_init__(self):
        object.__setattr__(self, "classes", _canon_classes(self.classes))

    @property
    def is_generic(self) -> bool:
        return len(self.classes) == self.degree - 1 and all(len(c) == 2 for c in self.classes)

    @property
    def vertices(self) -> List[Angle]:
        return sorted(a for c in self.classes for a in c)

    def leaves(self) -> List[Tuple[Angle, Angle]]:
        """Boundary chords of every class (a k-gon gives k chords, a leaf gives one)."""
        out = []
        for c in self.classes:
            if len(c) == 2:
                out.append((c[0], c[1]))
            else:
                for i in range(len(c)):
                    a, b = c[i], c[(i + 1) % len(c)]
                    out.append((min(a, b), max(a, b)))
        return sorted(set(out))

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "classes": [[format_angle(a) for a in c] for c in self.classes],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "PrimitiveMajor":
        try:
            degree = int(data["degree"])
            classes = [[parse_angle(str(a)) for a in c] for c in data["classes"]]
        except (KeyError, TypeError) as exc:
            raise MajorError(f"malformed major JSON: {exc}") from None
        return cls(degree, classes)

    @classmethod
    def from_json(cls, text: str) -> "PrimitiveMajor":
        return cls.from_dict(json.loads(text))


def _unlinked(c1: Class, c2: Class) -> bool:
    """Convex hulls of two classes are disjoint (no shared vertex, no crossing)."""
    if set(c1) & set(c2):
        return False
    # all of c2 must sit in a single complementary arc of c1
    k = len(c1)
    for i in range(k):
        a, b = c1[i], c1[(i + 1) % k]
        inside = [cyclic_between(a, x, b) for x in c2] if k > 1 else []
        if all(inside):
            return True
    return False


def complementary_regions(m: PrimitiveMajor) -> List[List[Tuple[Angle, Angle]]]:
    """Arcs of the circle grouped by the component of disk minus m they bound.

    Arcs run counterclockwise between consecutive vertices; an arc ending at a
    vertex of a class continues, across the hull chord, from the previous
    (clockwise) vertex of the same class.
    """
    verts = m.vertices
    if not verts:
        return [[(Fraction(0), Fraction(1))]]
    owner: Dict[Angle, Class] = {a: c for c in m.classes for a in c}
    n = len(verts)
    start_of = {verts[i]: i for i in range(n)}  # arc i runs verts[i] -> verts[i+1]
    seen = [False] * n
    regions = []
    for i0 in range(n):
        if seen[i0]:
            continue
        region = []
        i = i0
        while not seen[i]:
            seen[i] = True
            a, b = verts[i], verts[(i + 1) % n]
            region.append((a, b))
            c = owner[b]
            nxt = c[c.index(b) - 1]
            i = start_of[nxt]
        regions.append(region)
    return regions


def _arc_len(a: Angle, b: Angle) -> Fraction:
    length = (b - a) % 1
    return length if length else Fraction(1)


def validate(m: PrimitiveMajor) -> List[str]:
    """Return a list of violated major invariants (empty when ``m`` is valid)."""
    d = m.degree
    problems: List[str] = []
    if d < 2:
        return [f"degree {d} < 2"]
    for c in m.classes:
        if len(c) < 2:
            problems.append(f"class {_fmt(c)} has fewer than 2 vertices")
            continue
        images = {tuple_map(a, d) for a in c}
        if len(images) != 1:
            problems.append(f"class {_fmt(c)} does not collapse under z -> z^{d}")
    for c1, c2 in combinations(m.classes, 2):
        if not _unlinked(c1, c2):
            problems.append(f"classes {_fmt(c1)} and {_fmt(c2)} are linked")
    crit = sum(len(c) - 1 for c in m.classes)
    if crit != d - 1:
        problems.append(f"total criticality {crit} != {d - 1}")
    if not problems:
        for region in complementary_regions(m):
            total = sum(_arc_len(a, b) for a, b in region)
            if total != Fraction(1, d):
                problems.append(f"region {_fmt(region[0])}... meets the circle in length {total}, not 1/{d}")
    return problems


def _fmt(obj) -> str:
    return "[" + ", ".join(format_angle(a) for a in obj) + "]"


def _require_valid(m: PrimitiveMajor) -> None:
    errs = validate(m)
    if errs:
        raise MajorError("invalid major: " + "; ".join(errs))


@dataclass(frozen=True)
class StartSequence:
    starts: Tuple[Angle, ...]

    def check(self, d: int) -> List[str]:
        s = self.starts
        out = []
        if len(s) != d - 1:
            out.append(f"expected {d - 1} starting points, got {len(s)}")
        if any(not 0 <= x < 1 for x in s):
            out.append("starting points must lie in [0, 1)")
        if any(s[i] >= s[i + 1] for i in range(len(s) - 1)):
            out.append("starting points must be strictly increasing")
        for i, x in enumerate(s, start=1):
            if x >= Fraction(i, d):
                out.append(f"s_{i} = {format_angle(x)} is not < {i}/{d}")
        return out

    def __iter__(self):
        return iter(self.starts)

    def __len__(self):
        return len(self.starts)


def from_starting_points(s: Sequence[Angle] | StartSequence, d: int) -> PrimitiveMajor:
    """The unique generic major of degree d whose leaves start at ``s``.

    Terminal points are solved from the last leaf backwards: t_i is the
    smallest value for which [s_i, t_i] minus the already-built open arcs
    (s_j, t_j), j > i, has length 1/d.
    """
    seq = s if isinstance(s, StartSequence) else StartSequence(tuple(as_angle(x) for x in s))
    if d < 2:
        raise MajorError(f"degree {d} < 2")
    errs = seq.check(d)
    if errs:
        raise MajorError("bad starting points: " + "; ".join(errs))
    starts = list(seq.starts)
    step = Fraction(1, d)
    terms: Dict[int, Fraction] = {}
    for i in range(d - 2, -1, -1):
        cur, remaining = starts[i], step
        # outermost arcs already built, in order; nested ones are skipped by cur
        for j in sorted(terms, key=lambda j: starts[j]):
            a, b = starts[j], terms[j]
            if b <= cur:
                continue
            if a - cur >= remaining:
                break
            remaining -= a - cur
            cur = b
        t = cur + remaining
        if t >= 1:
            raise MajorError(f"no terminal point in [0,1) for s_{i + 1}")
        terms[i] = t
    m = PrimitiveMajor(d, [(starts[i], terms[i]) for i in range(d - 1)])
    _require_valid(m)
    return m


def _apply_a(xs: List[Fraction], d: int) -> List[Fraction]:
    xs = sorted(xs)
    return [x - Fraction(1, d) if x >= Fraction(i, d) else x for i, x in enumerate(xs, start=1)]


def normalize_steps(xs: Sequence[Angle], d: int) -> Tuple[StartSequence, int]:
    """Iterate the sort-and-shift map to its fixed point; also return the step count."""
    cur = [as_angle(x) for x in xs]
    if len(cur) != d - 1:
        raise MajorError(f"expected {d - 1} points, got {len(cur)}")
    if len(set(cur)) != len(cur):
        raise DegenerateInputError("input points are not distinct")
    steps = 0
    while True:
        nxt = _apply_a(cur, d)
        if len(set(nxt)) != len(nxt):
            raise DegenerateInputError("two points collided while normalizing")
        if nxt == sorted(cur):
            return StartSequence(tuple(nxt)), steps
        cur = nxt
        steps += 1


def normalize_starts(xs: Sequence[Angle], d: int) -> StartSequence:
    return normalize_steps(xs, d)[0]


def normalize_bound(xs: Sequence[Angle], d: int) -> int:
    return sum(ceil(as_angle(x) * d) for x in xs)


def starting_points(m: PrimitiveMajor) -> StartSequence:
    if not m.is_generic:
        raise MajorError("starting points are defined only for generic majors")
    return StartSequence(tuple(sorted(c[0] for c in m.classes)))


def derive(m: PrimitiveMajor) -> PrimitiveMajor:
    """Collapse the arc under the last-starting leaf and rescale to a degree d-1 major."""
    d = m.degree
    if d < 3:
        raise MajorError("a quadratic major cannot be derived")
    if not m.is_generic:
        raise MajorError("derivation is defined only for generic majors")
    last = max(m.classes, key=lambda c: c[0])
    s, t = last
    if t - s != Fraction(1, d):
        raise MajorError("last leaf does not span an arc of length 1/d")
    scale = Fraction(d, d - 1)

    def squash(x: Fraction) -> Fraction:
        if x <= s:
            return x * scale
        if x >= t:
            return (x - Fraction(1, d)) * scale
        return s * scale

    out = PrimitiveMajor(d - 1, [tuple(squash(x) for x in c) for c in m.classes if c != last])
    _require_valid(out)
    return out


@dataclass(frozen=True)
class Edge:
    tail: int  # class index at the start of the arc
    head: int
    start: Angle
    length: Fraction


@dataclass(frozen=True)
class QuotientGraph:
    """Circle with every class of a major collapsed to a vertex.

    Vertices are class indices; edges are the arcs between consecutive
    vertices, listed in counterclockwise order (which is also the planar
    order of edge ends around the outer face).
    """

    major: PrimitiveMajor
    edges: Tuple[Edge, ...]

    @property
    def vertex_count(self) -> int:
        return max(1, len(self.major.classes))

    @property
    def betti(self) -> int:
        return len(self.edges) - self.vertex_count + 1

    @property
    def total_length(self) -> Fraction:
        return sum((e.length for e in self.edges), Fraction(0))

    @cached_property
    def vertex_distances(self) -> List[List[Fraction]]:
        n = self.vertex_count
        inf = None
        dist: List[List[Optional[Fraction]]] = [[inf] * n for _ in range(n)]
        for i in range(n):
            dist[i][i] = Fraction(0)
        for e in self.edges:
            for u, v in ((e.tail, e.head), (e.head, e.tail)):
                if dist[u][v] is None or e.length < dist[u][v]:
                    dist[u][v] = e.length
        for k in range(n):
            for i in range(n):
                if dist[i][k] is None:
                    continue
                for j in range(n):
                    if dist[k][j] is None:
                        continue
                    alt = dist[i][k] + dist[k][j]
                    if dist[i][j] is None or alt < dist[i][j]:
                        dist[i][j] = alt
        return dist  # type: ignore[return-value]

    def locate(self, x: Angle) -> Tuple[int, Fraction]:
        """Edge index containing x and the offset of x from the edge start."""
        starts = [e.start for e in self.edges]
        # edges are sorted by start; the last one wraps through 0
        from bisect import bisect_right

        i = (bisect_right(starts, x) - 1) % len(self.edges)
        return i, (x - self.edges[i].start) % 1


def quotient_graph(m: PrimitiveMajor) -> QuotientGraph:
    _require_valid(m)
    verts = m.vertices
    owner = {a: i for i, c in enumerate(m.classes) for a in c}
    n = len(verts)
    edges = []
    for i in range(n):
        a, b = verts[i], verts[(i + 1) % n]
        edges.append(Edge(owner[a], owner[b], a, _arc_len(a, b)))
    return QuotientGraph(m, tuple(edges))


def met_eval(m: PrimitiveMajor | QuotientGraph, x: Angle, y: Angle) -> Fraction:
    """Path distance between the images of x and y in the quotient graph."""
    g = m if isinstance(m, QuotientGraph) else quotient_graph(m)
    x, y = as_angle(x), as_angle(y)
    ix, sx = g.locate(x)
    iy, sy = g.locate(y)
    ex, ey = g.edges[ix], g.edges[iy]
    D = g.vertex_distances
    best = None
    if ix == iy:
        best = abs(sx - sy)
    for u, du in ((ex.tail, sx), (ex.head, ex.length - sx)):
        for v, dv in ((ey.tail, sy), (ey.head, ey.length - sy)):
            cand = du + D[u][v] + dv
            if best is None or cand < best:
                best = cand
    return best


def _met_grid(g: QuotientGraph, pts: Sequence[Fraction], scale: int, dtype) -> np.ndarray:
    """met on all pairs of ``pts`` as integers in units of 1/scale."""
    loc = [g.locate(p) for p in pts]
    edge_idx = np.array([i for i, _ in loc])
    off = np.array([int(s * scale) for _, s in loc], dtype=dtype)
    lengths = np.array([int(e.length * scale) for e in g.edges], dtype=dtype)
    tails = np.array([e.tail for e in g.edges])
    heads = np.array([e.head for e in g.edges])
    D = np.array([[int(v * scale) for v in row] for row in g.vertex_distances], dtype=dtype)
    ends = [(tails[edge_idx], off), (heads[edge_idx], lengths[edge_idx] - off)]
    best = None
    for u, du in ends:
        for v, dv in ends:
            cand = du[:, None] + D[np.ix_(u, v)] + dv[None, :]
            best = cand if best is None else np.minimum(best, cand)
    same = edge_idx[:, None] == edge_idx[None, :]
    direct = np.abs(off[:, None] - off[None, :])
    return np.where(same, np.minimum(best, direct), best)


def distance(m1: PrimitiveMajor, m2: PrimitiveMajor, resolution: int = 256) -> Tuple[Fraction, Fraction]:
    """Grid approximation of the sup-distance between the circle metrics of two majors.

    Returns ``(value, error_bound)`` with value <= md <= value + error_bound.
    met is 1-Lipschitz in each argument, so a grid of spacing 1/resolution
    misses the sup by at most 2/resolution.
    """
    if m1.degree != m2.degree:
        raise MajorError(f"incompatible majors: degrees {m1.degree} and {m2.degree}")
    if resolution < 1:
        raise MajorError("resolution must be positive")
    g1, g2 = quotient_graph(m1), quotient_graph(m2)
    pts = sorted(set(m1.vertices) | set(m2.vertices) | {Fraction(k, resolution) for k in range(resolution)})
    scale = resolution
    for p in pts:
        scale = scale * p.denominator // gcd(scale, p.denominator)
    # exact integer arithmetic; fall back to Python ints if the scale is huge
    dtype = np.int64 if scale < 2**60 else object
    diff = np.abs(_met_grid(g1, pts, scale, dtype) - _met_grid(g2, pts, scale, dtype))
    return Fraction(int(diff.max()), scale), Fraction(2, resolution)


def rotate(m: PrimitiveMajor, r: Angle) -> PrimitiveMajor:
    r = Fraction(r)
    return PrimitiveMajor(m.degree, [tuple((a + r) % 1 for a in c) for c in m.classes])


def cubic_from_bisector(a: Fraction, theta: Angle) -> PrimitiveMajor:
    """Cubic major from the angle-bisector chart.

    ``a`` is the length of the short arc centered at theta; the opposite short
    arc is centered at theta + 1/2 with length 1/3 - a.
    """
    a = Fraction(a)
    if not 0 < a < Fraction(1, 3):
        raise MajorError(f"bisector parameter a = {a} is outside (0, 1/3)")
    theta = as_angle(theta)
    third = Fraction(1, 3)
    x = theta + a / 2
    y = theta - a / 2
    m = PrimitiveMajor(3, [(x % 1, (x + third) % 1), ((y - third) % 1, y % 1)])
    _require_valid(m)
    return m


RANDOM_DENOMINATOR = 1_000_003  # prime, keeps endpoint coincidences negligible


def random_generic_major(d: int, seed: int = 0, denominator: int = RANDOM_DENOMINATOR) -> PrimitiveMajor:
    if d < 2:
        raise MajorError(f"degree {d} < 2")
    rng = random.Random(seed)
    while True:
        xs = [Fraction(rng.randrange(denominator), denominator) for _ in range(d - 1)]
        try:
            s = normalize_starts(xs, d)
            m = from_starting_points(s, d)
        except MajorError:
            continue
        if len(set(m.vertices)) == 2 * (d - 1):
            return m
