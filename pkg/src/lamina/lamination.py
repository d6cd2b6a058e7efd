"""Finite laminations, torus good regions and backward lifting of majors."""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

from .angle import Angle, as_angle, format_angle, parse_angle
from .major import MajorError, PrimitiveMajor, validate

Leaf = Tuple[Angle, Angle]

DEFAULT_DEPTH_CAP = 12


class LaminationError(ValueError):
    pass


class ResourceError(LaminationError):
    """A configured depth cap was exceeded."""


def depth_cap() -> int:
    raw = os.environ.get("LAMINA_DEPTH_CAP")
    if raw is None:
        return DEFAULT_DEPTH_CAP
    try:
        return int(raw)
    except ValueError:
        raise LaminationError(f"LAMINA_DEPTH_CAP must be an integer, got {raw!r}") from None


def make_leaf(x, y) -> Leaf:
    a, b = as_angle(x), as_angle(y)
    if a == b:
        raise LaminationError(f"degenerate leaf at {format_angle(a)}")
    return (a, b) if a < b else (b, a)


def leaves_cross(l1: Leaf, l2: Leaf) -> bool:
    """Endpoints strictly interleave around the circle; shared endpoints do not cross."""
    a1, b1 = l1
    a2, b2 = l2
    if a1 in l2 or b1 in l2:
        return False
    return (a1 < a2 < b1) != (a1 < b2 < b1)


def pairwise_compatible(leaves: Iterable[Leaf]) -> bool:
    return not crossing_pairs(leaves, first_only=True)


def crossing_pairs(leaves: Iterable[Leaf], first_only: bool = False) -> List[Tuple[Leaf, Leaf]]:
    items = sorted(set(leaves))
    out = []
    for i, l1 in enumerate(items):
        a1, b1 = l1
        for l2 in items[i + 1:]:
            if l2[0] >= b1:
                break  # sorted by start: later leaves start outside (a1, b1)
            if leaves_cross(l1, l2):
                out.append((l1, l2))
                if first_only:
                    return out
    return out


@dataclass(frozen=True)
class FiniteLamination:
    degree: int
    leaves: FrozenSet[Leaf]
    # depth at which each leaf first appeared (backward lifting only)
    generation: Dict[Leaf, int] = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "leaves", frozenset(make_leaf(*l) for l in self.leaves))

    def __len__(self) -> int:
        return len(self.leaves)

    def sorted_leaves(self) -> List[Leaf]:
        return sorted(self.leaves)

    def to_dict(self) -> dict:
        return {
            "degree": self.degree,
            "leaves": [[format_angle(a), format_angle(b)] for a, b in self.sorted_leaves()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "FiniteLamination":
        try:
            leaves = [make_leaf(parse_angle(str(a)), parse_angle(str(b))) for a, b in data["leaves"]]
            return cls(int(data["degree"]), frozenset(leaves))
        except (KeyError, TypeError, ValueError) as exc:
            raise LaminationError(f"malformed lamination JSON: {exc}") from None

    @classmethod
    def from_major(cls, m: PrimitiveMajor) -> "FiniteLamination":
        return cls(m.degree, frozenset(m.leaves()), {l: 0 for l in m.leaves()})


# -- torus rectangles -------------------------------------------------------

Interval = Tuple[Angle, Fraction]  # (start, length) counterclockwise; may wrap past 0


@dataclass(frozen=True)
class RectangleSet:
    """Finite union of closed torus rectangles ``I x J`` with circle intervals I, J."""

    rectangles: Tuple[Tuple[Interval, Interval], ...]

    @property
    def area(self) -> Fraction:
        return sum((x[1] * y[1] for x, y in self.rectangles), Fraction(0))

    def __len__(self) -> int:
        return len(self.rectangles)

    def is_symmetric(self) -> bool:
        rects = set(self.rectangles)
        return all((y, x) in rects for x, y in rects)

    def pieces(self) -> List[Tuple[Fraction, Fraction, Fraction, Fraction]]:
        """Split wrapped rectangles into pieces inside the unit square, as (x0, x1, y0, y1)."""
        out = []
        for x, y in self.rectangles:
            for x0, x1 in _unwrap(x):
                for y0, y1 in _unwrap(y):
                    out.append((x0, x1, y0, y1))
        return out

    def interiors_disjoint(self) -> bool:
        ps = self.pieces()
        for i, (a0, a1, b0, b1) in enumerate(ps):
            for c0, c1, e0, e1 in ps[i + 1:]:
                if a0 < c1 and c0 < a1 and b0 < e1 and e0 < b1:
                    return False
        return True

    def contains(self, x: Angle, y: Angle) -> bool:
        return any(_in_closed(x, ix) and _in_closed(y, iy) for ix, iy in self.rectangles)

    def to_dict(self) -> dict:
        return {
            "rectangles": [
                {"x": [format_angle(x[0]), format_angle((x[0] + x[1]) % 1)],
                 "y": [format_angle(y[0]), format_angle((y[0] + y[1]) % 1)],
                 "width": str(x[1]), "height": str(y[1])}
                for x, y in self.rectangles
            ]
        }


def _unwrap(iv: Interval) -> List[Tuple[Fraction, Fraction]]:
    s, length = iv
    e = s + length
    if e <= 1:
        return [(s, e)]
    return [(s, Fraction(1)), (Fraction(0), e - 1)]


def _in_closed(x: Angle, iv: Interval) -> bool:
    return (x - iv[0]) % 1 <= iv[1]


def complementary_arcs(leaves: Iterable[Leaf]) -> List[List[Interval]]:
    """Elementary arcs between consecutive endpoints, grouped by complementary region.

    Two arcs bound the same region of the disk minus the leaves exactly when
    they lie on the same side of every leaf.
    """
    leaves = sorted(set(leaves))
    if not leaves:
        return [[(Fraction(0), Fraction(1))]]
    pts = sorted({p for l in leaves for p in l})
    n = len(pts)
    groups: Dict[Tuple[bool, ...], List[Interval]] = {}
    for i in range(n):
        a, b = pts[i], pts[(i + 1) % n]
        length = (b - a) % 1 or Fraction(1)
        mid = (a + length / 2) % 1
        sig = tuple(lo < mid < hi for lo, hi in leaves)
        groups.setdefault(sig, []).append((a, length))
    return list(groups.values())


def good_region(lam: FiniteLamination | PrimitiveMajor | Iterable[Leaf]) -> RectangleSet:
    """Exact rectangle decomposition of the torus region compatible with every leaf."""
    if isinstance(lam, PrimitiveMajor):
        leaves = lam.leaves()
    elif isinstance(lam, FiniteLamination):
        leaves = list(lam.leaves)
    else:
        leaves = [make_leaf(*l) for l in lam]
    bad = crossing_pairs(leaves, first_only=True)
    if bad:
        raise LaminationError(f"leaves cross: {bad[0]}")
    rects = []
    for group in complementary_arcs(leaves):
        for x in group:
            for y in group:
                rects.append((x, y))
    rects.sort()
    return RectangleSet(tuple(rects))


# -- backward lifting -------------------------------------------------------
#
# Points are carried as (v, c) meaning v - c*eps for an infinitesimal eps > 0.
# With c = 0 everywhere this is plain exact lifting; the eps-limit variant
# starts from the major shifted clockwise by eps.

SymPoint = Tuple[Fraction, Fraction]


def _key(p: SymPoint) -> Tuple[Fraction, Fraction]:
    v, c = p
    if v == 0 and c > 0:
        return (Fraction(1), -c)  # just below 1
    return (v, -c)


def _sym_leaf(p: SymPoint, q: SymPoint) -> Tuple[SymPoint, SymPoint]:
    return (p, q) if _key(p) < _key(q) else (q, p)


def _sym_cross(l1, l2) -> bool:
    a1, b1 = (_key(p) for p in l1)
    a2, b2 = (_key(p) for p in l2)
    if a1 in (a2, b2) or b1 in (a2, b2):
        return False
    return (a1 < a2 < b1) != (a1 < b2 < b1)


def _preimages(p: SymPoint, d: int) -> List[SymPoint]:
    v, c = p
    return [((v + k) / d, c / d) for k in range(d)]


VARIANTS = ("literal", "eps-limit")


def backward_lift(
    m: PrimitiveMajor, depth: int, variant: str = "literal", cap: Optional[int] = None
) -> FiniteLamination:
    """The lamination obtained from ``m`` after ``depth`` rounds of pulling back.

    Each round adds every preimage under z -> z^d of the previous round's new
    leaves that does not cross a leaf of ``m``.
    """
    if variant not in VARIANTS:
        raise LaminationError(f"unknown variant {variant!r}; expected one of {VARIANTS}")
    errs = validate(m)
    if errs:
        raise MajorError("invalid major: " + "; ".join(errs))
    cap = depth_cap() if cap is None else cap
    if depth < 0:
        raise LaminationError("depth must be non-negative")
    if depth > cap:
        raise ResourceError(f"depth {depth} exceeds cap {cap} (set LAMINA_DEPTH_CAP to raise it)")
    d = m.degree
    shift = Fraction(1) if variant == "eps-limit" else Fraction(0)
    major = [_sym_leaf((a, shift), (b, shift)) for a, b in m.leaves()]
    seen = set(major)
    gen = {l: 0 for l in major}
    frontier = list(major)
    for level in range(1, depth + 1):
        new = []
        for p, q in frontier:
            for p2 in _preimages(p, d):
                for q2 in _preimages(q, d):
                    leaf = _sym_leaf(p2, q2)
                    if leaf in seen:
                        continue
                    if any(_sym_cross(leaf, ml) for ml in major):
                        continue
                    seen.add(leaf)
                    gen[leaf] = level
                    new.append(leaf)
        frontier = new
    generation: Dict[Leaf, int] = {}
    for (p, q), g in gen.items():
        if p[0] == q[0]:
            continue  # collapses as eps -> 0
        leaf = make_leaf(p[0], q[0])
        generation[leaf] = min(g, generation.get(leaf, g))
    return FiniteLamination(d, frozenset(generation), generation)


def check_forward_invariant(lam: FiniteLamination, d: Optional[int] = None) -> List[Leaf]:
    """Leaves whose image under z -> z^d is neither a point nor a leaf of ``lam``."""
    d = lam.degree if d is None else d
    missing = []
    for a, b in lam.sorted_leaves():
        da, db = (d * a) % 1, (d * b) % 1
        if da == db:
            continue
        if make_leaf(da, db) not in lam.leaves:
            missing.append((a, b))
    return missing


def clean(lam: FiniteLamination) -> FiniteLamination:
    """Replace chains of leaves sharing endpoints by the boundaries of their convex hulls."""
    parent: Dict[Angle, Angle] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for a, b in lam.leaves:
        ra, rb = find(a), find(b)
        if ra != rb:
            parent[ra] = rb
    classes: Dict[Angle, List[Angle]] = {}
    for x in list(parent):
        classes.setdefault(find(x), []).append(x)
    hulls = [sorted(c) for c in classes.values()]
    out = set()
    for pts in hulls:
        if len(pts) == 2:
            out.add((pts[0], pts[1]))
            continue
        for i in range(len(pts)):
            out.add(make_leaf(pts[i], pts[(i + 1) % len(pts)]))
    bad = crossing_pairs(out, first_only=True)
    if bad:
        raise LaminationError(f"internal inconsistency: cleaned classes are linked at {bad[0]}")
    return FiniteLamination(lam.degree, frozenset(out))
