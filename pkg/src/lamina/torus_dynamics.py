"""Non-escaping sets on the torus, pre-major leaves and separating leaves.

A point (x, y) of the torus stays in the closed good region of the major
{theta/2, (theta+1)/2} for n steps exactly when x and y share the first n+1
symbols of their itinerary with respect to the two closed halves.  So the
n-th refinement is a union of squares C_w x C_w over itinerary words w, and
each C_w is a finite union of intervals computed exactly in integer units.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from .angle import Angle, AngleError, as_angle, cyclic_between
from .entropy import post_major
from .lamination import (
    FiniteLamination,
    Leaf,
    RectangleSet,
    ResourceError,
    backward_lift,
    depth_cap,
    make_leaf,
)
from .major import PrimitiveMajor

__all__ = [
    "post_major",
    "major_of",
    "OmegaLevel",
    "omega_level",
    "itinerary_cells",
    "cell_counts",
    "growth_rate_estimate",
    "SeparatingSet",
    "separates_or_intersects",
    "separating_leaves",
    "check_forward_invariance_S",
]


def major_of(theta: Angle) -> PrimitiveMajor:
    theta = as_angle(theta)
    if theta == 0:
        raise AngleError("angle 0 is excluded")
    return PrimitiveMajor(2, [[theta / 2, (theta + 1) / 2]])


# -- itinerary cells --------------------------------------------------------

IntInterval = Tuple[int, int]  # closed [a, b] in units of 1/N, 0 <= a < b <= N


def _scale(theta: Angle, n: int) -> int:
    # both division points p/2q and (p+q)/2q lie on the grid
    return 2 * theta.denominator * 2 ** n


def _intersect_arc(u: int, length: int, s0: int, half: int, N: int) -> List[IntInterval]:
    """Pieces of the unrolled segment [u, u+length] lying over the closed arc [s0, s0+half] mod N."""
    out = []
    t = (u - s0 - half) // N
    while True:
        lo = s0 + t * N
        if lo > u + length:
            break
        a, b = max(lo, u), min(lo + half, u + length)
        if a < b:  # isolated points are dropped
            out.append((a, b))
        t += 1
    return out


def _merge(intervals: List[IntInterval]) -> List[IntInterval]:
    intervals.sort()
    out: List[IntInterval] = []
    for a, b in intervals:
        if out and a <= out[-1][1]:
            out[-1] = (out[-1][0], max(out[-1][1], b))
        else:
            out.append((a, b))
    return out


def itinerary_cells(theta: Angle, n: int) -> Tuple[int, Dict[str, List[IntInterval]]]:
    """Map each itinerary word of length n+1 to its set C_w as merged integer intervals.

    Returns (N, cells) where the intervals are in units of 1/N.  Intervals are
    not merged across 0, so a set wrapping past 0 appears as two pieces.
    """
    theta = as_angle(theta)
    if theta == 0:
        raise AngleError("angle 0 is excluded")
    if n < 0:
        raise ValueError("level must be non-negative")
    N = _scale(theta, n)
    half = N // 2
    lo = int(theta / 2 * N)
    # closed halves: S0 contains 0, S1 is the other one
    s1 = (lo, lo + half)
    s0 = (lo + half, lo + N)
    starts = {"0": s0[0], "1": s1[0]}

    cells = {w: _merge(_unwrap_int(s, half, N)) for w, s in starts.items()}
    for k in range(1, n + 1):
        mult = 2 ** k
        nxt: Dict[str, List[IntInterval]] = {}
        for w, ivs in cells.items():
            for sym, s_start in starts.items():
                pieces = []
                for a, b in ivs:
                    u = (mult * a) % N
                    for ya, yb in _intersect_arc(u, mult * (b - a), s_start, half, N):
                        pieces.append((a + (ya - u) // mult, a + (yb - u) // mult))
                if pieces:
                    nxt[w + sym] = _merge(pieces)
        cells = nxt
    return N, cells


def _unwrap_int(start: int, length: int, N: int) -> List[IntInterval]:
    start %= N
    if start + length <= N:
        return [(start, start + length)]
    return [(start, N), (0, start + length - N)]


def _circle_components(ivs: List[IntInterval], N: int) -> List[Tuple[int, int]]:
    """Components as (start, length) on the circle, joining pieces that meet at 0."""
    comps = [(a, b - a) for a, b in ivs]
    if len(comps) > 1 and ivs[0][0] == 0 and ivs[-1][1] == N:
        first = comps.pop(0)
        last = comps.pop()
        comps.append((last[0], last[1] + first[1]))
        comps.sort()
    return comps


@dataclass(frozen=True)
class OmegaLevel:
    theta: Angle
    level: int
    cells: RectangleSet

    def __len__(self) -> int:
        return len(self.cells)


def omega_level(theta: Angle, n: int, cap: int | None = None) -> OmegaLevel:
    """Closed rectangle set of points whose first n images stay in the good region of the major."""
    cap = depth_cap() if cap is None else cap
    if n > cap:
        raise ResourceError(f"level {n} exceeds cap {cap} (set LAMINA_DEPTH_CAP to raise it)")
    theta = as_angle(theta)
    N, cells = itinerary_cells(theta, n)
    rects = []
    for ivs in cells.values():
        comps = [(Fraction(s, N), Fraction(l, N)) for s, l in _circle_components(ivs, N)]
        for x in comps:
            for y in comps:
                rects.append((x, y))
    rects.sort()
    return OmegaLevel(theta, n, RectangleSet(tuple(rects)))


def _separating_cell(x: Tuple[int, int], y: Tuple[int, int], post: Sequence[int], N: int) -> bool:
    (xa, xl), (ya, yl) = x, y
    for p in post:
        if (p - xa) % N <= xl or (p - ya) % N <= yl:
            return True
    # work in half units so the midpoints stay integral
    mx = (2 * xa + xl) % (2 * N)
    my = (2 * ya + yl) % (2 * N)
    span = (my - mx) % (2 * N)
    inside = [0 < (2 * p - mx) % (2 * N) < span for p in post]
    return any(inside) and not all(inside)


def cell_counts(theta: Angle, n: int) -> Dict[str, int]:
    """Rectangle counts of the n-th refinement.

    ``total`` counts every square C_w x C_w piece; ``off_diagonal`` drops the
    pieces I x I; ``separating`` keeps the off-diagonal pieces whose leaves
    separate or meet the post-major set.
    """
    theta = as_angle(theta)
    N, cells = itinerary_cells(theta, n)
    post = [int(p * N) for p in post_major(theta)]
    total = off = sep = 0
    for ivs in cells.values():
        comps = _circle_components(ivs, N)
        c = len(comps)
        total += c * c
        off += c * (c - 1)
        for i in range(c):
            for j in range(c):
                if i != j and _separating_cell(comps[i], comps[j], post, N):
                    sep += 1
    return {"total": total, "off_diagonal": off, "separating": sep}


def growth_rate_estimate(theta: Angle, n_max: int, n_min: int = 2, count: str = "separating") -> float:
    """Least-squares slope of log(cell count) against n for n in [n_min, n_max].

    With the default ``separating`` count this estimates the core entropy.
    """
    if n_max < 4:
        raise ValueError("n_max must be at least 4")
    ns = np.arange(n_min, n_max + 1)
    counts = np.array([max(cell_counts(theta, int(n))[count], 1) for n in ns], dtype=float)
    slope, _ = np.polyfit(ns, np.log(counts), 1)
    return float(slope)


# -- separating leaves ------------------------------------------------------


def separates_or_intersects(leaf: Leaf, points: Iterable[Angle]) -> bool:
    """Whether a leaf has an endpoint in ``points`` or has points on both sides."""
    a, b = leaf
    pts = list(points)
    if a in pts or b in pts:
        return True
    inside = [cyclic_between(a, p, b) for p in pts]
    return any(inside) and not all(inside)


@dataclass(frozen=True)
class SeparatingSet:
    theta: Angle
    depth: int
    post_major: Tuple[Angle, ...]
    leaves: frozenset
    lamination: FiniteLamination

    def __len__(self) -> int:
        return len(self.leaves)


def separating_leaves(theta: Angle, depth: int, variant: str = "literal") -> SeparatingSet:
    theta = as_angle(theta)
    post = tuple(post_major(theta))
    lam = backward_lift(major_of(theta), depth, variant=variant)
    keep = frozenset(l for l in lam.leaves if separates_or_intersects(l, post))
    return SeparatingSet(theta, depth, post, keep, lam)


def check_forward_invariance_S(theta: Angle, depth: int, variant: str = "literal") -> List[Tuple[Leaf, Leaf]]:
    """Leaves of S_theta whose doubled image is a leaf outside S_theta and not inside the post-major set.

    Returns (leaf, image) pairs; empty means the finite check passed.
    """
    if depth < 1:
        raise ValueError("depth must be at least 1")
    sep = separating_leaves(theta, depth, variant)
    shallower = separating_leaves(theta, depth - 1, variant).leaves
    post = set(sep.post_major)
    bad = []
    for a, b in sorted(sep.leaves):
        da, db = (2 * a) % 1, (2 * b) % 1
        if da == db:
            continue
        img = make_leaf(da, db)
        if img in shallower or (da in post and db in post):
            continue
        bad.append(((a, b), img))
    return bad
