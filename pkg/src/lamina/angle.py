"""Exact rational points of the circle R/Z and the d-tupling map.

Angles are plain :class:`fractions.Fraction` values normalized into [0, 1);
Python integers are unbounded, so repeated rescaling never overflows.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, List, Tuple, Union

Angle = Fraction

__all__ = [
    "Angle",
    "AngleError",
    "OrbitInfo",
    "make_angle",
    "parse_angle",
    "format_angle",
    "tuple_map",
    "orbit",
    "preferred_half_preimage",
    "cyclic_between",
    "arc_distance",
    "reduced_fractions",
]


class AngleError(ValueError):
    """Raised for malformed angles or angles outside an operation's domain."""


def make_angle(p: int, q: int = 1) -> Angle:
    if q == 0:
        raise AngleError("invalid denominator: 0")
    return Fraction(p, q) % 1


def as_angle(x: Union[Angle, int, str]) -> Angle:
    if isinstance(x, str):
        return parse_angle(x)
    return Fraction(x) % 1


def parse_angle(text: str) -> Angle:
    """Parse ``"p/q"`` (or a bare integer) into a reduced angle."""
    s = text.strip()
    try:
        if "/" in s:
            num, den = s.split("/", 1)
            return make_angle(int(num), int(den))
        return make_angle(int(s), 1)
    except ValueError as exc:
        if isinstance(exc, AngleError):
            raise
        raise AngleError(f"malformed angle {text!r}; expected p/q") from None


def format_angle(x: Angle) -> str:
    return f"{x.numerator}/{x.denominator}"


def tuple_map(x: Angle, d: int) -> Angle:
    return (d * x) % 1


@dataclass(frozen=True)
class OrbitInfo:
    preperiod: int
    period: int
    points: Tuple[Angle, ...]

    @property
    def is_periodic(self) -> bool:
        return self.preperiod == 0

    @property
    def cycle(self) -> Tuple[Angle, ...]:
        return self.points[self.preperiod:]


def orbit(x: Angle, d: int = 2) -> OrbitInfo:
    """Forward orbit of ``x`` under multiplication by ``d`` until the first repeat."""
    seen = {}
    points: List[Angle] = []
    cur = Fraction(x) % 1
    while cur not in seen:
        seen[cur] = len(points)
        points.append(cur)
        cur = tuple_map(cur, d)
    pre = seen[cur]
    return OrbitInfo(preperiod=pre, period=len(points) - pre, points=tuple(points))


def is_periodic(x: Angle, d: int = 2) -> bool:
    # for d = 2 this is "odd denominator", but the orbit test covers every d
    return orbit(x, d).preperiod == 0


def preferred_half_preimage(theta: Angle) -> Angle:
    """The preimage of ``theta`` under doubling used to start the post-major orbit.

    Of the two candidates theta/2 and (theta+1)/2 the periodic one is chosen if
    there is one, otherwise theta/2.
    """
    theta = Fraction(theta) % 1
    if theta == 0:
        raise AngleError("angle 0 is excluded")
    half = theta / 2
    other = (theta + 1) / 2
    # a rational is periodic under doubling iff its reduced denominator is odd
    if half.denominator % 2 == 1:
        return half
    if other.denominator % 2 == 1:
        return other
    return half


def cyclic_between(a: Angle, x: Angle, b: Angle) -> bool:
    """True iff ``x`` lies in the open counterclockwise arc from ``a`` to ``b``."""
    if a == b:
        return x != a
    return 0 < (x - a) % 1 < (b - a) % 1


def arc_distance(x: Angle, y: Angle) -> Fraction:
    t = (Fraction(x) - Fraction(y)) % 1
    return min(t, 1 - t)


def reduced_fractions(max_denominator: int) -> Iterable[Angle]:
    """All reduced p/q in (0, 1) with q <= max_denominator, ordered by (q, p)."""
    from math import gcd

    for q in range(2, max_denominator + 1):
        for p in range(1, q):
            if gcd(p, q) == 1:
                yield Fraction(p, q)
