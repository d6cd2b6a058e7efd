"""Deterministic SVG output for laminations, torus regions and entropy plots.

Coordinates are rounded to a fixed number of decimals so that identical
inputs give byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from .angle import Angle
from .lamination import FiniteLamination, Leaf, RectangleSet
from .major import PrimitiveMajor

GEODESIC_STYLES = ("hyperbolic", "chord")

DEFAULT_PALETTE = {
    "background": "#ffffff",
    "circle": "#000000",
    "leaf": "#1f4e9e",
    "fill": "#c9d8f0",
    "cell": "#e3c79a",
    "diagonal": "#555555",
    "marker": "#2e8b3a",
    "axis": "#000000",
    "point": "#b22222",
}


class RenderError(ValueError):
    pass


@dataclass(frozen=True)
class RenderConfig:
    width: int = 600
    height: int = 600
    stroke_width: float = 1.0
    geodesic: str = "hyperbolic"
    palette: Dict[str, str] = field(default_factory=lambda: dict(DEFAULT_PALETTE))
    marker_radius: float = 2.0
    margin: int = 40

    def __post_init__(self):
        if self.geodesic not in GEODESIC_STYLES:
            raise RenderError(f"unknown geodesic style {self.geodesic!r}")
        if self.width <= 2 * self.margin or self.height <= 2 * self.margin:
            raise RenderError("canvas too small for the margin")

    def color(self, key: str) -> str:
        return self.palette.get(key, DEFAULT_PALETTE[key])


def _f(x: float) -> str:
    s = f"{x:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _header(cfg: RenderConfig) -> List[str]:
    return [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{cfg.width}" '
        f'height="{cfg.height}" viewBox="0 0 {cfg.width} {cfg.height}">',
        f'<rect x="0" y="0" width="{cfg.width}" height="{cfg.height}" '
        f'fill="{cfg.color("background")}" class="background"/>',
    ]


# -- disk -------------------------------------------------------------------


class _Disk:
    def __init__(self, cfg: RenderConfig):
        self.cfg = cfg
        self.cx = cfg.width / 2
        self.cy = cfg.height / 2
        self.r = min(cfg.width, cfg.height) / 2 - cfg.margin

    def point(self, t: Angle) -> Tuple[float, float]:
        a = 2 * math.pi * float(t)
        return self.cx + self.r * math.cos(a), self.cy - self.r * math.sin(a)

    def segment(self, a: Angle, b: Angle) -> str:
        """Path command from the point at ``a`` to the point at ``b`` (pen already at ``a``)."""
        x2, y2 = self.point(b)
        delta = (b - a) % 1
        if self.cfg.geodesic == "chord" or delta == 0 or delta * 2 == 1:
            return f"L {_f(x2)} {_f(y2)}"
        # the geodesic is an arc of the circle orthogonal to the boundary;
        # its center sits at distance 1/cos(pi*delta) along the bisector
        half = math.pi * float(min(delta, 1 - delta))
        radius = self.r * math.tan(half)
        sweep = 0 if 2 * delta < 1 else 1  # counterclockwise endpoint pairs bend clockwise on screen
        return f"A {_f(radius)} {_f(radius)} 0 0 {sweep} {_f(x2)} {_f(y2)}"


def _leaf_path(disk: _Disk, a: Angle, b: Angle) -> str:
    x1, y1 = disk.point(a)
    return f"M {_f(x1)} {_f(y1)} {disk.segment(a, b)}"


def render_disk(obj: Union[FiniteLamination, PrimitiveMajor, Iterable[Leaf]], cfg: Optional[RenderConfig] = None) -> str:
    """Unit circle plus one path per leaf; polygon classes of a major become filled paths."""
    cfg = cfg or RenderConfig()
    disk = _Disk(cfg)
    out = _header(cfg)
    out.append(
        f'<circle cx="{_f(disk.cx)}" cy="{_f(disk.cy)}" r="{_f(disk.r)}" fill="none" '
        f'stroke="{cfg.color("circle")}" stroke-width="{_f(cfg.stroke_width)}" class="boundary"/>'
    )
    leaf_style = f'fill="none" stroke="{cfg.color("leaf")}" stroke-width="{_f(cfg.stroke_width)}"'
    if isinstance(obj, PrimitiveMajor):
        for cls in obj.classes:
            pts = sorted(cls)
            if len(pts) == 2:
                out.append(f'<path d="{_leaf_path(disk, pts[0], pts[1])}" {leaf_style} class="leaf"/>')
                continue
            x0, y0 = disk.point(pts[0])
            cmds = [f"M {_f(x0)} {_f(y0)}"]
            for i in range(len(pts)):
                cmds.append(disk.segment(pts[i], pts[(i + 1) % len(pts)]))
            cmds.append("Z")
            out.append(
                f'<path d="{" ".join(cmds)}" fill="{cfg.color("fill")}" stroke="{cfg.color("leaf")}" '
                f'stroke-width="{_f(cfg.stroke_width)}" class="polygon"/>'
            )
    else:
        leaves = obj.leaves if isinstance(obj, FiniteLamination) else obj
        for a, b in sorted(leaves):
            out.append(f'<path d="{_leaf_path(disk, a, b)}" {leaf_style} class="leaf"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


# -- torus ------------------------------------------------------------------


def render_torus(
    rects: Optional[RectangleSet],
    markers: Sequence[Tuple[Angle, Angle]] = (),
    cfg: Optional[RenderConfig] = None,
) -> str:
    """Unit-square plot of a torus rectangle set with the diagonal and marker dots.

    Each rectangle is one ``path`` element; rectangles wrapping past 0 are drawn
    as several subpaths of that element.
    """
    cfg = cfg or RenderConfig()
    m = cfg.margin
    side = min(cfg.width, cfg.height) - 2 * m

    def px(x) -> float:
        return m + side * float(x)

    def py(y) -> float:
        return m + side * (1 - float(y))

    out = _header(cfg)
    out.append(
        f'<rect x="{_f(m)}" y="{_f(m)}" width="{_f(side)}" height="{_f(side)}" fill="none" '
        f'stroke="{cfg.color("axis")}" stroke-width="{_f(cfg.stroke_width)}" class="frame"/>'
    )
    for x, y in (rects.rectangles if rects is not None else ()):
        sub = []
        for x0, x1, y0, y1 in RectangleSet(((x, y),)).pieces():
            sub.append(
                f"M {_f(px(x0))} {_f(py(y0))} H {_f(px(x1))} V {_f(py(y1))} H {_f(px(x0))} Z"
            )
        out.append(
            f'<path d="{" ".join(sub)}" fill="{cfg.color("cell")}" stroke="{cfg.color("leaf")}" '
            f'stroke-width="{_f(cfg.stroke_width / 2)}" class="cell"/>'
        )
    out.append(
        f'<line x1="{_f(px(0))}" y1="{_f(py(0))}" x2="{_f(px(1))}" y2="{_f(py(1))}" '
        f'stroke="{cfg.color("diagonal")}" stroke-width="{_f(cfg.stroke_width)}" class="diagonal"/>'
    )
    for x, y in markers:
        out.append(
            f'<circle cx="{_f(px(x))}" cy="{_f(py(y))}" r="{_f(cfg.marker_radius * 2)}" '
            f'fill="{cfg.color("marker")}" class="marker"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"


def major_markers(m: PrimitiveMajor) -> List[Tuple[Angle, Angle]]:
    """Both orientations of every leaf of a major, as torus points."""
    pts = []
    for a, b in m.leaves():
        pts.extend([(a, b), (b, a)])
    return sorted(pts)


# -- entropy plot -----------------------------------------------------------


def render_entropy_plot(rows, cfg: Optional[RenderConfig] = None, half: bool = False) -> str:
    """Scatter plot of core entropy against theta; ``half`` restricts to [0, 1/2]."""
    cfg = cfg or RenderConfig(width=800, height=500)
    rows = list(rows)
    if half:
        rows = [r for r in rows if 2 * r.theta <= 1]
    if not rows:
        raise RenderError("empty input: nothing to plot")
    xmax = 0.5 if half else 1.0
    ymax = math.log(2)
    m = cfg.margin
    w, h = cfg.width - 2 * m, cfg.height - 2 * m

    def px(x: float) -> float:
        return m + w * x / xmax

    def py(y: float) -> float:
        return m + h * (1 - y / ymax)

    out = _header(cfg)
    axis = f'stroke="{cfg.color("axis")}" stroke-width="{_f(cfg.stroke_width)}"'
    out.append(f'<line x1="{_f(px(0))}" y1="{_f(py(0))}" x2="{_f(px(xmax))}" y2="{_f(py(0))}" {axis} class="axis"/>')
    out.append(f'<line x1="{_f(px(0))}" y1="{_f(py(0))}" x2="{_f(px(0))}" y2="{_f(py(ymax))}" {axis} class="axis"/>')
    nticks = 5 if half else 10
    for i in range(nticks + 1):
        x = xmax * i / nticks
        out.append(f'<line x1="{_f(px(x))}" y1="{_f(py(0))}" x2="{_f(px(x))}" y2="{_f(py(0) + 5)}" {axis} class="tick"/>')
        out.append(
            f'<text x="{_f(px(x))}" y="{_f(py(0) + 18)}" font-size="11" text-anchor="middle" class="label">{x:.1f}</text>'
        )
    for frac, label in ((0.0, "0"), (0.5, "log2/2"), (1.0, "log2")):
        y = ymax * frac
        out.append(f'<line x1="{_f(px(0) - 5)}" y1="{_f(py(y))}" x2="{_f(px(0))}" y2="{_f(py(y))}" {axis} class="tick"/>')
        out.append(
            f'<text x="{_f(px(0) - 8)}" y="{_f(py(y) + 4)}" font-size="11" text-anchor="end" class="label">{label}</text>'
        )
    for r in rows:
        y = r.entropy
        out.append(
            f'<circle cx="{_f(px(float(r.theta)))}" cy="{_f(py(y))}" r="{_f(cfg.marker_radius)}" '
            f'fill="{cfg.color("point")}" class="point"/>'
        )
    out.append("</svg>")
    return "\n".join(out) + "\n"
