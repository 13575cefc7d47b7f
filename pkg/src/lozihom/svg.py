"""Minimal static SVG 1.1 writer for manifold pictures and scan rasters.

World coordinates are mapped to the page with y pointing up.  Every number
is written with a fixed format so the same input always gives the same bytes.
"""
from __future__ import annotations

import math
from typing import Iterable, Optional, Sequence
from xml.sax.saxutils import escape

STABLE_COLOR = "#d62728"  # red
UNSTABLE_COLOR = "#1f4fd6"  # blue
AXIS_COLOR = "#808080"
DEFAULT_VIEWPORT = (-9.0, 9.0, -10.5, 6.5)  # xmin, xmax, ymin, ymax


def _f(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class Canvas:
    """Accumulates SVG elements in world coordinates.

    >>> c = Canvas((0, 1, 0, 1), width=100)
    >>> c.to_page(0.0, 1.0)
    (0.0, 0.0)
    """

    def __init__(
        self,
        viewport: Sequence[float] = DEFAULT_VIEWPORT,
        width: int = 720,
        height: Optional[int] = None,
        version: str = "",
    ):
        xmin, xmax, ymin, ymax = map(float, viewport)
        if not (xmax > xmin and ymax > ymin):
            raise ValueError("empty viewport")
        self.viewport = (xmin, xmax, ymin, ymax)
        self.sx = width / (xmax - xmin)
        # equal scales unless a height is forced
        self.height = int(math.ceil((ymax - ymin) * self.sx)) if height is None else height
        self.sy = self.height / (ymax - ymin)
        self.width = width
        self.version = version
        self._items: list[str] = []

    def to_page(self, x: float, y: float) -> tuple[float, float]:
        xmin, _, _, ymax = self.viewport
        return (x - xmin) * self.sx, (ymax - y) * self.sy

    def _pts(self, pts) -> str:
        return " ".join(f"{_f(u)},{_f(v)}" for u, v in (self.to_page(float(x), float(y)) for x, y in pts))

    def axes(self, color: str = AXIS_COLOR) -> None:
        xmin, xmax, ymin, ymax = self.viewport
        if ymin <= 0.0 <= ymax:
            self.polyline([(xmin, 0.0), (xmax, 0.0)], color, 0.8)
        if xmin <= 0.0 <= xmax:
            self.polyline([(0.0, ymin), (0.0, ymax)], color, 0.8)

    def polyline(self, pts, color: str, stroke_width: float = 1.2, cls: Optional[str] = None) -> None:
        pts = list(pts)
        if len(pts) < 2:
            return
        c = f' class="{cls}"' if cls else ""
        self._items.append(
            f'<polyline{c} fill="none" stroke="{color}" stroke-width="{_f(stroke_width)}" '
            f'stroke-linejoin="round" points="{self._pts(pts)}"/>'
        )

    def marker(self, x: float, y: float, label: str = "", color: str = "#000000", r: float = 2.5) -> None:
        u, v = self.to_page(x, y)
        self._items.append(f'<circle cx="{_f(u)}" cy="{_f(v)}" r="{_f(r)}" fill="{color}"/>')
        if label:
            self._items.append(
                f'<text x="{_f(u + 4)}" y="{_f(v - 4)}" font-family="sans-serif" font-size="11">{escape(label)}</text>'
            )

    def rect(self, x0: float, y0: float, x1: float, y1: float, fill: str) -> None:
        u0, v0 = self.to_page(min(x0, x1), max(y0, y1))
        u1, v1 = self.to_page(max(x0, x1), min(y0, y1))
        self._items.append(
            f'<rect x="{_f(u0)}" y="{_f(v0)}" width="{_f(u1 - u0)}" height="{_f(v1 - v0)}" fill="{fill}" stroke="none"/>'
        )

    def comment(self, text: str) -> None:
        self._items.append(f"<!-- {escape(text).replace('--', '- -')} -->")

    def render(self) -> str:
        head = [
            '<?xml version="1.0" encoding="UTF-8"?>',
            f"<!-- lozihom {self.version} -->" if self.version else "<!-- lozihom -->",
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{self.width}" height="{self.height}" '
            f'viewBox="0 0 {self.width} {self.height}">',
            f'<rect x="0" y="0" width="{self.width}" height="{self.height}" fill="#ffffff"/>',
        ]
        return "\n".join(head + self._items + ["</svg>", ""])


def manifold_svg(
    stable_pts,
    unstable_pts,
    anchors: Iterable[tuple[str, float, float]] = (),
    viewport: Sequence[float] = DEFAULT_VIEWPORT,
    notes: Iterable[str] = (),
    version: str = "",
) -> str:
    """Stable arc in red, unstable arc in blue, labelled anchor points on top."""
    c = Canvas(viewport, version=version)
    for n in notes:
        c.comment(n)
    c.axes()
    c.polyline(stable_pts, STABLE_COLOR, cls="stable")
    c.polyline(unstable_pts, UNSTABLE_COLOR, cls="unstable")
    for label, x, y in anchors:
        c.marker(x, y, label)
    return c.render()


def raster_svg(
    a_values: Sequence[float],
    b_values: Sequence[float],
    cells,
    overlays: Iterable[tuple[str, list]] = (),
    version: str = "",
) -> str:
    """Heat raster of a region scan in the (a, b) plane.

    ``cells[j][i]`` is True, False or None (unknown) for ``(a_values[i], b_values[j])``.
    Overlays are (name, [(a, b), ...]) polylines drawn in black.
    """
    a_values, b_values = list(a_values), list(b_values)
    da = (a_values[-1] - a_values[0]) / max(1, len(a_values) - 1) or 1.0
    db = (b_values[-1] - b_values[0]) / max(1, len(b_values) - 1) or 1.0
    vp = (a_values[0] - da / 2, a_values[-1] + da / 2, b_values[0] - db / 2, b_values[-1] + db / 2)
    # square picture whatever the parameter ranges are
    c = Canvas(vp, width=600, height=600, version=version)
    fill = {True: "#f4a582", False: "#92c5de", None: "#bbbbbb"}
    for j, b in enumerate(b_values):
        for i, a in enumerate(a_values):
            c.rect(a - da / 2, b - db / 2, a + da / 2, b + db / 2, fill[cells[j][i]])
    for name, pts in overlays:
        c.comment(name)
        c.polyline(pts, "#000000", 1.5, cls=name)
    return c.render()
