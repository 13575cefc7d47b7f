"""The Lozi map L(x, y) = (1 + y - a|x|, b x) and its basic objects.

All functions are pure.  Points are immutable ``(x, y)`` named tuples and
polylines are read-only ``(n, 2)`` float arrays wrapped in :class:`PolyLine`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, NamedTuple

import numpy as np

from .errors import (
    DegenerateParameterError,
    DivergenceError,
    DomainError,
    SingularMapError,
)
from . import kernels

__all__ = [
    "Params",
    "Point",
    "Segment",
    "PolyLine",
    "EigenData",
    "apply",
    "apply_inverse",
    "iterate",
    "fixed_points",
    "eigen_data",
    "point_Z",
    "point_V",
    "map_polyline",
    "MAX_ITERATE",
]

MAX_ITERATE = 10**6


@dataclass(frozen=True)
class Params:
    """Parameter pair of the Lozi map.

    The default constructor enforces the main region ``a > 0``, ``0 < b < 1``,
    ``a + b > 1`` where two saddle fixed points exist.  Use
    :meth:`permissive` to build the degenerate ``b = 0`` edge for limit checks.
    """

    a: float
    b: float
    strict: bool = True

    def __post_init__(self):
        a, b = float(self.a), float(self.b)
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)
        if not (math.isfinite(a) and math.isfinite(b)):
            raise DomainError(f"non-finite parameters ({a!r}, {b!r})")
        if a * a + 4.0 * b <= 0.0:
            raise DegenerateParameterError(f"a^2 + 4b <= 0 for ({a}, {b})")
        if self.strict and not self.in_main_region:
            raise DegenerateParameterError(
                f"({a}, {b}) is outside the main region a > 0, 0 < b < 1, a + b > 1"
            )
        if not self.strict and not (a > 0.0 and 0.0 <= b < 1.0 and a + b > 1.0):
            raise DegenerateParameterError(f"({a}, {b}) is outside the closed region")

    @classmethod
    def permissive(cls, a: float, b: float) -> "Params":
        return cls(a, b, strict=False)

    @property
    def in_main_region(self) -> bool:
        return self.a > 0.0 and 0.0 < self.b < 1.0 and self.a + self.b > 1.0

    @property
    def root(self) -> float:
        """sqrt(a^2 + 4b), the discriminant root shared by all closed forms."""
        return math.sqrt(self.a * self.a + 4.0 * self.b)

    def require_invertible(self) -> None:
        if self.b == 0.0:
            raise SingularMapError("the Lozi map is not invertible for b = 0")


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Segment:
    p: Point
    q: Point

    def __post_init__(self):
        if self.p == self.q:
            raise DomainError("segment endpoints coincide")

    @property
    def length(self) -> float:
        return math.hypot(self.q.x - self.p.x, self.q.y - self.p.y)

    @property
    def slope(self) -> float:
        dx = self.q.x - self.p.x
        return (self.q.y - self.p.y) / dx if dx != 0.0 else math.copysign(math.inf, self.q.y - self.p.y)


class PolyLine:
    """An ordered list of planar vertices stored as a read-only float array."""

    __slots__ = ("_v",)

    def __init__(self, vertices):
        v = np.array(vertices, dtype=np.float64, copy=True).reshape(-1, 2)
        if len(v) and not np.all(np.isfinite(v)):
            raise DomainError("polyline vertices must be finite")
        v.setflags(write=False)
        self._v = v

    @property
    def vertices(self) -> np.ndarray:
        return self._v

    def __len__(self) -> int:
        return len(self._v)

    def __getitem__(self, k) -> Point:
        x, y = self._v[k]
        return Point(float(x), float(y))

    def __iter__(self):
        for x, y in self._v:
            yield Point(float(x), float(y))

    def __eq__(self, other) -> bool:
        return isinstance(other, PolyLine) and np.array_equal(self._v, other._v)

    def __repr__(self) -> str:
        return f"PolyLine(n={len(self._v)})"

    def segments(self) -> list[Segment]:
        return [Segment(self[k], self[k + 1]) for k in range(len(self) - 1)]

    def reversed(self) -> "PolyLine":
        return PolyLine(self._v[::-1])

    def length(self) -> float:
        if len(self._v) < 2:
            return 0.0
        return float(np.hypot(*np.diff(self._v, axis=0).T).sum())

    def diameter(self) -> float:
        """Diagonal of the bounding box; cheap stand-in for the true diameter."""
        if len(self._v) == 0:
            return 0.0
        lo, hi = self._v.min(axis=0), self._v.max(axis=0)
        return float(np.hypot(*(hi - lo)))


class EigenData(NamedTuple):
    lambda_u: float
    lambda_s: float
    eigvec_u: tuple[float, float]
    eigvec_s: tuple[float, float]


def _check_point(p) -> tuple[float, float]:
    x, y = float(p[0]), float(p[1])
    if not (math.isfinite(x) and math.isfinite(y)):
        raise DomainError(f"non-finite point ({x}, {y})")
    return x, y


def apply(params: Params, p) -> Point:
    x, y = _check_point(p)
    return Point(1.0 + y - params.a * abs(x), params.b * x)


def apply_inverse(params: Params, p) -> Point:
    params.require_invertible()
    u, v = _check_point(p)
    x = v / params.b
    return Point(x, u - 1.0 + params.a * abs(x))


def iterate(params: Params, p, k: int) -> Point:
    """Return L^k(p); negative ``k`` iterates the inverse."""
    k = int(k)
    if abs(k) > MAX_ITERATE:
        raise DomainError(f"|k| = {abs(k)} exceeds {MAX_ITERATE}")
    step = apply if k >= 0 else apply_inverse
    q = Point(*_check_point(p))
    for n in range(abs(k)):
        nxt = step(params, q)
        if not (math.isfinite(nxt.x) and math.isfinite(nxt.y)):
            raise DivergenceError(f"orbit diverged after {n} steps", last_index=n)
        q = nxt
    return q


def fixed_points(params: Params) -> tuple[Point, Point]:
    """The saddles X (first quadrant) and Y (third quadrant)."""
    a, b = params.a, params.b
    dx, dy = 1.0 + a - b, 1.0 - a - b
    if dx == 0.0 or dy == 0.0:
        raise DegenerateParameterError("1 + a - b or 1 - a - b vanishes")
    return Point(1.0 / dx, b / dx), Point(1.0 / dy, b / dy)


def eigen_data(params: Params, at: Literal["X", "Y"] = "X") -> EigenData:
    a, b, r = params.a, params.b, params.root
    if at == "X":
        lu, ls = 0.5 * (-a - r), 0.5 * (-a + r)
    elif at == "Y":
        lu, ls = 0.5 * (a + r), 0.5 * (a - r)
    else:
        raise DomainError(f"unknown fixed point {at!r}")
    return EigenData(lu, ls, (lu, b), (ls, b))


def point_Z(params: Params) -> Point:
    """First crossing of the right unstable branch of X with the x-axis."""
    return Point(2.0 / (2.0 + params.a - params.root), 0.0)


def point_V(params: Params) -> Point:
    """First crossing of the lower stable branch of X with the y-axis."""
    a, b = params.a, params.b
    return Point(0.0, -2.0 * b / (-a + 2.0 * b + params.root))


def map_polyline(
    params: Params,
    line: PolyLine,
    direction: Literal["forward", "backward"] = "forward",
) -> PolyLine:
    """Image of a polyline, split at the break line before mapping."""
    return PolyLine(map_polyline_raw(params, line.vertices, direction)[0])


def map_polyline_raw(params: Params, vertices: np.ndarray, direction: str = "forward"):
    """Kernel-level image of a vertex array.

    Returns ``(image, source, on_break)``: ``source[k]`` is the input index whose
    image is output vertex ``k`` (``-1`` for an inserted crossing) and
    ``on_break[k]`` marks outputs whose preimage lies on the break line.
    Zero-length output segments are merged.
    """
    if direction == "forward":
        forward = True
    elif direction == "backward":
        params.require_invertible()
        forward = False
    else:
        raise DomainError(f"direction must be 'forward' or 'backward', not {direction!r}")
    v = np.ascontiguousarray(vertices, dtype=np.float64).reshape(-1, 2)
    if len(v) == 0:
        return np.empty((0, 2)), np.empty(0, dtype=np.int64), np.empty(0, dtype=bool)
    if not np.all(np.isfinite(v)):
        raise DomainError("polyline vertices must be finite")
    out, src, brk = kernels.split_and_map(v, params.a, params.b, forward)
    return _merge_duplicates(out, src, brk)


def _merge_duplicates(out, src, brk):
    if len(out) < 2:
        return out, src, brk
    same = np.all(out[1:] == out[:-1], axis=1)
    if not same.any():
        return out, src, brk
    keep = np.ones(len(out), dtype=bool)
    keep[1:] = ~same
    # a dropped vertex hands its flags to the kept one before it
    groups = np.cumsum(keep) - 1
    brk_merged = np.zeros(int(groups[-1]) + 1, dtype=bool)
    np.logical_or.at(brk_merged, groups, brk)
    src_merged = src[keep].copy()
    for k in np.flatnonzero(~keep):
        g = groups[k]
        if src_merged[g] < 0 and src[k] >= 0:
            src_merged[g] = src[k]
    return out[keep], src_merged, brk_merged
