"""Finite arcs of the stable and unstable manifolds of X as labelled polylines.

The unstable arc is grown from the local eigen-segment [X, Z] in two halves:
even images give the branch X, Z, Z^2, ... and odd images the branch
X, Z^-1, Z^1, Z^3, ...  The stable arc [X, V^-n] is grown from [X, V^1, V]
by backward images.  Every output vertex is either an anchor (a known iterate
of Z or V, or X itself) or a breakpoint, i.e. the image of a point that sat on
the break line at some earlier step.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    Params,
    Point,
    PolyLine,
    Segment,
    apply,
    eigen_data,
    fixed_points,
    iterate,
    map_polyline_raw,
    point_V,
    point_Z,
)
from .errors import ExhaustionError, TruncationError, DomainError

__all__ = [
    "Label",
    "ManifoldArc",
    "SlopeSequence",
    "UnstablePieces",
    "unstable_arc",
    "stable_arc",
    "unstable_half",
    "slope_sequence",
    "slope_closed_form",
    "zigzag_index",
    "zigzag_legs",
    "unstable_pieces",
    "first_delta_crossing",
    "quadrant",
    "AXIS_SNAP",
    "MAX_VERTICES",
]

AXIS_SNAP = 1e-12
MAX_VERTICES = 2**20
COLLINEAR_TOL = 1e-12


class Label(NamedTuple):
    """Anchor label: ``Label("Z", 3)`` is Z^3, ``Label("X", 0)`` is X."""

    orbit: str
    k: int

    def __str__(self):
        return "X" if self.orbit == "X" else f"{self.orbit}^{self.k}"

    @classmethod
    def parse(cls, text: str) -> "Label":
        if text == "X":
            return cls("X", 0)
        orbit, sep, k = text.partition("^")
        if orbit not in ("Z", "V") or (sep and not k):
            raise ValueError(f"bad anchor label {text!r}")
        return cls(orbit, int(k) if sep else 0)  # bare "Z" is Z^0

    def point(self, params: Params) -> Point:
        if self.orbit == "X":
            return fixed_points(params)[0]
        base = point_Z(params) if self.orbit == "Z" else point_V(params)
        # Z^-k and V^k stay on the eigenlines of X inside x >= 0, where the map is
        # affine; the closed form avoids iterating in the expanding direction
        if self.orbit == "Z" and self.k < 0 or self.orbit == "V" and self.k > 0:
            X = fixed_points(params)[0]
            e = eigen_data(params)
            f = (e.lambda_u if self.orbit == "Z" else e.lambda_s) ** self.k
            return Point(X.x + (base.x - X.x) * f, X.y + (base.y - X.y) * f)
        return iterate(params, base, self.k)

    def shifted(self, n: int) -> "Label":
        return self if self.orbit == "X" else Label(self.orbit, self.k + n)


@dataclass(frozen=True)
class ManifoldArc:
    kind: str  # "stable" | "unstable"
    line: PolyLine
    anchors: dict  # vertex index -> Label
    breakpoints: frozenset
    depth: int
    ages: dict = field(default_factory=dict)  # breakpoint index -> steps since it sat on the break line

    def __len__(self):
        return len(self.line)

    def index_of(self, label) -> int:
        if isinstance(label, str):
            label = Label.parse(label)
        for i, lab in self.anchors.items():
            if lab == label:
                return i
        raise KeyError(str(label))

    def has(self, label) -> bool:
        try:
            self.index_of(label)
        except KeyError:
            return False
        return True

    def sub(self, i: int, j: int) -> PolyLine:
        """Vertices ``i..j`` inclusive, in either order."""
        v = self.line.vertices
        return PolyLine(v[i : j + 1] if i <= j else v[j : i + 1][::-1])


class _Grow:
    """Mutable working state while growing one branch."""

    def __init__(self, vertices, anchors, breaks=None, ages=None):
        self.v = np.asarray(vertices, dtype=np.float64)
        self.anchors = dict(anchors)
        self.ages = dict(ages or {})

    def step(self, params: Params, direction: str):
        out, src, brk = map_polyline_raw(params, self.v, direction)
        anchors, ages = {}, {}
        for k in range(len(out)):
            s = int(src[k])
            if s >= 0 and s in self.anchors:
                anchors[k] = self.anchors[s].shifted(1 if direction == "forward" else -1)
            if brk[k]:
                ages[k] = 1
            elif s >= 0 and s in self.ages:
                ages[k] = self.ages[s] + 1
        self.v, self.anchors, self.ages = out, anchors, ages

    def insert(self, pos: int, p, label: Label):
        self.v = np.insert(self.v, pos, p, axis=0)
        self.anchors = {(k + 1 if k >= pos else k): lab for k, lab in self.anchors.items()}
        self.ages = {(k + 1 if k >= pos else k): a for k, a in self.ages.items()}
        self.anchors[pos] = label

    def prune_collinear(self):
        v = self.v
        if len(v) < 3:
            return
        d0 = v[1:-1] - v[:-2]
        d1 = v[2:] - v[1:-1]
        cross = np.abs(d0[:, 0] * d1[:, 1] - d0[:, 1] * d1[:, 0])
        dot = (d0 * d1).sum(axis=1)
        lens = np.hypot(*d0.T) * np.hypot(*d1.T)
        straight = (cross < COLLINEAR_TOL * lens) & (dot > 0)
        drop = [k + 1 for k in np.flatnonzero(straight) if (k + 1) not in self.anchors and (k + 1) not in self.ages]
        if not drop:
            return
        keep = np.ones(len(v), dtype=bool)
        keep[drop] = False
        new_index = np.cumsum(keep) - 1
        self.v = v[keep]
        self.anchors = {int(new_index[k]): lab for k, lab in self.anchors.items()}
        self.ages = {int(new_index[k]): a for k, a in self.ages.items()}


def _axis_crossing(p, q, coord: int):
    """Point where segment pq meets the axis ``coord = 0`` (that coordinate set exactly)."""
    t = p[coord] / (p[coord] - q[coord])
    c = [p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]
    c[coord] = 0.0
    return c


def unstable_half(params: Params, steps: int, max_vertices: int = MAX_VERTICES) -> _Grow:
    """``L^steps([X, Z])`` with Z^-1 inserted on its first segment after odd steps."""
    params.require_invertible()
    X = fixed_points(params)[0]
    g = _Grow([X, point_Z(params)], {0: Label("X", 0), 1: Label("Z", 0)})
    for k in range(1, steps + 1):
        g.step(params, "forward")
        if k % 2 == 1:
            g.insert(1, _axis_crossing(g.v[0], g.v[1], 0), Label("Z", -1))
        g.prune_collinear()
        if len(g.v) > max_vertices:
            raise TruncationError(f"unstable half exceeded {max_vertices} vertices", completed_depth=k - 1)
    return g


def unstable_arc(params: Params, pairs: int = 8, max_vertices: int = MAX_VERTICES) -> ManifoldArc:
    """The arc L^(2 pairs)([Z^-1, Z]^u) = [Z^(2 pairs - 1), Z^(2 pairs)]^u.

    Vertices run Z^(2p-1), ..., Z^1, Z^-1, X, Z, Z^2, ..., Z^(2p).
    """
    if pairs < 1:
        raise DomainError("pairs must be >= 1")
    try:
        left = unstable_half(params, 2 * pairs - 1, max_vertices)
        right = unstable_half(params, 2 * pairs, max_vertices)
    except TruncationError as e:
        raise TruncationError(str(e), completed_depth=e.completed_depth) from None
    n_left = len(left.v)
    if n_left + len(right.v) - 1 > max_vertices:
        raise TruncationError(f"unstable arc exceeded {max_vertices} vertices", completed_depth=2 * pairs - 1)
    v = np.concatenate([left.v[::-1], right.v[1:]])
    flip = lambda k: n_left - 1 - k  # noqa: E731
    anchors = {flip(k): lab for k, lab in left.anchors.items()}
    anchors.update({k + n_left - 1: lab for k, lab in right.anchors.items() if k > 0})
    ages = {flip(k): a for k, a in left.ages.items()}
    ages.update({k + n_left - 1: a for k, a in right.ages.items() if k > 0})
    return ManifoldArc("unstable", PolyLine(v), anchors, frozenset(ages), 2 * pairs, ages)


def stable_arc(params: Params, steps: Optional[int] = None, max_vertices: int = MAX_VERTICES) -> ManifoldArc:
    """The arc [X, V^-steps]^s, vertices running X, V^1, V, ..., V^-steps."""
    params.require_invertible()
    if steps is None:
        steps = 2 * zigzag_index(params) + 6
    if steps < 0:
        raise DomainError("steps must be >= 0")
    X = fixed_points(params)[0]
    V = point_V(params)
    g = _Grow([X, apply(params, V), V], {0: Label("X", 0), 1: Label("V", 1), 2: Label("V", 0)})
    for k in range(1, steps + 1):
        g.step(params, "backward")
        g.insert(1, _axis_crossing(g.v[0], g.v[1], 1), Label("V", 1))
        g.prune_collinear()
        if len(g.v) > max_vertices:
            raise TruncationError(f"stable arc exceeded {max_vertices} vertices", completed_depth=k - 1)
    return ManifoldArc("stable", PolyLine(g.v), g.anchors, frozenset(g.ages), steps, g.ages)


@dataclass(frozen=True)
class SlopeSequence:
    s0: float
    M1: float
    M2: float
    mu: float
    j0: float
    values: tuple
    singular: bool = False


def slope_sequence(params: Params, n: int) -> SlopeSequence:
    """Slopes s_0..s_n of successive backward images of [V, V^1].

    s_{k+1} = b / s_k - a.  Stops early (``singular=True``) at a slope of
    magnitude below 1e-13.
    """
    a, b, r = params.a, params.b, params.root
    M1, M2 = 0.5 * (-a - r), 0.5 * (-a + r)
    s = 0.5 * (a + r)
    vals = [s]
    singular = False
    for _ in range(n):
        if abs(s) < 1e-13:
            singular = True
            break
        s = b / s - a
        vals.append(s)
    return SlopeSequence(vals[0], M1, M2, M2 / M1, (a + r) / a, tuple(vals), singular)


def slope_closed_form(params: Params, n: int) -> float:
    a, r = params.a, params.root
    M1, M2 = 0.5 * (-a - r), 0.5 * (-a + r)
    j = (M2 / M1) ** n * (a + r) / a
    return (M1 - M2 * j) / (1.0 - j)


def quadrant(p, snap: float = AXIS_SNAP) -> int:
    """1..4 for open quadrants, 0 when within ``snap`` of an axis."""
    x, y = p
    if abs(x) < snap or abs(y) < snap:
        return 0
    if x > 0:
        return 1 if y > 0 else 4
    return 2 if y > 0 else 3


def zigzag_index(params: Params, max_iter: int = 10_000) -> int:
    """Smallest n >= 1 with V^-n in the open second quadrant."""
    p = point_V(params)
    for n in range(1, max_iter + 1):
        p = iterate(params, p, -1)
        if quadrant(p) == 2:
            return n
    raise ExhaustionError(f"no backward iterate of V reached Q2 within {max_iter} steps")


def zigzag_legs(params: Params) -> list[Segment]:
    """Legs [V^-(n-1), V^-n] for n = 1..n0."""
    n0 = zigzag_index(params)
    pts = [point_V(params)]
    for _ in range(n0):
        pts.append(iterate(params, pts[-1], -1))
    return [Segment(pts[k], pts[k + 1]) for k in range(n0)]


@dataclass(frozen=True)
class UnstablePieces:
    gamma: list  # gamma[n] = [Z^(2n-1), Z^(2n+1)]^u
    delta: list  # delta[n] = [Z^(2n), Z^(2n+2)]^u


def unstable_pieces(params: Params, count: int, max_vertices: int = MAX_VERTICES) -> UnstablePieces:
    arc = unstable_arc(params, max(count, 1), max_vertices)
    gamma, delta = [], []
    for n in range(count):
        lo = "Z^-1" if n == 0 else f"Z^{2 * n - 1}"
        gamma.append(arc.sub(arc.index_of(lo), arc.index_of(f"Z^{2 * n + 1}")))
        delta.append(arc.sub(arc.index_of(f"Z^{2 * n}"), arc.index_of(f"Z^{2 * n + 2}")))
    return UnstablePieces(gamma, delta)


def first_delta_crossing(params: Params, count: int = 8) -> Optional[int]:
    """Smallest i < count whose piece delta_i meets the y-axis."""
    right = unstable_half(params, 2 * count)
    idx = {lab: k for k, lab in right.anchors.items()}
    for i in range(count):
        lo, hi = idx[Label("Z", 2 * i)], idx[Label("Z", 2 * i + 2)]
        x = right.v[lo : hi + 1, 0]
        if x.min() <= AXIS_SNAP and x.max() >= -AXIS_SNAP:
            return i
    return None


def anchor_error(params: Params, arc: ManifoldArc) -> float:
    """Largest distance between an anchor vertex and the iterate it names."""
    worst = 0.0
    for k, lab in arc.anchors.items():
        p = lab.point(params)
        worst = max(worst, math.hypot(arc.line.vertices[k, 0] - p.x, arc.line.vertices[k, 1] - p.y))
    return worst
