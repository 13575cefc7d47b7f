"""Robust planar predicates.

``orient2d`` uses the usual floating-point filter (Shewchuk's error bound for
the 2x2 determinant) and falls back to exact rational arithmetic when the
fast result is too close to zero to trust.
"""
from __future__ import annotations

import math
from fractions import Fraction

# bound on the relative error of the naive determinant, see Shewchuk (1997)
_EPS = 2.0**-53
_CCW_BOUND = (3.0 + 16.0 * _EPS) * _EPS


def orient2d_exact(a, b, c) -> int:
    ax, ay = Fraction(a[0]), Fraction(a[1])
    det = (Fraction(b[0]) - ax) * (Fraction(c[1]) - ay) - (Fraction(b[1]) - ay) * (Fraction(c[0]) - ax)
    return (det > 0) - (det < 0)


def orient2d(a, b, c) -> int:
    """Sign of the signed area of triangle abc: +1 left turn, -1 right, 0 collinear."""
    l = (b[0] - a[0]) * (c[1] - a[1])
    r = (b[1] - a[1]) * (c[0] - a[0])
    det = l - r
    bound = _CCW_BOUND * (abs(l) + abs(r))
    if det > bound:
        return 1
    if -det > bound:
        return -1
    return orient2d_exact(a, b, c)


def segments_cross(p0, p1, q0, q1) -> bool:
    """True when the closed segments share at least one point (exact)."""
    o1, o2 = orient2d(p0, p1, q0), orient2d(p0, p1, q1)
    o3, o4 = orient2d(q0, q1, p0), orient2d(q0, q1, p1)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True

    def on(a, b, c):
        return min(a[0], b[0]) <= c[0] <= max(a[0], b[0]) and min(a[1], b[1]) <= c[1] <= max(a[1], b[1])

    return (
        (o1 == 0 and on(p0, p1, q0))
        or (o2 == 0 and on(p0, p1, q1))
        or (o3 == 0 and on(q0, q1, p0))
        or (o4 == 0 and on(q0, q1, p1))
    )


def point_segment_distance(p, a, b) -> float:
    return _project(p, a, b)[1]


def segment_distance(p0, p1, q0, q1) -> float:
    if segments_cross(p0, p1, q0, q1):
        return 0.0
    return min(
        point_segment_distance(q0, p0, p1),
        point_segment_distance(q1, p0, p1),
        point_segment_distance(p0, q0, q1),
        point_segment_distance(p1, q0, q1),
    )


def line_intersection(p0, p1, q0, q1):
    """Intersection of the supporting lines, or ``None`` when parallel.

    The point is placed along the shorter segment, and the other line is
    referenced from its end nearer to that segment, so one very long
    segment does not cost absolute accuracy.
    """
    if math.hypot(p1[0] - p0[0], p1[1] - p0[1]) > math.hypot(q1[0] - q0[0], q1[1] - q0[1]):
        p0, p1, q0, q1 = q0, q1, p0, p1
    rx, ry = p1[0] - p0[0], p1[1] - p0[1]
    sx, sy = q1[0] - q0[0], q1[1] - q0[1]
    den = rx * sy - ry * sx
    if den == 0.0:
        return None
    if math.hypot(q1[0] - p0[0], q1[1] - p0[1]) < math.hypot(q0[0] - p0[0], q0[1] - p0[1]):
        q0 = q1
    t = ((q0[0] - p0[0]) * sy - (q0[1] - p0[1]) * sx) / den
    return (p0[0] + t * rx, p0[1] + t * ry)


def _project(p, a, b):
    """Nearest point of segment ab to p and the distance, measured from the
    end nearer to p so long segments keep absolute accuracy."""
    dx, dy = b[0] - a[0], b[1] - a[1]
    ll = dx * dx + dy * dy
    t = 0.0 if ll == 0.0 else ((p[0] - a[0]) * dx + (p[1] - a[1]) * dy) / ll
    if t > 0.5:
        t = max(0.0, ((p[0] - b[0]) * -dx + (p[1] - b[1]) * -dy) / ll)
        f = (b[0] - t * dx, b[1] - t * dy)
    else:
        t = max(0.0, t)
        f = (a[0] + t * dx, a[1] + t * dy)
    return f, math.hypot(f[0] - p[0], f[1] - p[1])


def closest_points(p0, p1, q0, q1):
    """A pair of nearest points on two segments (crossing point if they cross)."""
    best = None
    for p, a, b, flip in ((q0, p0, p1, True), (q1, p0, p1, True), (p0, q0, q1, False), (p1, q0, q1, False)):
        f, d = _project(p, a, b)
        if best is None or d < best[0]:
            best = (d, (f, p) if flip else (p, f))
    if best[0] > 0.0 and segments_cross(p0, p1, q0, q1):
        x = line_intersection(p0, p1, q0, q1)
        # nearly parallel lines give an inaccurate crossing; keep it only if it beats the endpoints
        if x is not None and max(_project(x, p0, p1)[1], _project(x, q0, q1)[1]) <= best[0]:
            return x, x
    return best[1]
