from fractions import Fraction

from hypothesis import given, strategies as st

from lozihom.predicates import (
    closest_points,
    line_intersection,
    orient2d,
    orient2d_exact,
    point_segment_distance,
    segment_distance,
    segments_cross,
)

fl = st.floats(-1e3, 1e3)
pt = st.tuples(fl, fl)


def test_orientation_basics():
    assert orient2d((0, 0), (1, 0), (0, 1)) == 1
    assert orient2d((0, 0), (1, 0), (0, -1)) == -1
    assert orient2d((0, 0), (1, 1), (3, 3)) == 0


def test_near_degenerate_falls_back_to_exact():
    # c sits on the line through a and b up to one ulp; naive arithmetic gets this wrong
    a, b = (0.5, 0.5), (12.0, 12.0)
    for k in range(-3, 4):
        c = (24.0 + k * 2.0**-48, 24.0)
        assert orient2d(a, b, c) == orient2d_exact(a, b, c)


@given(pt, pt, pt)
def test_orientation_matches_exact(a, b, c):
    assert orient2d(a, b, c) == orient2d_exact(a, b, c)


@given(pt, pt, pt)
def test_orientation_antisymmetric(a, b, c):
    assert orient2d(a, b, c) == -orient2d(b, a, c)


@given(pt, pt, pt, pt)
def test_cross_symmetric_and_consistent(p0, p1, q0, q1):
    c = segments_cross(p0, p1, q0, q1)
    assert c == segments_cross(q0, q1, p0, p1)
    assert (segment_distance(p0, p1, q0, q1) == 0.0) == c or not c


def test_touching_and_disjoint():
    assert segments_cross((0, 0), (2, 0), (1, 0), (1, 5))  # T-junction
    assert segments_cross((0, 0), (1, 1), (1, 1), (2, 0))  # shared endpoint
    assert not segments_cross((0, 0), (1, 0), (0, 1), (1, 1))
    assert not segments_cross((0, 0), (1, 0), (2, 0), (3, 0))  # collinear, apart
    assert segments_cross((0, 0), (2, 0), (1, 0), (3, 0))  # collinear, overlapping


def test_distances():
    assert point_segment_distance((0, 1), (-1, 0), (1, 0)) == 1.0
    assert point_segment_distance((3, 4), (0, 0), (0, 0)) == 5.0
    assert segment_distance((0, 0), (1, 0), (0, 2), (1, 2)) == 2.0
    assert line_intersection((0, 0), (1, 0), (0, 1), (1, 1)) is None
    assert line_intersection((0, 0), (2, 2), (0, 2), (2, 0)) == (1.0, 1.0)


def test_closest_points():
    p, q = closest_points((0, 0), (2, 0), (1, 1), (1, 3))
    assert p == (1.0, 0.0) and q == (1, 1)
    p, q = closest_points((0, 0), (2, 2), (0, 2), (2, 0))
    assert p == q == (1.0, 1.0)


def test_exact_uses_rationals():
    a, b, c = (0.1, 0.1), (0.3, 0.3), (0.7, 0.7)
    det = (Fraction(b[0]) - Fraction(a[0])) * (Fraction(c[1]) - Fraction(a[1])) - (
        Fraction(b[1]) - Fraction(a[1])
    ) * (Fraction(c[0]) - Fraction(a[0]))
    assert orient2d_exact(a, b, c) == (det > 0) - (det < 0)
