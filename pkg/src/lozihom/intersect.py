"""Intersections of polylines, tangential/transversal classification and
homoclinic point detection for the Lozi saddle X.

A contact T of polylines A and B is tangential when, inside a small disk
around T, B stays in the closure of one of the two pieces A cuts the disk
into.  For polylines this is decided by the directions of the (at most two)
local branches of each arc at T: the contact is transversal exactly when the
two B directions lie strictly on opposite sides of the two A directions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import kernels
from .core import Params, Point, PolyLine, fixed_points, point_V
from .errors import BoundaryAmbiguityError, DivergenceError, DomainError
from .manifolds import Label, stable_arc, unstable_arc
from .predicates import closest_points

__all__ = [
    "IntersectionRecord",
    "LabelledRecord",
    "TangencyReport",
    "polyline_intersections",
    "classify_intersection",
    "classify_with_margin",
    "homoclinic_on_fundamental",
    "has_homoclinic",
    "check_last_tangency",
    "default_tol",
    "MIN_TOL",
]

MIN_TOL = 1e-12
TANGENTIAL = "tangential"
TRANSVERSAL = "transversal"
UNDETERMINED = "undetermined"


@dataclass(frozen=True)
class IntersectionRecord:
    point: Point
    kind: str
    a_vertex: bool
    b_vertex: bool
    seg_a: int
    seg_b: int
    tol: float
    unstable: bool = False
    margin: float = math.inf

    def as_dict(self) -> dict:
        return {
            "x": self.point.x,
            "y": self.point.y,
            "kind": self.kind,
            "a_vertex": self.a_vertex,
            "b_vertex": self.b_vertex,
            "seg_a": self.seg_a,
            "seg_b": self.seg_b,
            "tol": self.tol,
            "unstable_classification": self.unstable,
            "margin": self.margin,
        }


def _as_array(line) -> np.ndarray:
    if isinstance(line, PolyLine):
        return line.vertices
    return np.asarray(line, dtype=np.float64).reshape(-1, 2)


def _seg_dists(v: np.ndarray, p) -> np.ndarray:
    """Distance from p to every segment of v, each measured from its nearer end."""
    a, b = v[:-1], v[1:]
    d = b - a
    ll = (d * d).sum(axis=1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(ll > 0, ((p[0] - a[:, 0]) * d[:, 0] + (p[1] - a[:, 1]) * d[:, 1]) / ll, 0.0)
        far = t > 0.5
        t2 = np.maximum(np.where(far, ((p[0] - b[:, 0]) * -d[:, 0] + (p[1] - b[:, 1]) * -d[:, 1]) / ll, 0.0), 0.0)
    t = np.maximum(t, 0.0)
    qx = np.where(far, b[:, 0] - t2 * d[:, 0], a[:, 0] + t * d[:, 0])
    qy = np.where(far, b[:, 1] - t2 * d[:, 1], a[:, 1] + t * d[:, 1])
    return np.hypot(qx - p[0], qy - p[1])


class _Local(object):
    __slots__ = ("center", "dirs", "segs", "vertex", "dist")

    def __init__(self, center, dirs, segs, vertex, dist):
        self.center, self.dirs, self.segs, self.vertex, self.dist = center, dirs, segs, vertex, dist


def _unit(dx, dy):
    n = math.hypot(dx, dy)
    return (dx / n, dy / n)


def _local(v: np.ndarray, T, tol: float) -> _Local:
    if len(v) < 2:
        raise DomainError("polyline needs at least two vertices")
    sd = _seg_dists(v, T)
    dist = float(sd.min())
    if dist > tol:
        raise DomainError(f"point is {dist:.3g} from the arc, more than tol={tol:.3g}")
    for end in (0, len(v) - 1):
        if math.hypot(v[end, 0] - T[0], v[end, 1] - T[1]) < 2.0 * tol:
            raise BoundaryAmbiguityError("contact within 2*tol of an arc terminus")
    if len(v) > 2:
        dv = np.hypot(v[1:-1, 0] - T[0], v[1:-1, 1] - T[1])
        k = int(np.argmin(dv)) + 1
        if dv[k - 1] <= 10.0 * tol:
            c = (float(v[k, 0]), float(v[k, 1]))
            dirs = [_unit(v[k - 1, 0] - c[0], v[k - 1, 1] - c[1]), _unit(v[k + 1, 0] - c[0], v[k + 1, 1] - c[1])]
            return _Local(c, dirs, (k - 1, k), k, dist)
    i = int(np.argmin(sd))
    d = _unit(v[i + 1, 0] - v[i, 0], v[i + 1, 1] - v[i, 1])
    return _Local((float(T[0]), float(T[1])), [d, (-d[0], -d[1])], (i,), None, dist)


def _eps(v: np.ndarray, loc: _Local, c) -> float:
    """Distance from c to the parts of ``v`` that are not its local branches."""
    mask = np.ones(len(v) - 1, dtype=bool)
    mask[list(loc.segs)] = False
    best = math.inf
    if mask.any():
        best = float(_seg_dists(v, c)[mask].min())
    # the far ends of the local segments bound the disk too
    for s in loc.segs:
        for k in (s, s + 1):
            if k != loc.vertex:
                best = min(best, math.hypot(v[k, 0] - c[0], v[k, 1] - c[1]))
    return best


def _side(theta1: float, theta2: float, phi: float, ang_tol: float = 1e-12) -> int:
    """0 on a boundary ray, 1 in the ccw arc theta1 -> theta2, 2 in the other."""
    two_pi = 2.0 * math.pi
    d1 = (phi - theta1) % two_pi
    span = (theta2 - theta1) % two_pi
    for th in (theta1, theta2):
        dd = abs((phi - th + math.pi) % two_pi - math.pi)
        if dd < ang_tol:
            return 0
    return 1 if d1 < span else 2


def _verdict(adirs, bdirs) -> tuple[str, float]:
    """Kind and the smallest angle between a B branch and an A branch."""
    t1 = math.atan2(adirs[0][1], adirs[0][0])
    t2 = math.atan2(adirs[1][1], adirs[1][0])
    sides = set()
    min_angle = math.pi
    for d in bdirs:
        phi = math.atan2(d[1], d[0])
        sides.add(_side(t1, t2, phi))
        for th in (t1, t2):
            min_angle = min(min_angle, abs((phi - th + math.pi) % (2.0 * math.pi) - math.pi))
    kind = TRANSVERSAL if {1, 2} <= sides else TANGENTIAL
    return kind, min_angle


def classify_with_margin(A, B, T, tol: float) -> tuple[str, float]:
    """Classify the contact at T and return ``(kind, margin)``.

    The margin is eps * sin(smallest branch angle), where eps is half the
    distance from the contact to everything that is not a local branch.
    """
    va, vb = _as_array(A), _as_array(B)
    la, lb = _local(va, T, tol), _local(vb, T, tol)
    c = la.center if la.vertex is not None else lb.center
    eps = 0.5 * min(_eps(va, la, c), _eps(vb, lb, c))
    kind, ang = _verdict(la.dirs, lb.dirs)
    return kind, eps * math.sin(min(ang, 0.5 * math.pi))


def classify_intersection(A, B, T, tol: float) -> str:
    return classify_with_margin(A, B, T, tol)[0]


def _stable_kind(A, B, T, tol: float, kind: str) -> bool:
    t = 0.5 * tol
    while t >= MIN_TOL:
        try:
            if classify_with_margin(A, B, T, t)[0] != kind:
                return False
        except (DomainError, BoundaryAmbiguityError):
            return False
        t *= 0.5
    return True


def polyline_intersections(A, B, tol: float) -> list[IntersectionRecord]:
    """All contacts of A and B at resolution ``tol``, one record per cluster."""
    if tol <= 0:
        raise DomainError("tol must be positive")
    va, vb = _as_array(A), _as_array(B)
    if len(va) < 2 or len(vb) < 2:
        return []
    ii, jj, dd = kernels.segment_pairs_within(va, vb, tol)
    cands = []
    for i, j, d in zip(ii.tolist(), jj.tolist(), dd.tolist()):
        pa, pb = closest_points(va[i], va[i + 1], vb[j], vb[j + 1])
        T = (0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1]))
        near_a = min(math.hypot(va[k, 0] - T[0], va[k, 1] - T[1]) for k in (i, i + 1)) <= 10.0 * tol
        near_b = min(math.hypot(vb[k, 0] - T[0], vb[k, 1] - T[1]) for k in (j, j + 1)) <= 10.0 * tol
        cands.append((d, not (near_a or near_b), i, j, T, near_a, near_b))
    # single-linkage clustering at 10*tol
    n = len(cands)
    parent = list(range(n))

    def find(k):
        while parent[k] != k:
            parent[k] = parent[parent[k]]
            k = parent[k]
        return k

    pts = np.array([c[4] for c in cands]).reshape(-1, 2)
    order = np.argsort(pts[:, 0], kind="stable")
    for s in range(n):
        p = order[s]
        for q in order[s + 1 :]:
            if pts[q, 0] - pts[p, 0] > 10.0 * tol:
                break
            if math.hypot(*(pts[q] - pts[p])) <= 10.0 * tol:
                parent[find(q)] = find(p)
    clusters: dict = {}
    for k in range(n):
        clusters.setdefault(find(k), []).append(k)

    out = []
    for members in clusters.values():
        d, _, i, j, T, near_a, near_b = min((cands[k] for k in members), key=lambda c: (c[1], c[0], c[2], c[3]))
        try:
            kind, margin = classify_with_margin(va, vb, T, tol)
            unstable = margin < 10.0 * tol or not _stable_kind(va, vb, T, tol, kind)
        except BoundaryAmbiguityError:
            kind, margin, unstable = UNDETERMINED, 0.0, True
        out.append(IntersectionRecord(Point(float(T[0]), float(T[1])), kind, near_a, near_b, i, j, tol, unstable, margin))
    out.sort(key=lambda r: (r.seg_a, r.seg_b, r.point))
    return out


def default_tol(*lines) -> float:
    return 1e-9 * max(PolyLine(_as_array(l)).diameter() for l in lines)


def _pairs(depth: int) -> int:
    if depth < 1:
        raise DomainError("depth must be >= 1")
    return (depth + 1) // 2


def homoclinic_on_fundamental(params: Params, depth: int = 8, tol: Optional[float] = None) -> list[IntersectionRecord]:
    """Homoclinic contacts on the straight stable segment from X to V.

    The stable side is [X, V^-1]^s so that V is not an arc terminus; records
    off the segment X->V or within 100*tol of X are dropped.
    """
    U = unstable_arc(params, _pairs(depth))
    S = stable_arc(params, 1)
    if tol is None:
        tol = default_tol(U.line)
    X = fixed_points(params)[0]
    V = point_V(params)
    xv = np.array([X, V], dtype=np.float64)
    keep = []
    for r in polyline_intersections(U.line, S.line, tol):
        if math.hypot(r.point.x - X.x, r.point.y - X.y) <= 100.0 * tol:
            continue
        if float(_seg_dists(xv, r.point)[0]) <= tol:
            keep.append(r)
    return keep


def has_homoclinic(params: Params, depth: int = 8, tol: Optional[float] = None) -> bool:
    return bool(homoclinic_on_fundamental(params, depth, tol))


@dataclass(frozen=True)
class LabelledRecord:
    record: IntersectionRecord
    orbit: str  # "Z-orbit" | "V-orbit" | "Z+V" | "other"
    labels: tuple = ()


@dataclass(frozen=True)
class TangencyReport:
    records: list
    tol: float
    depth: int
    n_other: int = 0
    n_transversal: int = 0
    n_undetermined: int = 0
    n_unstable: int = 0
    all_tangential: bool = True
    on_fundamental: list = field(default_factory=list)


def _orbit_points(params: Params, kmax: int) -> list[tuple[Label, Point]]:
    out = []
    for orbit in ("Z", "V"):
        for k in range(-kmax, kmax + 1):
            lab = Label(orbit, k)
            try:
                out.append((lab, lab.point(params)))
            except DivergenceError:
                continue
    return out


def check_last_tangency(params: Params, depth: int = 8, tol: Optional[float] = None) -> TangencyReport:
    """Every contact of the depth-limited arcs, labelled by the Z/V orbit it sits on."""
    U = unstable_arc(params, _pairs(depth))
    S = stable_arc(params, depth)
    if tol is None:
        tol = default_tol(U.line)
    X = fixed_points(params)[0]
    V = point_V(params)
    xv = np.array([X, V], dtype=np.float64)
    orbit_pts = _orbit_points(params, depth + 4)
    recs, fundamental = [], []
    for r in polyline_intersections(U.line, S.line, tol):
        if math.hypot(r.point.x - X.x, r.point.y - X.y) <= 100.0 * tol:
            continue
        labels = tuple(
            str(lab) for lab, p in orbit_pts if math.hypot(p.x - r.point.x, p.y - r.point.y) <= 10.0 * tol
        )
        orbits = {s[0] for s in labels}
        orbit = {frozenset("Z"): "Z-orbit", frozenset("V"): "V-orbit", frozenset("ZV"): "Z+V"}.get(
            frozenset(orbits), "other"
        )
        lr = LabelledRecord(r, orbit, labels)
        recs.append(lr)
        if float(_seg_dists(xv, r.point)[0]) <= tol:
            fundamental.append(lr)
    n_tr = sum(r.record.kind == TRANSVERSAL for r in recs)
    return TangencyReport(
        records=recs,
        tol=tol,
        depth=depth,
        n_other=sum(r.orbit == "other" for r in recs),
        n_transversal=n_tr,
        n_undetermined=sum(r.record.kind == UNDETERMINED for r in recs),
        n_unstable=sum(r.record.unstable for r in recs),
        all_tangential=n_tr == 0,
        on_fundamental=fundamental,
    )
