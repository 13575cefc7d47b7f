"""Boundary curves of the homoclinic region in the (a, b) plane.

Each curve is the zero set of a signed condition function built from the
orbits of Z and V:

    S(i)  Z^(2i) on the stable segment [V, V^1]
    U(i)  V on the unstable segment [Z^(2i), T], T the vertex after Z^(2i)
    Y(j)  Z^(2j) on the y-axis
    E(j)  Z^(2j) = V

Curves are followed by continuation plus bisection, and corner points where
two conditions hold at once are found by nested bisection.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from importlib import resources
from typing import Callable, NamedTuple, Optional

import numpy as np

from .core import Params, apply, iterate, point_V, point_Z
from .errors import (
    DegenerateParameterError,
    DomainError,
    InsufficientDepthError,
    LoziError,
    NotFoundError,
)
from .intersect import has_homoclinic
from .manifolds import Label, unstable_half

__all__ = [
    "BoundaryCondition",
    "CurveTrace",
    "CurveSpec",
    "AlgebraicCurve",
    "ScanResult",
    "CURVES",
    "ENDPOINTS",
    "condition_value",
    "trace_curve",
    "trace_named",
    "solve_endpoint",
    "solve_named_endpoint",
    "load_table1",
    "load_table2",
    "table1_residual",
    "table1_relative",
    "misiurewicz_check",
    "scan_region",
    "locate_boundary",
    "search_assignment",
    "project_to_curve",
    "sample_point",
]

TAGS = {
    "S": "ZIterOnStableSeg",
    "U": "VOnUnstablePiece",
    "Y": "ZIterOnYAxis",
    "E": "ZIterEqualsV",
}


class BoundaryCondition(NamedTuple):
    tag: str
    i: int

    @classmethod
    def parse(cls, text: str) -> "BoundaryCondition":
        """``"S1"``, ``"U2"``, ``"ZIterOnStableSeg(1)"`` ..."""
        text = text.strip()
        for short, long in TAGS.items():
            if text.startswith(long + "("):
                return cls(long, int(text[len(long) + 1 : -1]))
        if text[:1] in TAGS and text[1:].isdigit():
            return cls(TAGS[text[0]], int(text[1:]))
        raise ValueError(f"unknown condition {text!r}")

    @property
    def short(self) -> str:
        return {v: k for k, v in TAGS.items()}[self.tag] + str(self.i)

    @property
    def min_depth(self) -> int:
        return 2 * self.i + 2 if self.tag == "VOnUnstablePiece" else 2 * self.i

    def __str__(self):
        return f"{self.tag}({self.i})"


def _check(cond: BoundaryCondition) -> None:
    if cond.tag not in TAGS.values():
        raise DomainError(f"unknown condition tag {cond.tag!r}")
    if cond.i < 1:
        raise DomainError("condition index must be >= 1")


def _line_offset(P, A, B):
    """Signed distance of P from line AB (positive to the left of A->B) and
    the projection parameter of P along A->B."""
    dx, dy = B[0] - A[0], B[1] - A[1]
    n = math.hypot(dx, dy)
    cross = (dx * (P[1] - A[1]) - dy * (P[0] - A[0])) / n
    t = ((P[0] - A[0]) * dx + (P[1] - A[1]) * dy) / (n * n)
    return cross, t, n


def _augment(off: float, t: float, n: float) -> float:
    if 0.0 <= t <= 1.0:
        return off
    over = (-t if t < 0.0 else t - 1.0) * n
    return math.copysign(abs(off) + over, off)


def _piece_after(params: Params, i: int):
    """Z^(2i) and the next vertex on the branch towards Z^(2i+2)."""
    g = unstable_half(params, 2 * i + 2)
    for k, lab in g.anchors.items():
        if lab == Label("Z", 2 * i):
            return g.v[k], g.v[k + 1]
    raise InsufficientDepthError(f"Z^{2 * i} not realised")  # pragma: no cover


def condition_value(params: Params, cond: BoundaryCondition, depth: Optional[int] = None, raw: bool = False) -> float:
    """Signed value of a boundary condition; zero exactly where it holds.

    Offsets are measured to the left of the oriented segment (V -> V^1 for
    S(i), Z^(2i) -> T for U(i)); for S(i) that is the side of the origin.

    With ``raw=False`` (the default) a projection falling outside the
    segment adds the overshoot distance, so the value vanishes only when
    the point is on the segment itself.  ``raw=True`` gives the plain line
    offset, which is smooth and is what the endpoint solver uses.
    """
    _check(cond)
    if depth is not None and depth < cond.min_depth:
        raise InsufficientDepthError(f"{cond} needs depth >= {cond.min_depth}, got {depth}")
    V = point_V(params)
    if cond.tag == "ZIterOnStableSeg":
        P = iterate(params, point_Z(params), 2 * cond.i)
        off, t, n = _line_offset(P, V, apply(params, V))
    elif cond.tag == "VOnUnstablePiece":
        A, B = _piece_after(params, cond.i)
        off, t, n = _line_offset(V, A, B)
    elif cond.tag == "ZIterOnYAxis":
        return iterate(params, point_Z(params), 2 * cond.i).x
    else:
        P = iterate(params, point_Z(params), 2 * cond.i)
        return math.copysign(math.hypot(P.x - V.x, P.y - V.y), P.y - V.y)
    return off if raw else _augment(off, t, n)


# -- curve tracing ----------------------------------------------------------


@dataclass
class CurveTrace:
    condition: BoundaryCondition
    samples: list = field(default_factory=list)  # (a, b)
    residuals: list = field(default_factory=list)
    table1_residuals: Optional[list] = None
    end_of_branch: bool = False
    sweep: str = "b"

    def __len__(self):
        return len(self.samples)


def _params(coord: str, v: float, x: float) -> Params:
    return Params(x, v) if coord == "b" else Params(v, x)


def _bisect(f: Callable[[float], float], lo: float, hi: float, flo: float, xtol: float = 1e-13, maxit: int = 200):
    for _ in range(maxit):
        mid = 0.5 * (lo + hi)
        if hi - lo <= xtol * max(1.0, abs(mid)) or mid in (lo, hi):
            break
        fm = f(mid)
        if fm == 0.0:
            return mid
        if (fm < 0.0) == (flo < 0.0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def _safe(f):
    def g(x):
        try:
            return f(x)
        except (DegenerateParameterError, DomainError):
            return math.nan

    return g


def _bracket_near(f, x0: float, w0: float, wmax: float):
    """Smallest symmetric window around x0 (doubling from w0) with a sign change."""
    w = w0
    f0 = f(x0)
    if f0 == 0.0:
        return x0, x0, f0
    while w <= wmax:
        for lo, hi in ((x0 - w, x0), (x0, x0 + w)):
            flo, fhi = f(lo), f(hi)
            if math.isfinite(flo) and math.isfinite(fhi) and flo * fhi <= 0.0:
                return lo, hi, flo
        w *= 2.0
    return None


MAX_STEP = 0.01  # largest continuation step in the swept coordinate


def trace_curve(
    cond: BoundaryCondition,
    sweep: str,
    start: float,
    stop: float,
    step: float,
    bracket: tuple[float, float],
    tol: float = 1e-10,
    depth: Optional[int] = None,
) -> CurveTrace:
    """Follow the zero set of ``cond`` while ``sweep`` ("a" or "b") steps
    from ``start`` to ``stop``; the other coordinate is solved by bisection,
    first inside ``bracket`` and then in a window around the previous sample.
    """
    if sweep not in ("a", "b"):
        raise DomainError("sweep must be 'a' or 'b'")
    if step <= 0:
        raise DomainError("step must be positive")
    _check(cond)
    n = int(math.floor(abs(stop - start) / step + 1e-9))
    direction = 1.0 if stop >= start else -1.0
    values = [start + direction * k * step for k in range(n + 1)]
    if abs(values[-1] - stop) > 1e-12:
        values.append(stop)
    # continuation needs short steps; coarse output spacing is walked in substeps
    marks = set(range(len(values)))
    if step > MAX_STEP:
        fine, marks = [values[0]], {0}
        for u, w in zip(values, values[1:]):
            m = int(math.ceil(abs(w - u) / MAX_STEP))
            fine += [u + (w - u) * j / m for j in range(1, m)] + [w]
            marks.add(len(fine) - 1)
        values = fine
    trace = CurveTrace(cond, sweep=sweep)
    width = abs(bracket[1] - bracket[0])
    prev = None
    for i, v in enumerate(values):
        f = _safe(lambda x, v=v: condition_value(_params(sweep, v, x), cond, depth))
        if prev is None:
            lo, hi = min(bracket), max(bracket)
            flo, fhi = f(lo), f(hi)
            if not (math.isfinite(flo) and math.isfinite(fhi)) or flo * fhi > 0.0:
                raise NotFoundError(f"{cond} has no sign change on {bracket} at {sweep}={v}")
        else:
            found = _bracket_near(f, prev, max(min(step, MAX_STEP), 1e-6), width)
            if found is None:
                trace.end_of_branch = True
                break
            lo, hi, flo = found
        x = _bisect(f, lo, hi, flo)
        r = f(x)
        if not (math.isfinite(r) and abs(r) < tol):
            # the sign change was the jump at a segment end, not a zero
            trace.end_of_branch = True
            break
        prev = x
        if i not in marks:
            continue
        trace.samples.append((x, v) if sweep == "b" else (v, x))
        trace.residuals.append(r)
    return trace


class CurveSpec(NamedTuple):
    name: str
    condition: BoundaryCondition
    sweep: str
    start: float
    stop: float
    bracket: tuple
    sample: Optional[tuple] = None  # a parameter pair on the curve quoted to ~6 digits
    sample_fix: Optional[tuple] = None  # (coordinate, half a unit in its last quoted digit)


# Default assignments.  Sweep ranges run between the curve's corner points;
# C1 starts near its b = 0 end.
CURVES = {
    "C1": CurveSpec("C1", BoundaryCondition.parse("S1"), "b", 0.01, 0.545, (1.40, 1.47), (1.46, 0.332873), ("b", 5e-7)),
    "C2": CurveSpec("C2", BoundaryCondition.parse("U1"), "a", 1.5205, 1.618, (0.54, 0.62), (1.58, 0.587775), ("b", 5e-7)),
    "C3": CurveSpec("C3", BoundaryCondition.parse("S2"), "b", 0.614, 0.911, (1.58, 1.65), (1.56, 0.75378), ("b", 5e-6)),
    "C4": CurveSpec("C4", BoundaryCondition.parse("S2"), "a", 1.5004, 1.4780, (0.905, 0.9112), None),
    "C5": CurveSpec("C5", BoundaryCondition.parse("U2"), "b", 0.9068, 0.9605, (1.46, 1.49), (1.48115, 0.94), ("a", 5e-6)),
    "C6": CurveSpec("C6", BoundaryCondition.parse("S3"), "a", 1.4770, 1.2380, (0.955, 0.965), (1.35, 0.918178), ("b", 5e-7)),
}


def project_to_curve(cond: BoundaryCondition, params: Params, coord: str, halfwidth: float, depth=None) -> Params:
    """The zero of ``cond`` within ``halfwidth`` of ``params`` along ``coord``.

    Used to move a pair quoted to a few digits exactly onto the curve it
    was quoted from; raises NotFoundError when no zero lies in the window.
    """
    if coord not in ("a", "b"):
        raise DomainError("coord must be 'a' or 'b'")
    fixed = params.b if coord == "a" else params.a
    x0 = params.a if coord == "a" else params.b
    mk = (lambda x: Params(x, fixed)) if coord == "a" else (lambda x: Params(fixed, x))  # noqa: E731
    f = _safe(lambda x: condition_value(mk(x), cond, depth, raw=True))
    lo, hi = x0 - halfwidth, x0 + halfwidth
    flo, fhi = f(lo), f(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)) or flo * fhi > 0.0:
        raise NotFoundError(f"{cond} has no zero within {halfwidth:g} of {coord}={x0}")
    return mk(_bisect(f, lo, hi, flo, xtol=1e-16))


def sample_point(name: str, project: bool = True) -> Params:
    """The quoted parameter pair of curve ``name``, optionally projected onto it."""
    spec = CURVES[name]
    if spec.sample is None:
        raise NotFoundError(f"{name} has no quoted parameter pair")
    p = Params(*spec.sample)
    if not project:
        return p
    coord, h = spec.sample_fix
    return project_to_curve(spec.condition, p, coord, h)


class EndpointSpec(NamedTuple):
    name: str
    cond1: BoundaryCondition
    cond2: BoundaryCondition
    box: tuple  # ((a_lo, a_hi), (b_lo, b_hi))
    inner: str = "b"


_P = BoundaryCondition.parse

# cond1 must change sign exactly once along the inner coordinate of the box.
# C3 ends where its S(2) branch folds into C4's, so it is solved along Y(1).
ENDPOINTS = {
    "C1": EndpointSpec("C1", _P("S1"), _P("U1"), ((1.50, 1.54), (0.52, 0.58)), "a"),
    "C2": EndpointSpec("C2", _P("U1"), _P("S2"), ((1.60, 1.64), (0.59, 0.64))),
    "C3": EndpointSpec("C3", _P("Y1"), _P("S2"), ((1.4995, 1.5015), (0.9105, 0.9118)), "a"),
    "C4": EndpointSpec("C4", _P("S2"), _P("Y2"), ((1.46, 1.50), (0.89, 0.93))),
    "C5": EndpointSpec("C5", _P("U2"), _P("S3"), ((1.46, 1.50), (0.94, 0.98)), "a"),
    "C6": EndpointSpec("C6", _P("S3"), _P("U3"), ((1.22, 1.26), (0.90, 0.94))),
}


def trace_named(name: str, step: Optional[float] = None, samples: int = 60, tol: float = 1e-10, **kw) -> CurveTrace:
    spec = CURVES[name]
    if step is None:
        step = abs(spec.stop - spec.start) / (samples - 1)
    t = trace_curve(spec.condition, spec.sweep, spec.start, spec.stop, step, spec.bracket, tol, **kw)
    t.table1_residuals = [table1_relative(int(name[1:]), a, b) for a, b in t.samples] if name in CURVES else None
    return t


# -- corner points ----------------------------------------------------------


def solve_endpoint(
    cond1: BoundaryCondition,
    cond2: BoundaryCondition,
    box: tuple,
    tol: float = 1e-9,
    depth: Optional[int] = None,
    inner: str = "b",
) -> tuple[float, float]:
    """A parameter pair where both conditions hold (raw line offsets).

    For each value of the outer coordinate ``cond1`` is solved for the
    ``inner`` coordinate by bisection; ``cond2`` along that solution is then
    bisected over the outer coordinate.
    """
    (a_lo, a_hi), (b_lo, b_hi) = box
    if inner == "b":
        outer_rng, inner_rng = (a_lo, a_hi), (b_lo, b_hi)
        mk = lambda o, i: Params(o, i)  # noqa: E731
    elif inner == "a":
        outer_rng, inner_rng = (b_lo, b_hi), (a_lo, a_hi)
        mk = lambda o, i: Params(i, o)  # noqa: E731
    else:
        raise DomainError("inner must be 'a' or 'b'")

    def solve_inner(o: float) -> float:
        f = _safe(lambda i: condition_value(mk(o, i), cond1, depth, raw=True))
        lo, hi = inner_rng
        flo, fhi = f(lo), f(hi)
        if not (math.isfinite(flo) and math.isfinite(fhi)) or flo * fhi > 0.0:
            raise NotFoundError(f"{cond1} has no sign change for {'a' if inner == 'b' else 'b'}={o}")
        return _bisect(f, lo, hi, flo, xtol=1e-15)

    def g(o: float) -> float:
        return condition_value(mk(o, solve_inner(o)), cond2, depth, raw=True)

    lo, hi = outer_rng
    glo, ghi = g(lo), g(hi)
    if glo * ghi > 0.0:
        raise NotFoundError(f"{cond2} has no sign change along {cond1} in the box")
    o = _bisect(g, lo, hi, glo, xtol=1e-15)
    i = solve_inner(o)
    p = mk(o, i)
    r1 = condition_value(p, cond1, depth, raw=True)
    r2 = condition_value(p, cond2, depth, raw=True)
    if abs(r1) >= tol or abs(r2) >= tol:
        raise NotFoundError(f"bisection stalled with residuals {r1:.3g}, {r2:.3g}")
    return p.a, p.b


def solve_named_endpoint(name: str, tol: float = 1e-9) -> tuple[float, float]:
    e = ENDPOINTS[name]
    return solve_endpoint(e.cond1, e.cond2, e.box, tol, inner=e.inner)


# -- algebraic forms --------------------------------------------------------


@dataclass(frozen=True)
class AlgebraicCurve:
    """P and Q as tuples indexed [b power][a power] of integer coefficients."""

    n: int
    P: tuple
    Q: tuple

    def evaluate(self, a, b, sqrt: Callable = math.sqrt):
        p, q = _horner2(self.P, a, b), _horner2(self.Q, a, b)
        return p, q, sqrt(a * a + 4 * b)


def _horner(coeffs, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _horner2(rows, a, b):
    acc = 0
    for row in reversed(rows):
        acc = acc * b + _horner(row, a)
    return acc


def load_table1(path=None) -> dict:
    if path is None:
        text = resources.files("lozihom").joinpath("data/table1_coeffs.txt").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    blocks: dict = {}
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    k = 0
    while k < len(lines):
        head = lines[k].split()
        if len(head) != 3 or not head[0].startswith("C") or head[1] not in ("P", "Q"):
            raise ValueError(f"bad block header {lines[k]!r}")
        n, which, deg = int(head[0][1:]), head[1], int(head[2])
        rows = tuple(tuple(int(t) for t in lines[k + 1 + r].split()) for r in range(deg + 1))
        blocks[(n, which)] = rows
        k += deg + 2
    return {n: AlgebraicCurve(n, blocks[(n, "P")], blocks[(n, "Q")]) for n in sorted({n for n, _ in blocks})}


_TABLE1: dict = {}


def _table1():
    if not _TABLE1:
        _TABLE1.update(load_table1())
    return _TABLE1


def table1_residual(n: int, a, b, sqrt: Callable = math.sqrt, table: Optional[dict] = None):
    """P_n(a, b) + Q_n(a, b) sqrt(a^2 + 4b) from the bundled coefficient table.

    Any numeric type works; pass a matching ``sqrt`` for exact arithmetic.
    """
    curve = (table or _table1())[n]
    p, q, s = curve.evaluate(a, b, sqrt)
    return p + q * s


def table1_relative(n: int, a: float, b: float, table: Optional[dict] = None) -> float:
    curve = (table or _table1())[n]
    p, q, s = curve.evaluate(a, b)
    return abs(p + q * s) / (1.0 + abs(p) + abs(q))


def misiurewicz_check(a: float, b: float, relative: bool = False) -> tuple[float, float]:
    """Residuals of the quartic 2a^4 - 4a^2 - 3a^2 b^2 + 4b^3 and of the radical
    form (2a)^2 - (3b^2 + 4 + sqrt((3b^2 + 4)^2 - 32 b^3)).

    With ``relative=True`` each residual is divided by the sum of the absolute
    values of its terms.
    """
    # the radicand is (b - 2)^2 (9 b^2 + 4 b + 4) >= 0
    inner = (3 * b * b + 4) ** 2 - 32 * b**3
    terms = (2 * a**4, -4 * a * a, -3 * a * a * b * b, 4 * b**3)
    quartic = sum(terms)
    root = math.sqrt(max(inner, 0.0))
    radical = 4 * a * a - (3 * b * b + 4 + root)
    if relative:
        quartic /= sum(abs(t) for t in terms)
        radical /= 4 * a * a + 3 * b * b + 4 + root
    return quartic, radical


def load_table2(path=None) -> dict:
    if path is None:
        fh = resources.files("lozihom").joinpath("data/table2_endpoints.csv").open()
    else:
        fh = open(path)
    with fh:
        return {row["curve"]: (float(row["a_n"]), float(row["b_n"])) for row in csv.DictReader(fh)}


# -- region scan ------------------------------------------------------------


@dataclass
class ScanResult:
    a_values: np.ndarray
    b_values: np.ndarray
    cells: list  # cells[j][i] for b_values[j], a_values[i]: True, False or None (unknown)
    errors: dict = field(default_factory=dict)

    def as_array(self) -> np.ndarray:
        """-1 unknown, 0 no homoclinic point, 1 homoclinic point."""
        return np.array([[(-1 if c is None else int(c)) for c in row] for row in self.cells], dtype=np.int8)


def _cell(args):
    a, b, depth, tol = args
    try:
        return has_homoclinic(Params(a, b), depth, tol), None
    except LoziError as e:
        return None, f"{type(e).__name__}: {e}"


def scan_region(
    a_range: tuple,
    b_range: tuple,
    grid: tuple = (40, 40),
    depth: int = 8,
    tol: Optional[float] = None,
    workers: int = 1,
) -> ScanResult:
    """has_homoclinic on a grid; failures are stored as unknown (None) cells."""
    na, nb = grid
    av = np.linspace(a_range[0], a_range[1], na)
    bv = np.linspace(b_range[0], b_range[1], nb)
    jobs = [(float(a), float(b), depth, tol) for b in bv for a in av]
    if workers > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(workers) as ex:
            res = list(ex.map(_cell, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        res = [_cell(j) for j in jobs]
    cells, errors = [], {}
    for j in range(nb):
        row = []
        for i in range(na):
            val, err = res[j * na + i]
            row.append(val)
            if err:
                errors[(j, i)] = err
        cells.append(row)
    return ScanResult(av, bv, cells, errors)


def locate_boundary(
    fixed: str, value: float, lo: float, hi: float, depth: int = 8, tol: Optional[float] = None, iters: int = 40
) -> float:
    """Bisect has_homoclinic along a ray (``fixed`` coordinate held at ``value``)."""
    mk = (lambda x: Params(x, value)) if fixed == "b" else (lambda x: Params(value, x))
    hlo, hhi = has_homoclinic(mk(lo), depth, tol), has_homoclinic(mk(hi), depth, tol)
    if hlo == hhi:
        raise NotFoundError("has_homoclinic does not change along the ray")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if has_homoclinic(mk(mid), depth, tol) == hlo:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def search_assignment(params: Params, imax: int = 6) -> tuple[BoundaryCondition, float]:
    """The condition (all families, index <= imax) with the smallest |value|."""
    best = None
    for tag in TAGS.values():
        for i in range(1, imax + 1):
            c = BoundaryCondition(tag, i)
            try:
                v = condition_value(params, c)
            except LoziError:
                continue
            if best is None or abs(v) < abs(best[1]):
                best = (c, v)
    if best is None:
        raise NotFoundError("no condition could be evaluated")
    return best
