"""Pure numpy implementations of the hot kernels.

These mirror ``_kernels.pyx`` exactly and are used when the compiled
extension is unavailable (or when ``LOZIHOM_PURE=1``).
"""
import numpy as np

SNAP = 1e-14


def split_and_map(v, a, b, forward):
    n = len(v)
    idx = 0 if forward else 1
    c = v[:, idx]
    on_break = c == 0.0
    if n >= 2:
        c0, c1 = c[:-1], c[1:]
        cross = c0 * c1 < 0.0
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(cross, c0 / (c0 - c1), 0.0)
        # merge a crossing into an endpoint only if it is that close in absolute terms
        dx, dy = v[1:, 0] - v[:-1, 0], v[1:, 1] - v[:-1, 1]
        seg = np.sqrt(dx * dx + dy * dy)
        mag = np.maximum(1.0, np.sqrt(v[:, 0] * v[:, 0] + v[:, 1] * v[:, 1]))
        lo = cross & (t * seg <= SNAP * mag[:-1])
        hi = cross & ~lo & ((1.0 - t) * seg <= SNAP * mag[1:])
        on_break[:-1] |= lo
        on_break[1:] |= hi
        ins = cross & ~lo & ~hi
    else:
        ins = np.zeros(0, dtype=bool)
        t = np.zeros(0)

    n_ins = int(ins.sum())
    shift = np.zeros(n, dtype=np.int64)
    if n >= 2:
        shift[1:] = np.cumsum(ins)
    pos_v = np.arange(n) + shift

    dom = np.empty((n + n_ins, 2))
    src = np.full(n + n_ins, -1, dtype=np.int64)
    brk = np.zeros(n + n_ins, dtype=bool)
    dom[pos_v] = v
    src[pos_v] = np.arange(n)
    brk[pos_v] = on_break
    if n_ins:
        k = np.flatnonzero(ins)
        p = v[k] + t[k, None] * (v[k + 1] - v[k])
        p[:, idx] = 0.0
        pos_i = pos_v[k] + 1
        dom[pos_i] = p
        brk[pos_i] = True

    out = np.empty_like(dom)
    x, y = dom[:, 0], dom[:, 1]
    if forward:
        out[:, 0] = 1.0 + y - a * np.abs(x)
        out[:, 1] = b * x
    else:
        xn = y / b
        out[:, 0] = xn
        out[:, 1] = x - 1.0 + a * np.abs(xn)
    return out, src, brk


def _seg_point_dist2(px, py, ax, ay, bx, by):
    # measured from the nearer end so long segments keep absolute accuracy
    dx, dy = bx - ax, by - ay
    ll = dx * dx + dy * dy
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(ll > 0, ((px - ax) * dx + (py - ay) * dy) / ll, 0.0)
        far = t > 0.5
        t2 = np.maximum(np.where(far, ((px - bx) * -dx + (py - by) * -dy) / ll, 0.0), 0.0)
    t = np.maximum(t, 0.0)
    qx = np.where(far, bx - t2 * dx - px, ax + t * dx - px)
    qy = np.where(far, by - t2 * dy - py, ay + t * dy - py)
    return qx * qx + qy * qy


def segment_pairs_within(A, B, tol, chunk=2048):
    """All (i, j) with dist(segment A_i, segment B_j) <= tol.

    Returns ``(i, j, d)`` integer/float arrays sorted by (i, j).
    """
    if len(A) < 2 or len(B) < 2:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), np.empty(0)
    a0, a1 = A[:-1], A[1:]
    b0, b1 = B[:-1], B[1:]
    alo = np.minimum(a0, a1) - tol
    ahi = np.maximum(a0, a1) + tol
    blo = np.minimum(b0, b1)
    bhi = np.maximum(b0, b1)
    out_i, out_j, out_d = [], [], []
    for s in range(0, len(a0), chunk):
        e = slice(s, s + chunk)
        m = (
            (alo[e, None, 0] <= bhi[None, :, 0])
            & (ahi[e, None, 0] >= blo[None, :, 0])
            & (alo[e, None, 1] <= bhi[None, :, 1])
            & (ahi[e, None, 1] >= blo[None, :, 1])
        )
        ii, jj = np.nonzero(m)
        if len(ii) == 0:
            continue
        ii = ii + s
        d = _segment_dist(a0[ii], a1[ii], b0[jj], b1[jj])
        keep = d <= tol
        out_i.append(ii[keep])
        out_j.append(jj[keep])
        out_d.append(d[keep])
    if not out_i:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), np.empty(0)
    i, j, d = np.concatenate(out_i), np.concatenate(out_j), np.concatenate(out_d)
    order = np.lexsort((j, i))
    return i[order].astype(np.int64), j[order].astype(np.int64), d[order]


def _segment_dist(p0, p1, q0, q1):
    def orient(a, b, c):
        return (b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1]) - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0])

    o1, o2 = orient(p0, p1, q0), orient(p0, p1, q1)
    o3, o4 = orient(q0, q1, p0), orient(q0, q1, p1)
    proper = (o1 * o2 < 0) & (o3 * o4 < 0)
    d2 = np.minimum.reduce(
        [
            _seg_point_dist2(q0[:, 0], q0[:, 1], p0[:, 0], p0[:, 1], p1[:, 0], p1[:, 1]),
            _seg_point_dist2(q1[:, 0], q1[:, 1], p0[:, 0], p0[:, 1], p1[:, 0], p1[:, 1]),
            _seg_point_dist2(p0[:, 0], p0[:, 1], q0[:, 0], q0[:, 1], q1[:, 0], q1[:, 1]),
            _seg_point_dist2(p1[:, 0], p1[:, 1], q0[:, 0], q0[:, 1], q1[:, 0], q1[:, 1]),
        ]
    )
    return np.where(proper, 0.0, np.sqrt(d2))
