# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled versions of the kernels in ``_fallback.py`` (same contracts)."""
import numpy as np
cimport numpy as cnp
from libc.math cimport fabs, sqrt, fmin, fmax

cnp.import_array()

cdef double SNAP = 1e-14


cdef inline int _snap(const double[:, ::1] v, Py_ssize_t k, double t) nogil:
    # 1: crossing merges into v[k], 2: into v[k + 1], 0: a new vertex
    cdef double dx = v[k + 1, 0] - v[k, 0], dy = v[k + 1, 1] - v[k, 1]
    cdef double seg = sqrt(dx * dx + dy * dy)
    if t * seg <= SNAP * fmax(1.0, sqrt(v[k, 0] * v[k, 0] + v[k, 1] * v[k, 1])):
        return 1
    if (1.0 - t) * seg <= SNAP * fmax(1.0, sqrt(v[k + 1, 0] * v[k + 1, 0] + v[k + 1, 1] * v[k + 1, 1])):
        return 2
    return 0


def split_and_map(const double[:, ::1] v, double a, double b, bint forward):
    cdef Py_ssize_t n = v.shape[0], k, m = 0, n_ins = 0
    cdef int idx = 0 if forward else 1
    cdef double c0, c1, t, x, y, xn
    for k in range(n - 1):
        c0 = v[k, idx]
        c1 = v[k + 1, idx]
        if c0 * c1 < 0.0:
            t = c0 / (c0 - c1)
            if _snap(v, k, t) == 0:
                n_ins += 1

    dom_a = np.empty((n + n_ins, 2))
    src_a = np.full(n + n_ins, -1, dtype=np.int64)
    brk_a = np.zeros(n + n_ins, dtype=np.uint8)
    cdef double[:, ::1] dom = dom_a
    cdef long long[::1] src = src_a
    cdef unsigned char[::1] brk = brk_a
    cdef unsigned char snap_next = 0
    cdef int snap

    for k in range(n):
        dom[m, 0] = v[k, 0]
        dom[m, 1] = v[k, 1]
        src[m] = k
        brk[m] = 1 if (v[k, idx] == 0.0 or snap_next) else 0
        snap_next = 0
        m += 1
        if k + 1 < n:
            c0 = v[k, idx]
            c1 = v[k + 1, idx]
            if c0 * c1 < 0.0:
                t = c0 / (c0 - c1)
                snap = _snap(v, k, t)
                if snap == 1:
                    brk[m - 1] = 1
                elif snap == 2:
                    snap_next = 1
                else:
                    dom[m, 0] = v[k, 0] + t * (v[k + 1, 0] - v[k, 0])
                    dom[m, 1] = v[k, 1] + t * (v[k + 1, 1] - v[k, 1])
                    dom[m, idx] = 0.0
                    brk[m] = 1
                    m += 1

    out_a = np.empty((m, 2))
    cdef double[:, ::1] out = out_a
    for k in range(m):
        x = dom[k, 0]
        y = dom[k, 1]
        if forward:
            out[k, 0] = 1.0 + y - a * fabs(x)
            out[k, 1] = b * x
        else:
            xn = y / b
            out[k, 0] = xn
            out[k, 1] = x - 1.0 + a * fabs(xn)
    return out_a, src_a, brk_a.astype(bool)


cdef inline double _pt_seg2(double px, double py, double ax, double ay, double bx, double by) nogil:
    # measured from the nearer end so long segments keep absolute accuracy
    cdef double dx = bx - ax, dy = by - ay
    cdef double ll = dx * dx + dy * dy, t = 0.0, qx, qy
    if ll > 0:
        t = ((px - ax) * dx + (py - ay) * dy) / ll
    if t > 0.5:
        t = ((px - bx) * -dx + (py - by) * -dy) / ll
        if t < 0.0:
            t = 0.0
        qx = bx - t * dx - px
        qy = by - t * dy - py
    else:
        if t < 0.0:
            t = 0.0
        qx = ax + t * dx - px
        qy = ay + t * dy - py
    return qx * qx + qy * qy


cdef inline double _orient(double ax, double ay, double bx, double by, double cx, double cy) nogil:
    return (bx - ax) * (cy - ay) - (by - ay) * (cx - ax)


cdef double _seg_dist(double p0x, double p0y, double p1x, double p1y,
                      double q0x, double q0y, double q1x, double q1y) nogil:
    cdef double o1 = _orient(p0x, p0y, p1x, p1y, q0x, q0y)
    cdef double o2 = _orient(p0x, p0y, p1x, p1y, q1x, q1y)
    cdef double o3 = _orient(q0x, q0y, q1x, q1y, p0x, p0y)
    cdef double o4 = _orient(q0x, q0y, q1x, q1y, p1x, p1y)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return 0.0
    cdef double d = _pt_seg2(q0x, q0y, p0x, p0y, p1x, p1y)
    d = fmin(d, _pt_seg2(q1x, q1y, p0x, p0y, p1x, p1y))
    d = fmin(d, _pt_seg2(p0x, p0y, q0x, q0y, q1x, q1y))
    d = fmin(d, _pt_seg2(p1x, p1y, q0x, q0y, q1x, q1y))
    return sqrt(d)


def segment_pairs_within(const double[:, ::1] A, const double[:, ::1] B, double tol):
    cdef Py_ssize_t na = A.shape[0] - 1, nb = B.shape[0] - 1, i, j
    if na < 1 or nb < 1:
        e = np.empty(0, dtype=np.int64)
        return e, e.copy(), np.empty(0)
    blo_a = np.empty((nb, 2))
    bhi_a = np.empty((nb, 2))
    cdef double[:, ::1] blo = blo_a
    cdef double[:, ::1] bhi = bhi_a
    for j in range(nb):
        blo[j, 0] = fmin(B[j, 0], B[j + 1, 0])
        blo[j, 1] = fmin(B[j, 1], B[j + 1, 1])
        bhi[j, 0] = fmax(B[j, 0], B[j + 1, 0])
        bhi[j, 1] = fmax(B[j, 1], B[j + 1, 1])
    cdef double alox, aloy, ahix, ahiy, d
    res_i, res_j, res_d = [], [], []
    for i in range(na):
        alox = fmin(A[i, 0], A[i + 1, 0]) - tol
        aloy = fmin(A[i, 1], A[i + 1, 1]) - tol
        ahix = fmax(A[i, 0], A[i + 1, 0]) + tol
        ahiy = fmax(A[i, 1], A[i + 1, 1]) + tol
        for j in range(nb):
            if alox > bhi[j, 0] or ahix < blo[j, 0] or aloy > bhi[j, 1] or ahiy < blo[j, 1]:
                continue
            d = _seg_dist(A[i, 0], A[i, 1], A[i + 1, 0], A[i + 1, 1],
                          B[j, 0], B[j, 1], B[j + 1, 0], B[j + 1, 1])
            if d <= tol:
                res_i.append(i)
                res_j.append(j)
                res_d.append(d)
    return (np.asarray(res_i, dtype=np.int64), np.asarray(res_j, dtype=np.int64),
            np.asarray(res_d, dtype=np.float64))
