# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot kernels; see ``_kernels_py.py`` for the reference semantics."""

import numpy as np
cimport numpy as cnp
from libc.math cimport sin, cos, tan, asin, acos, atan2, sqrt, hypot, fmod, floor, INFINITY, M_PI

cnp.import_array()

ARC_COLS = 12


def arc_support(theta, arcs):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] th = np.ascontiguousarray(theta, dtype=np.float64).ravel()
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.ascontiguousarray(arcs, dtype=np.float64)
    cdef Py_ssize_t nt = th.shape[0], na = A.shape[0], i, j, k
    cdef cnp.ndarray[cnp.float64_t, ndim=1] g = np.empty(nt)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] dg = np.zeros(nt)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] which = np.full(nt, -1, dtype=np.int64)
    cdef cnp.ndarray[cnp.int64_t, ndim=1] where = np.zeros(nt, dtype=np.int64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] psib = np.zeros(nt)
    cdef double ct, st, cr, sr, a0, a1, a2, b0, b1, b2, al, be, ga, r, phi0, dq
    cdef double psi, off, cp, sp, den, num, val, best, px, py, rho, psi0, ext
    cdef double cands[4]
    cdef int locs[4]
    cdef bint valid[4]
    cdef double twopi = 2.0 * M_PI
    for i in range(nt):
        ct = cos(th[i])
        st = sin(th[i])
        best = -INFINITY
        for j in range(na):
            rho = A[j, 9]
            psi0 = A[j, 10]
            ext = A[j, 11]
            cr = cos(rho)
            sr = sin(rho)
            a0 = cr * (A[j, 0] * ct + A[j, 1] * st)
            a1 = sr * (A[j, 3] * ct + A[j, 4] * st)
            a2 = sr * (A[j, 6] * ct + A[j, 7] * st)
            b0 = cr * A[j, 2]
            b1 = sr * A[j, 5]
            b2 = sr * A[j, 8]
            al = a0 * b1 - a1 * b0
            be = a2 * b0 - a0 * b2
            ga = a2 * b1 - a1 * b2
            r = hypot(al, be)
            cands[0] = psi0
            valid[0] = True
            locs[0] = -1
            cands[1] = psi0 + ext
            valid[1] = True
            locs[1] = 1
            valid[2] = False
            valid[3] = False
            if r > 0 and (ga <= r and -ga <= r):
                phi0 = atan2(al, be)
                dq = -ga / r
                if dq > 1.0:
                    dq = 1.0
                elif dq < -1.0:
                    dq = -1.0
                dq = acos(dq)
                for k in range(2):
                    psi = phi0 + dq if k == 0 else phi0 - dq
                    off = fmod(psi - psi0, twopi)
                    if off < 0:
                        off += twopi
                    cands[2 + k] = psi0 + off
                    valid[2 + k] = off <= ext
                    locs[2 + k] = 0
            for k in range(4):
                if not valid[k]:
                    continue
                psi = cands[k]
                cp = cos(psi)
                sp = sin(psi)
                den = b0 + b1 * cp + b2 * sp
                if den <= 0:
                    continue
                num = a0 + a1 * cp + a2 * sp
                val = num / den
                if val > best:
                    best = val
                    px = cr * A[j, 0] + sr * (cp * A[j, 3] + sp * A[j, 6])
                    py = cr * A[j, 1] + sr * (cp * A[j, 4] + sp * A[j, 7])
                    dg[i] = (-px * st + py * ct) / den
                    which[i] = j
                    where[i] = locs[k]
                    psib[i] = psi
        g[i] = best
    return g, dg, which, psib, where


cdef inline void _rhs(double* y, double u, double lam0, double lam1, bint adjoint, double* out) nogil:
    cdef double x1 = y[0], x2 = y[1]
    cdef double q = 1.0 + x1 * x1
    cdef double s2 = q + x2 * x2
    cdef double s = sqrt(s2)
    cdef double r = s / q
    cdef double w = (s2 / q) * sqrt(s2 / q)
    cdef double m
    out[0] = x2
    out[1] = u * w - x1
    out[4] = 1.0 - r
    out[5] = u * r
    if adjoint:
        m = lam0 + lam1 * u
        out[2] = y[3] * (1.0 + 3.0 * u * x1 * x2 * x2 * s / (q * q * sqrt(q))) + x1 * m * (q + 2.0 * x2 * x2) / (q * q * s)
        out[3] = -y[2] - y[3] * 3.0 * u * x2 * s / (q * sqrt(q)) - x2 * m / (q * s)
    else:
        out[2] = 0.0
        out[3] = 0.0


cdef inline void _step(double* y, double u, double lam0, double lam1, bint adjoint, double h) nogil:
    cdef double k1[6]
    cdef double k2[6]
    cdef double k3[6]
    cdef double k4[6]
    cdef double tmp[6]
    cdef int i
    _rhs(y, u, lam0, lam1, adjoint, k1)
    for i in range(6):
        tmp[i] = y[i] + 0.5 * h * k1[i]
    _rhs(tmp, u, lam0, lam1, adjoint, k2)
    for i in range(6):
        tmp[i] = y[i] + 0.5 * h * k2[i]
    _rhs(tmp, u, lam0, lam1, adjoint, k3)
    for i in range(6):
        tmp[i] = y[i] + h * k3[i]
    _rhs(tmp, u, lam0, lam1, adjoint, k4)
    for i in range(6):
        y[i] = y[i] + (h / 6.0) * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


def rk4_step(y, double u, double lam0, double lam1, bint adjoint, double h):
    cdef double buf[6]
    cdef int i
    for i in range(6):
        buf[i] = y[i]
    _step(buf, u, lam0, lam1, adjoint, h)
    return np.array([buf[i] for i in range(6)])


def integrate(y0, breaks, values, double lam0, double lam1, bint adjoint, Py_ssize_t n_steps, bint record):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] br = np.ascontiguousarray(breaks, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=1] vals = np.ascontiguousarray(values, dtype=np.float64)
    cdef double y[6]
    cdef int i
    cdef Py_ssize_t seg_i, k, step, node = 0, total_nodes
    cdef double a, b, seg, hh, u
    cdef double h = (br[br.shape[0] - 1] - br[0]) / n_steps
    cdef cnp.ndarray[cnp.float64_t, ndim=1] ts
    cdef cnp.ndarray[cnp.float64_t, ndim=2] ys
    cdef cnp.ndarray[cnp.float64_t, ndim=1] us
    for i in range(6):
        y[i] = y0[i]
    total_nodes = 1
    for seg_i in range(vals.shape[0]):
        seg = br[seg_i + 1] - br[seg_i]
        if seg > 0:
            k = <Py_ssize_t> floor(seg / h + 0.5)
            total_nodes += k if k > 1 else 1
    if record:
        ts = np.empty(total_nodes)
        ys = np.empty((total_nodes, 6))
        us = np.empty(total_nodes)
        ts[0] = br[0]
        for i in range(6):
            ys[0, i] = y[i]
        us[0] = vals[0] if vals.shape[0] > 0 else 0.0
    for seg_i in range(vals.shape[0]):
        a = br[seg_i]
        b = br[seg_i + 1]
        seg = b - a
        if seg <= 0:
            continue
        k = <Py_ssize_t> floor(seg / h + 0.5)
        if k < 1:
            k = 1
        hh = seg / k
        u = vals[seg_i]
        for step in range(k):
            _step(y, u, lam0, lam1, adjoint, hh)
            if record:
                node += 1
                ts[node] = a + (step + 1) * hh
                for i in range(6):
                    ys[node, i] = y[i]
                us[node] = u
    out = np.array([y[i] for i in range(6)])
    if record:
        return out, ts, ys, us
    return out, None, None, None


def polygon_measure(V, double rho):
    cdef cnp.ndarray[cnp.float64_t, ndim=2] P = np.ascontiguousarray(V, dtype=np.float64)
    cdef Py_ssize_t n = P.shape[0], i, ip, im
    cdef cnp.ndarray[cnp.float64_t, ndim=1] turning = np.empty(n)
    cdef double[:] dl = np.empty(n)
    cdef double sr = sin(rho), tr = tan(rho)
    cdef double lam = 1.0 / tr
    cdef double psisum = 0.0, turnsum = 0.0, cx, cy, cz, dot, di, s, t
    cdef double tin[3]
    cdef double tout[3]
    cdef double nin, nout, ext, det
    cdef bint ok = True
    for i in range(n):
        ip = (i + 1) % n
        cx = P[i, 1] * P[ip, 2] - P[i, 2] * P[ip, 1]
        cy = P[i, 2] * P[ip, 0] - P[i, 0] * P[ip, 2]
        cz = P[i, 0] * P[ip, 1] - P[i, 1] * P[ip, 0]
        dot = P[i, 0] * P[ip, 0] + P[i, 1] * P[ip, 1] + P[i, 2] * P[ip, 2]
        di = atan2(sqrt(cx * cx + cy * cy + cz * cz), dot)
        s = sin(di / 2) / sr
        if s > 1.0:
            ok = False
            s = 1.0
        psisum += asin(s)
        t = tan(di / 2) / tr
        if t > 1.0:
            t = 1.0
        dl[i] = asin(t)
    for i in range(n):
        im = (i - 1 + n) % n
        ip = (i + 1) % n
        dot = P[im, 0] * P[i, 0] + P[im, 1] * P[i, 1] + P[im, 2] * P[i, 2]
        tin[0] = -(P[im, 0] - dot * P[i, 0])
        tin[1] = -(P[im, 1] - dot * P[i, 1])
        tin[2] = -(P[im, 2] - dot * P[i, 2])
        dot = P[ip, 0] * P[i, 0] + P[ip, 1] * P[i, 1] + P[ip, 2] * P[i, 2]
        tout[0] = P[ip, 0] - dot * P[i, 0]
        tout[1] = P[ip, 1] - dot * P[i, 1]
        tout[2] = P[ip, 2] - dot * P[i, 2]
        nin = sqrt(tin[0] * tin[0] + tin[1] * tin[1] + tin[2] * tin[2])
        nout = sqrt(tout[0] * tout[0] + tout[1] * tout[1] + tout[2] * tout[2])
        cx = tin[1] * tout[2] - tin[2] * tout[1]
        cy = tin[2] * tout[0] - tin[0] * tout[2]
        cz = tin[0] * tout[1] - tin[1] * tout[0]
        det = (P[i, 0] * cx + P[i, 1] * cy + P[i, 2] * cz) / (nin * nout)
        dot = (tin[0] * tout[0] + tin[1] * tout[1] + tin[2] * tout[2]) / (nin * nout)
        ext = atan2(det, dot)
        turning[i] = ext - dl[im] - dl[i]
        turnsum += turning[i]
    length = 2.0 * sr * psisum
    area = 2.0 * M_PI - lam * length - turnsum
    return length, area, turning, ok
