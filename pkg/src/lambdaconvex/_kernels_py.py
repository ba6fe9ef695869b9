"""Pure-Python reference implementation of the hot kernels.

Selected by :mod:`lambdaconvex._backend` when the compiled extension is not
available.  Semantics must match ``_kernels.pyx`` exactly; the benchmark and
``tests/test_kernels.py`` compare the two.

Unit sphere throughout (k1 = 1).
"""

import math

import numpy as np

# column layout of the packed arc table
# cx cy cz | e1x e1y e1z | e2x e2y e2z | rho | psi0 | extent
ARC_COLS = 12


def arc_support(theta, arcs):
    """Exact gnomonic support of a union of circular arcs.

    For each direction theta returns g = max_P (P.n)/(P.z) over all arc points
    P, with n = (cos theta, sin theta, 0), its derivative g' = (P*.n_perp)/(P*.z)
    at the maximiser P*, the index of the winning arc, the maximiser's angle
    on that arc, and where it sits (0 interior, -1 start, +1 end).
    """
    theta = np.asarray(theta, dtype=float)
    arcs = np.asarray(arcs, dtype=float)
    nt = theta.size
    g = np.full(nt, -np.inf)
    dg = np.zeros(nt)
    which = np.full(nt, -1, dtype=np.int64)
    where = np.zeros(nt, dtype=np.int64)
    psi_best = np.zeros(nt)
    ct, st = np.cos(theta), np.sin(theta)
    for j in range(arcs.shape[0]):
        c, e1, e2 = arcs[j, 0:3], arcs[j, 3:6], arcs[j, 6:9]
        rho, psi0, ext = arcs[j, 9], arcs[j, 10], arcs[j, 11]
        cr, sr = math.cos(rho), math.sin(rho)
        a0 = cr * (c[0] * ct + c[1] * st)
        a1 = sr * (e1[0] * ct + e1[1] * st)
        a2 = sr * (e2[0] * ct + e2[1] * st)
        b0, b1, b2 = cr * c[2], sr * e1[2], sr * e2[2]
        al = a0 * b1 - a1 * b0
        be = a2 * b0 - a0 * b2
        ga = a2 * b1 - a1 * b2
        r = np.hypot(al, be)
        phi0 = np.arctan2(al, be)
        with np.errstate(invalid="ignore", divide="ignore"):
            q = np.clip(-ga / np.where(r > 0, r, 1.0), -1.0, 1.0)
        ok = (r > 0) & (np.abs(ga) <= r)
        dq = np.arccos(q)
        cands = [
            (np.full(nt, psi0), np.ones(nt, bool), -1),
            (np.full(nt, psi0 + ext), np.ones(nt, bool), 1),
        ]
        for sgn in (1.0, -1.0):
            psi = phi0 + sgn * dq
            off = np.mod(psi - psi0, 2 * math.pi)
            cands.append((psi0 + off, ok & (off <= ext), 0))
        for psi, valid, loc in cands:
            cp, sp = np.cos(psi), np.sin(psi)
            den = b0 + b1 * cp + b2 * sp
            num = a0 + a1 * cp + a2 * sp
            good = valid & (den > 0)
            val = np.where(good, num / np.where(good, den, 1.0), -np.inf)
            better = val > g
            if not better.any():
                continue
            px = cr * c[0] + sr * (cp * e1[0] + sp * e2[0])
            py = cr * c[1] + sr * (cp * e1[1] + sp * e2[1])
            deriv = (-px * st + py * ct) / np.where(good, den, 1.0)
            g = np.where(better, val, g)
            dg = np.where(better, deriv, dg)
            which = np.where(better, j, which)
            where = np.where(better, loc, where)
            psi_best = np.where(better, psi, psi_best)
    return g, dg, which, psi_best, where


def _rhs(y, u, lam0, lam1, adjoint, out):
    x1, x2 = y[0], y[1]
    q = 1.0 + x1 * x1
    s2 = q + x2 * x2
    s = math.sqrt(s2)
    r = s / q
    w = (s2 / q) ** 1.5
    out[0] = x2
    out[1] = u * w - x1
    out[4] = 1.0 - r
    out[5] = u * r
    if adjoint:
        p1, p2 = y[2], y[3]
        m = lam0 + lam1 * u
        out[2] = p2 * (1.0 + 3.0 * u * x1 * x2 * x2 * s / q**2.5) + x1 * m * (q + 2.0 * x2 * x2) / (q * q * s)
        out[3] = -p1 - p2 * 3.0 * u * x2 * s / q**1.5 - x2 * m / (q * s)
    else:
        out[2] = 0.0
        out[3] = 0.0


def rk4_step(y, u, lam0, lam1, adjoint, h):
    k1 = np.zeros(6)
    k2 = np.zeros(6)
    k3 = np.zeros(6)
    k4 = np.zeros(6)
    _rhs(y, u, lam0, lam1, adjoint, k1)
    _rhs(y + 0.5 * h * k1, u, lam0, lam1, adjoint, k2)
    _rhs(y + 0.5 * h * k2, u, lam0, lam1, adjoint, k3)
    _rhs(y + h * k3, u, lam0, lam1, adjoint, k4)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def integrate(y0, breaks, values, lam0, lam1, adjoint, n_steps, record):
    """Fixed-step RK4 over [breaks[0], breaks[-1]] with piecewise-constant control.

    ``values[i]`` is the control on [breaks[i], breaks[i+1]].  Each piece gets
    round(length / h) >= 1 equal steps, h = total / n_steps, so every switch
    falls on a node.  Returns the final 6-vector and, if ``record``, the node
    times, states and per-node control.
    """
    y = np.array(y0, dtype=float)
    breaks = np.asarray(breaks, dtype=float)
    total = breaks[-1] - breaks[0]
    h = total / n_steps
    ts, ys, us = [breaks[0]], [y.copy()], [values[0] if len(values) else 0.0]
    for i in range(len(values)):
        a, b = breaks[i], breaks[i + 1]
        seg = b - a
        if seg <= 0:
            continue
        k = max(1, int(math.floor(seg / h + 0.5)))
        hh = seg / k
        u = float(values[i])
        for step in range(k):
            y = rk4_step(y, u, lam0, lam1, adjoint, hh)
            if record:
                ts.append(a + (step + 1) * hh)
                ys.append(y.copy())
                us.append(u)
    if record:
        return y, np.array(ts), np.array(ys), np.array(us)
    return y, None, None, None


def polygon_measure(V, rho):
    """Length, area and turning angles of the lambda-polygon on vertices ``V``.

    Consecutive vertices are joined by the minor arc of radius ``rho`` bulging
    to the right of the chord (outward for a counterclockwise polygon).
    Returns (length, area, turning, ok); ``ok`` is False if a chord exceeds
    the circle's diameter.
    """
    V = np.asarray(V, dtype=float)
    n = V.shape[0]
    sr, tr = math.sin(rho), math.tan(rho)
    lam = 1.0 / tr
    d = np.empty(n)
    psi = np.empty(n)
    dl = np.empty(n)
    ok = True
    for i in range(n):
        p, q = V[i], V[(i + 1) % n]
        cr = np.cross(p, q)
        di = math.atan2(math.sqrt(cr @ cr), float(p @ q))
        d[i] = di
        s = math.sin(di / 2) / sr
        if s > 1.0:
            ok = False
            s = 1.0
        psi[i] = math.asin(s)
        dl[i] = math.asin(min(1.0, math.tan(di / 2) / tr))
    turning = np.empty(n)
    for i in range(n):
        v = V[i]
        a = V[(i - 1) % n]
        b = V[(i + 1) % n]
        tin = -(a - (a @ v) * v)
        tout = b - (b @ v) * v
        tin /= math.sqrt(tin @ tin)
        tout /= math.sqrt(tout @ tout)
        ext = math.atan2(float(v @ np.cross(tin, tout)), float(tin @ tout))
        turning[i] = ext - dl[i - 1] - dl[i]
    length = 2.0 * sr * psi.sum()
    area = 2.0 * math.pi - lam * length - turning.sum()
    return length, area, turning, ok
