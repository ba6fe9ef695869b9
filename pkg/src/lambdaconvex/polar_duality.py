"""Polar duality of spherical convex curves.

The polar image of a curve is the set of outward unit normals of its
supporting geodesics.  It lies in the hemisphere opposite the curve, so it is
carried back to the same chart by the antipodal map: the dual point of the
support direction theta is -nu(theta), at polar coordinates
(pi/2 - h(theta), theta + pi).  With that convention the double dual is the
identity.

In gnomonic coordinates the reflected dual is the reflected Euclidean polar
body, so its contact radius is g*(phi) = 1 / r(phi + pi), r being the radial
function of the curve's projection.
"""

from __future__ import annotations

import math

import numpy as np

from .curve_model import (
    ArcPolygon,
    ArcSupport,
    MeasureReport,
    SupportCurve,
    _kinks,
    arcs_from_circles,
    support_from_arcs,
    support_from_function,
)
from .errors import ConvexityError, DomainError
from .sphere_core import TWO_PI, UNIT, Metric

_PIECE_TOL = 1e-13


def dual_polygon(poly: ArcPolygon) -> ArcPolygon:
    """Exact polar dual of an arc polygon.

    An arc of radius rho about c becomes an arc of radius pi/2 - rho about the
    same centre, rotated half a turn; a corner P with jump angle phi becomes a
    geodesic segment (radius pi/2 about P) of extent phi.  Geodesic segments
    become corners and drop out.
    """
    tab = poly.table()
    starts, ends = poly.endpoints()
    turning = poly.turning_angles()
    n = tab.shape[0]
    pieces = []
    for j in range(n):
        c, rho, ext = tab[j, 0:3], tab[j, 9], tab[j, 11]
        if ext > _PIECE_TOL and math.pi / 2 - rho > _PIECE_TOL:
            nu0 = poly._normal(j, tab[j, 10])
            pieces.append((c, math.pi / 2 - rho, -nu0, ext))
        if turning[j] > _PIECE_TOL:
            nu_in = poly._normal(j, tab[j, 10] + ext)
            pieces.append((ends[j], math.pi / 2, -nu_in, turning[j]))
    if not pieces:
        raise ConvexityError("degenerate polygon has no dual")
    k1 = poly.m.k1
    bound = "upper" if poly.bound == "lower" else "lower"
    return arcs_from_circles(poly.m, pieces, k1 * k1 / poly.lam, bound)


class DualSupport:
    """Exact dual evaluator for a smooth, strictly convex exact source.

    Direction phi of the dual is hit by the primal direction theta with
    theta + atan2(g', g) = phi - pi; there g* = 1/sqrt(g^2 + g'^2) and
    g*' = -g' / (g sqrt(g^2 + g'^2)).
    """

    breaks = np.empty(0)

    def __init__(self, src, grid: int = 4096):
        if len(getattr(src, "breaks", [])) != 0:
            raise DomainError("dual evaluator needs a source without curvature breaks")
        self.src = src
        th = TWO_PI * np.arange(grid + 1) / grid
        g, g1, _ = src.eval(th)
        psi = th + np.arctan2(g1, g)
        psi = psi[0] + np.concatenate([[0.0], np.cumsum((np.diff(psi) + math.pi) % TWO_PI - math.pi)])
        if np.any(np.diff(psi) <= 0):
            raise ConvexityError("source is not strictly convex")
        self._th, self._psi = th, psi

    def _angle(self, theta):
        g, g1, g2 = self.src.eval(theta)
        return theta + np.arctan2(g1, g), g, g1, g2

    def _invert(self, target):
        # unwrap target into the tabulated psi range, then Newton from interpolation
        base = self._psi[0]
        t = base + (target - base) % TWO_PI
        theta = np.interp(t, self._psi, self._th)
        for _ in range(30):
            psi, g, g1, g2 = self._angle(theta)
            shift = np.round((psi - t) / TWO_PI) * TWO_PI
            f = psi - shift - t
            dpsi = g * (g + g2) / (g * g + g1 * g1)
            step = f / dpsi
            theta = theta - step
            if np.max(np.abs(step)) < 1e-15:
                break
        return theta

    def first(self, phi):
        phi = np.asarray(phi, dtype=float)
        theta = self._invert(phi - math.pi)
        g, g1, _ = self.src.eval(theta)
        r = np.sqrt(g * g + g1 * g1)
        return 1.0 / r, -g1 / (g * r)

    def eval(self, phi):
        phi = np.asarray(phi, dtype=float)
        gs, gs1 = self.first(phi)
        d = 1e-5
        _, gp = self.first(phi + d)
        _, gm = self.first(phi - d)
        return gs, gs1, (gp - gm) / (2 * d)


def _sampled_dual(curve: SupportCurve) -> np.ndarray:
    """Contact radius of the reflected dual from samples alone.

    g*(phi) = max_theta cos(theta - phi - pi) / g(theta), with the discrete
    maximum refined by a parabola through its neighbours.  Corners of g
    (geodesic edges of the curve) enter as extra candidates, since a maximum
    sitting on a corner is not parabolic.
    """
    g = np.tan(curve.m.k1 * curve.h)
    if g.min() <= 0:
        raise DomainError("origin must lie strictly inside the curve")
    n = g.size
    dt = TWO_PI / n
    th = curve.theta
    kinks = _kinks(g)
    k_th = np.array([(j + x) * dt for j, x, *_ in kinks])
    k_inv = np.array([1.0 / np.polyval(cl, x) for _, x, cl, _ in kinks])
    k_idx = np.array([j for j, *_ in kinks], dtype=int)
    out = np.empty(n)
    inv = 1.0 / g
    for lo in range(0, n, 256):
        phi = th[lo : lo + 256]
        vals = np.cos(th[None, :] - phi[:, None] - math.pi) * inv[None, :]
        k = np.argmax(vals, axis=1)
        rows = np.arange(phi.size)
        f0 = vals[rows, k]
        fm = vals[rows, (k - 1) % n]
        fp = vals[rows, (k + 1) % n]
        den = fm - 2 * f0 + fp
        with np.errstate(divide="ignore", invalid="ignore"):
            x = np.where(den < 0, 0.5 * (fm - fp) / den, 0.0)
        x = np.clip(x, -1.0, 1.0)
        best = f0 - 0.25 * (fm - fp) * x
        if kinks:
            near = np.isin(k, k_idx) | np.isin((k - 1) % n, k_idx)
            best = np.where(near, f0, best)
            cand = np.cos(k_th[None, :] - phi[:, None] - math.pi) * k_inv[None, :]
            best = np.maximum(best, cand.max(axis=1))
        out[lo : lo + 256] = best
    return out


def polar_dual(curve, N: int | None = None):
    """Polar dual of a convex curve, in the same polar chart.

    Parameters
    ----------
    curve : SupportCurve or ArcPolygon
        Arc polygons (or support curves backed by one) are dualised exactly;
        smooth exact sources by inversion of their normal map; bare samples
        by the discrete polar construction.

    Returns
    -------
    Same representation as the input.  The dual's curvature bound is
    k1^2/lambda with the bound type flipped.
    """
    if isinstance(curve, ArcPolygon):
        return dual_polygon(curve)
    if not isinstance(curve, SupportCurve):
        raise DomainError("expected a SupportCurve or ArcPolygon")
    N = curve.N if N is None else N
    m = curve.m
    lam = m.k1**2 / curve.lam
    bound = "upper" if curve.bound == "lower" else "lower"
    src = curve.source
    if isinstance(src, ArcSupport):
        return support_from_arcs(dual_polygon(src.poly), N)
    if src is not None and len(src.breaks) == 0:
        return support_from_function(m, lam, DualSupport(src), N, bound)
    gs = _sampled_dual(curve)
    return SupportCurve(m, lam, np.arctan(gs) / m.k1, None, bound)


def dual_curvature(R, m: Metric = UNIT) -> np.ndarray:
    """Geodesic curvature of the dual at corresponding points: k1^2 R.

    On the unit sphere the dual's curvature equals the primal's radius of
    curvature; corners (R = 0) become geodesic segments.
    """
    R = np.asarray(R, dtype=float)
    if np.any(R < 0):
        raise DomainError("curvature radius must be non-negative")
    return m.k1**2 * R


def duality_identities(report: MeasureReport, m: Metric = UNIT) -> tuple[float, float]:
    """Predicted (length, area) of the dual from the curve's own measures.

    k1 L* = 2 pi - k1^2 A  and  k1^2 A* = 2 pi - k1 L.
    """
    k1 = m.k1
    L_star = (TWO_PI - k1 * k1 * report.area) / k1
    A_star = (TWO_PI - k1 * report.length) / (k1 * k1)
    return L_star, A_star
