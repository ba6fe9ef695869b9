"""Curve representations and the support-function integrals.

Two representations of a closed convex curve on S^2(k1^2) are provided.

:class:`ArcPolygon`
    An exact chain of circular arcs (each on a circle of its own geodesic
    radius; a lambda-convex polygon uses the lambda-circle for every arc, a
    racetrack mixes lambda-arcs with geodesic segments, i.e. radius pi/2).
:class:`SupportCurve`
    N uniform samples of the support function h(theta) about the chart origin,
    optionally backed by an exact evaluator (``source``) that knows where the
    curvature jumps.  With a source, integrals are split at those breaks and
    evaluated by Gauss-Legendre panels; without one, by the periodic trapezoid
    rule on the samples with finite-difference derivatives.

Measures are evaluated on the unit sphere and rescaled: lengths by 1/k1,
areas by 1/k1^2.  The contact radius g = tan(k1 h)/k1 is the Euclidean support
function of the curve's gnomonic (central) projection.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Protocol, Sequence

import numpy as np

from ._backend import kernels
from .errors import ConvexityError, DomainError, GeometryError, SupportOverflowError
from .sphere_core import (
    TWO_PI,
    UNIT,
    Metric,
    angle_on_circle,
    from_xyz,
    normalize,
    signed_triangle_area,
    tangent_frame,
    to_xyz,
)

DEFAULT_SAMPLES = 4096
CONVEXITY_TOL = 1e-8
CLOSURE_TOL = 1e-10
FD_STEP = 1e-5
_GL_ORDER = 16
_GL_X, _GL_W = np.polynomial.legendre.leggauss(_GL_ORDER)


# --- exact arc chains ------------------------------------------------------------


@dataclass(frozen=True)
class Arc:
    """One circular arc: centre (polar coordinates), start angle, extent.

    ``radius`` is the geodesic radius of the carrying circle; ``None`` means
    the circle of geodesic curvature lambda of the owning polygon.
    """

    center_t: float
    center_theta: float
    start: float
    extent: float
    radius: float | None = None


@dataclass(frozen=True)
class Vertex:
    """A corner of a curve, in the data used by the jump-angle integral.

    ``u``/``theta`` are the polar coordinates of the corner; [alpha, beta] is
    the range of support directions whose supporting geodesic passes through
    it; ``phi`` is the jump angle of the tangent.
    """

    u: float
    theta: float
    alpha: float
    beta: float
    phi: float


class ArcPolygon:
    """Closed convex curve made of circular arcs, traversed counterclockwise.

    Parameters
    ----------
    m : Metric
    lam : float
        The curvature bound attached to the curve.  For ``bound="lower"`` the
        curve is meant to be lambda-convex (every arc on a lambda-circle); for
        ``bound="upper"`` lambda bounds the curvature from above (racetracks
        and polar duals of lambda-convex curves).
    arcs : sequence of Arc
    bound : {"lower", "upper"}

    Raises
    ------
    GeometryError
        If consecutive arcs do not meet (1e-10 on the unit sphere) or the
        curve turns clockwise at a junction.
    """

    def __init__(self, m: Metric, lam: float, arcs: Sequence[Arc], bound: str = "lower"):
        if not (lam > 0 and math.isfinite(lam)):
            raise DomainError("lambda must be positive")
        if bound not in ("lower", "upper"):
            raise DomainError("bound must be 'lower' or 'upper'")
        if len(arcs) == 0:
            raise DomainError("an arc polygon needs at least one arc")
        self.m = m
        self.lam = float(lam)
        self.bound = bound
        self.arcs = tuple(arcs)
        self._table = self._pack()
        self._check_closed()
        turning = self.turning_angles()
        if turning.min() < -1e-9:
            raise ConvexityError(f"curve turns clockwise (turning angle {turning.min():.3e})")
        # a reflex corner can wrap to a turning angle near +pi; the total then overshoots
        if TWO_PI - self.total_curvature() - turning.sum() < -1e-9:
            raise ConvexityError("total turning exceeds 2 pi: curve is not convex")

    # geometry in unit-sphere coordinates
    @property
    def lambda_radius(self) -> float:
        """Geodesic radius of the lambda-circle (physical units)."""
        return math.atan2(self.m.k1, self.lam) / self.m.k1

    def radii(self) -> np.ndarray:
        """Normalised (k1 = 1) radius of each arc's circle."""
        return self._table[:, 9].copy()

    def _pack(self) -> np.ndarray:
        k1 = self.m.k1
        rows = []
        for a in self.arcs:
            rho = (a.radius if a.radius is not None else self.lambda_radius) * k1
            if not (0.0 < rho <= math.pi / 2 + 1e-12):
                raise DomainError(f"arc radius must lie in (0, pi/(2 k1)], got {rho / k1!r}")
            if a.extent < 0:
                raise DomainError("arc extents must be non-negative")
            c = to_xyz(k1 * a.center_t, a.center_theta)
            e1, e2 = tangent_frame(k1 * a.center_t, a.center_theta)
            rows.append(np.concatenate([c, e1, e2, [rho, a.start, a.extent]]))
        return np.array(rows)

    def table(self) -> np.ndarray:
        """Packed (n, 12) arc table consumed by the support kernel."""
        return self._table.copy()

    def _points(self, j: int, psi):
        row = self._table[j]
        c, e1, e2, rho = row[0:3], row[3:6], row[6:9], row[9]
        psi = np.asarray(psi, dtype=float)[..., None]
        return math.cos(rho) * c + math.sin(rho) * (np.cos(psi) * e1 + np.sin(psi) * e2)

    def endpoints(self):
        """Start and end points (unit vectors) of every arc."""
        starts = np.array([self._points(j, r[10]) for j, r in enumerate(self._table)])
        ends = np.array([self._points(j, r[10] + r[11]) for j, r in enumerate(self._table)])
        return starts, ends

    def _check_closed(self):
        starts, ends = self.endpoints()
        gap = np.linalg.norm(ends - np.roll(starts, -1, axis=0), axis=1)
        if gap.max() > CLOSURE_TOL:
            raise GeometryError(f"arcs do not close up (gap {gap.max():.3e})")

    def _tangent(self, j: int, psi) -> np.ndarray:
        row = self._table[j]
        e1, e2 = row[3:6], row[6:9]
        return -math.sin(psi) * e1 + math.cos(psi) * e2

    def _normal(self, j: int, psi) -> np.ndarray:
        """Outward unit normal at angle psi on arc j."""
        row = self._table[j]
        c, e1, e2, rho = row[0:3], row[3:6], row[6:9], row[9]
        w = math.cos(psi) * e1 + math.sin(psi) * e2
        return -math.sin(rho) * c + math.cos(rho) * w

    def turning_angles(self) -> np.ndarray:
        """Signed tangent turn at each junction (end of arc j -> start of arc j+1)."""
        n = len(self.arcs)
        _, ends = self.endpoints()
        out = np.empty(n)
        for j in range(n):
            k = (j + 1) % n
            t_in = self._tangent(j, self._table[j, 10] + self._table[j, 11])
            t_out = self._tangent(k, self._table[k, 10])
            p = ends[j]
            out[j] = math.atan2(float(p @ np.cross(t_in, t_out)), float(t_in @ t_out))
        return out

    def vertices(self, tol: float = 1e-12) -> list[Vertex]:
        """Corners (junctions with a positive jump angle)."""
        n = len(self.arcs)
        _, ends = self.endpoints()
        turning = self.turning_angles()
        out = []
        for j in range(n):
            if turning[j] <= tol:
                continue
            k = (j + 1) % n
            nu_in = self._normal(j, self._table[j, 10] + self._table[j, 11])
            nu_out = self._normal(k, self._table[k, 10])
            alpha = math.atan2(nu_in[1], nu_in[0]) % TWO_PI
            beta = alpha + (math.atan2(nu_out[1], nu_out[0]) - alpha) % TWO_PI
            t, theta = from_xyz(ends[j])
            out.append(Vertex(float(t) / self.m.k1, float(theta), alpha, beta, float(turning[j])))
        return out

    def support_breaks(self) -> np.ndarray:
        """Support directions where the curvature radius can jump (sorted, in [0, 2 pi))."""
        th = []
        for j, row in enumerate(self._table):
            for psi in (row[10], row[10] + row[11]):
                nu = self._normal(j, psi)
                th.append(math.atan2(nu[1], nu[0]) % TWO_PI)
        th = np.unique(np.round(np.array(th), 15))
        return th

    # exact measures
    def arc_lengths(self) -> np.ndarray:
        return self._table[:, 11] * np.sin(self._table[:, 9]) / self.m.k1

    def length(self) -> float:
        return float(self.arc_lengths().sum())

    def total_curvature(self) -> float:
        """Integral of geodesic curvature along the arcs (dimensionless)."""
        return float(np.sum(self._table[:, 11] * np.cos(self._table[:, 9])))

    def area(self) -> float:
        """Area from Gauss-Bonnet: 2 pi - int kappa ds - sum of jump angles, over k1^2.

        Below a normalised area of 1/2 the Gauss-Bonnet difference cancels
        badly and the fan decomposition is returned instead.
        """
        a = TWO_PI - self.total_curvature() - float(self.turning_angles().sum())
        if a < 0.5:
            return self.fan_area()
        return a / self.m.k1**2

    def fan_area(self) -> float:
        """Area by an independent decomposition.

        Signed geodesic triangles from an interior reference point (the
        normalised mean of the arc endpoints) to sub-arc chords, plus the
        circular segments between each chord and its sub-arc.
        """
        z = normalize(self.endpoints()[0].sum(axis=0))
        total = 0.0
        for j, row in enumerate(self._table):
            rho, psi0, ext = row[9], row[10], row[11]
            k = max(1, int(math.ceil(ext / (math.pi / 8))))
            psi = psi0 + ext * np.arange(k + 1) / k
            pts = self._points(j, psi)
            p, q = pts[:-1], pts[1:]
            total += float(signed_triangle_area(z, p, q).sum())
            total += k * _segment_area(rho, ext / k)
        return total / self.m.k1**2

    def curvatures(self) -> np.ndarray:
        """Geodesic curvature of each arc (physical units)."""
        rho = self._table[:, 9]
        return self.m.k1 * np.cos(rho) / np.sin(rho)

    def boundary_points(self, n: int) -> np.ndarray:
        """About ``n`` points spread along the curve in proportion to arc length."""
        lengths = self._table[:, 11] * np.sin(self._table[:, 9])
        total = lengths.sum()
        pts = []
        for j, row in enumerate(self._table):
            k = max(2, int(math.ceil(n * lengths[j] / total)))
            psi = row[10] + row[11] * np.arange(k) / k
            pts.append(self._points(j, psi))
        return np.concatenate(pts)

    def transformed(self, rot: np.ndarray) -> "ArcPolygon":
        """Image under a rotation of the sphere (3x3 orthogonal, det +1)."""
        arcs = []
        k1 = self.m.k1
        for j, (a, row) in enumerate(zip(self.arcs, self._table)):
            c = rot @ row[0:3]
            p0 = rot @ self._points(j, row[10])
            t, theta = from_xyz(c)
            arcs.append(Arc(float(t) / k1, float(theta), angle_on_circle(c, p0), a.extent, a.radius))
        return ArcPolygon(self.m, self.lam, arcs, self.bound)

    def __repr__(self):
        return f"ArcPolygon(k1={self.m.k1}, lam={self.lam}, arcs={len(self.arcs)}, bound={self.bound!r})"


def _x_minus_sin(x: float) -> float:
    """x - sin x without cancellation for small x."""
    if abs(x) > 0.5:
        return x - math.sin(x)
    x2, term, total = x * x, x**3 / 6.0, 0.0
    for n in range(1, 12):
        total += term
        term *= -x2 / ((2 * n + 2) * (2 * n + 3))
    return total


def _segment_area(rho: float, phi: float) -> float:
    """Area between a circular arc (radius rho, angle phi) and its chord, unit sphere.

    With z = tan^2(rho/2): S = 2 sum_n (-1)^(n+1) z^n (n phi - sin n phi)/n,
    which avoids the cancellation in sector minus triangle; the closed form
    phi (1 - cos rho) - 2 arg(1 + z e^(i phi)) is used for z > 1/2.
    """
    z = math.tan(0.5 * rho) ** 2
    if z > 0.5:
        tri = 2.0 * math.atan2(z * math.sin(phi), 1.0 + z * math.cos(phi))
        return phi * 2.0 * z / (1.0 + z) - tri
    total, zn, n = 0.0, z, 1
    while True:
        term = zn * _x_minus_sin(n * phi) / n
        total += term if n % 2 else -term
        if abs(term) <= 1e-17 * abs(total) or n > 200:
            break
        n += 1
        zn *= z
    return 2.0 * total


def arcs_from_circles(m: Metric, pieces, lam: float, bound: str = "lower") -> ArcPolygon:
    """Build an :class:`ArcPolygon` from unit-sphere pieces.

    ``pieces`` holds (center, rho, start_point, extent) with ``center`` and
    ``start_point`` unit vectors, ``rho`` the normalised radius.  Radii equal
    to the lambda-circle are stored as ``None``.
    """
    k1 = m.k1
    rho_lam = math.atan2(k1, lam)
    arcs = []
    for center, rho, start_pt, extent in pieces:
        t, theta = from_xyz(center)
        radius = None if abs(rho - rho_lam) < 1e-14 else rho / k1
        arcs.append(Arc(float(t) / k1, float(theta), angle_on_circle(center, start_pt), float(extent), radius))
    return ArcPolygon(m, lam, arcs, bound)


# --- exact support evaluators ------------------------------------------------------


class ExactSupport(Protocol):
    """Evaluator of the unit-sphere contact radius and its first two derivatives."""

    breaks: np.ndarray

    def eval(self, theta: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]: ...


def _cyclic_offset(theta, breaks):
    """Signed offset from each theta to its nearest break (theta - break)."""
    if len(breaks) == 0:
        return np.full(np.shape(theta), np.inf)
    d = (np.asarray(theta)[..., None] - breaks + math.pi) % TWO_PI - math.pi
    idx = np.argmin(np.abs(d), axis=-1)
    return np.take_along_axis(d, idx[..., None], axis=-1)[..., 0]


class ArcSupport:
    """Exact support of an :class:`ArcPolygon` via per-arc closed-form maximisation.

    For a direction theta the gnomonic support value max_P tan(u_P) cos(theta -
    theta_P) over a circular arc is a ratio of trigonometric polynomials in
    the arc angle whose stationary points solve a linear equation in (cos,
    sin); candidates are those points plus the arc ends.  The second
    derivative is a finite difference of the exact first derivative, taken
    one-sided next to a curvature break.
    """

    def __init__(self, poly: ArcPolygon):
        self.poly = poly
        self.table = poly.table()
        self.breaks = poly.support_breaks()

    def first(self, theta):
        g, dg, *_ = kernels.arc_support(np.asarray(theta, dtype=float).ravel(), self.table)
        return g.reshape(np.shape(theta)), dg.reshape(np.shape(theta))

    def contact(self, theta):
        """Winning arc index, arc angle and location flag for each direction."""
        _, _, which, psi, where = kernels.arc_support(np.asarray(theta, dtype=float).ravel(), self.table)
        return which, psi, where

    def eval(self, theta):
        theta = np.asarray(theta, dtype=float)
        g, g1 = self.first(theta)
        d = FD_STEP
        off = _cyclic_offset(theta, self.breaks)
        fwd = (off >= 0) & (off < 2 * d)  # break just behind: step forward
        bwd = (off < 0) & (off > -2 * d)  # break just ahead: step backward
        _, gp = self.first(theta + d)
        _, gm = self.first(theta - d)
        g2 = (gp - gm) / (2 * d)
        if fwd.any() or bwd.any():
            _, gp2 = self.first(theta + 2 * d)
            _, gm2 = self.first(theta - 2 * d)
            g2 = np.where(fwd, (-3 * g1 + 4 * gp - gp2) / (2 * d), g2)
            g2 = np.where(bwd, (3 * g1 - 4 * gm + gm2) / (2 * d), g2)
        return g, g1, g2


class TrigSupport:
    """Smooth support function h(theta) = a0 + sum_k a_k cos k theta + b_k sin k theta.

    Unit-sphere units.  Used to build smooth test curves; derivatives exact.
    """

    breaks = np.empty(0)

    def __init__(self, a0: float, a: Sequence[float] = (), b: Sequence[float] = ()):
        self.a0 = float(a0)
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        if self.a.shape != self.b.shape:
            raise DomainError("cosine and sine coefficient arrays must match")

    def h(self, theta):
        theta = np.asarray(theta, dtype=float)
        k = np.arange(1, self.a.size + 1)
        ang = theta[..., None] * k
        c, s = np.cos(ang), np.sin(ang)
        h0 = self.a0 + c @ self.a + s @ self.b
        h1 = s @ (-k * self.a) + c @ (k * self.b)
        h2 = c @ (-(k**2) * self.a) + s @ (-(k**2) * self.b)
        return h0, h1, h2

    def eval(self, theta):
        h0, h1, h2 = self.h(theta)
        g = np.tan(h0)
        sec2 = 1.0 + g * g
        g1 = sec2 * h1
        g2 = 2.0 * g * g1 * h1 + sec2 * h2
        return g, g1, g2


# --- sampled support curves -------------------------------------------------------


class SupportCurve:
    """Sampled support function of a closed convex curve.

    Parameters
    ----------
    m : Metric
    lam : float
        Curvature bound (lower for lambda-convex curves, upper for duals).
    h : array_like
        Support values at theta_j = 2 pi j / N, physical units,
        0 <= k1 h < pi/2.
    source : ExactSupport, optional
        Exact evaluator in unit-sphere units.
    bound : {"lower", "upper"}
    """

    def __init__(self, m: Metric, lam: float, h, source: ExactSupport | None = None, bound: str = "lower"):
        h = np.asarray(h, dtype=float).copy()
        if h.ndim != 1 or h.size < 8:
            raise DomainError("support samples must be a 1-D array of at least 8 values")
        if not np.all(np.isfinite(h)):
            raise DomainError("support samples must be finite")
        if not (lam > 0 and math.isfinite(lam)):
            raise DomainError("lambda must be positive")
        if bound not in ("lower", "upper"):
            raise DomainError("bound must be 'lower' or 'upper'")
        if h.min() < -1e-12:
            raise DomainError("origin must lie inside the curve (negative support value)")
        if (m.k1 * h).max() >= math.pi / 2:
            raise SupportOverflowError("support reaches the hemisphere boundary: k1 h >= pi/2")
        h.setflags(write=False)
        self.m = m
        self.lam = float(lam)
        self.h = h
        self.source = source
        self.bound = bound

    @property
    def N(self) -> int:
        return self.h.size

    @property
    def theta(self) -> np.ndarray:
        return TWO_PI * np.arange(self.N) / self.N

    @property
    def h_max_remark2(self) -> float:
        """Largest support value allowed by the origin convention g <= 1/lambda."""
        return math.atan2(self.m.k1, self.lam) / self.m.k1

    def origin_ok(self, tol: float = 1e-9) -> bool:
        """True if the chart origin satisfies h <= arccot(lambda/k1)/k1 everywhere."""
        return bool(self.h.max() <= self.h_max_remark2 + tol)

    def with_samples(self, N: int) -> "SupportCurve":
        """Resample; only possible with an exact source."""
        if self.source is None:
            raise DomainError("cannot resample a curve without an exact source")
        th = TWO_PI * np.arange(N) / N
        g, _, _ = self.source.eval(th)
        return SupportCurve(self.m, self.lam, np.arctan(g) / self.m.k1, self.source, self.bound)

    def __repr__(self):
        kind = type(self.source).__name__ if self.source is not None else "sampled"
        return f"SupportCurve(k1={self.m.k1}, lam={self.lam}, N={self.N}, {kind}, bound={self.bound!r})"


def _kinks(g: np.ndarray):
    """Corners of uniformly sampled g (jumps of g', i.e. geodesic edges).

    A slope jump s at fraction f of interval (j, j+1) makes the second
    differences at j and j+1 equal s dt (1 - f) and s dt f; their sum spikes
    at O(dt) above the O(dt^2) background.  Returns ``(j, x)`` pairs with the
    kink at theta_j + x dt, located by intersecting quadratic extrapolations
    from either side.
    """
    n = g.size
    d2 = np.roll(g, -1) - 2 * g + np.roll(g, 1)
    pair = d2 + np.roll(d2, -1)  # interval (j, j+1)
    a = np.abs(pair)
    scale = max(50.0 * float(np.median(a)), 1e-9 * max(1.0, float(np.abs(g).max())))
    hit = (a > scale) & (a > np.roll(a, 1)) & (a >= np.roll(a, -1))
    out = []
    for j in np.flatnonzero(hit):
        left = g[(j + np.arange(-2, 1)) % n]
        right = g[(j + np.arange(1, 4)) % n]
        # quadratics in x = (theta - theta_j)/dt through x = -2..0 and 1..3
        cl = np.polyfit([-2.0, -1.0, 0.0], left, 2)
        cr = np.polyfit([1.0, 2.0, 3.0], right, 2)
        f0 = d2[(j + 1) % n] / pair[j] if pair[j] != 0 else 0.5
        roots = np.roots(cl - cr)
        roots = roots[np.isreal(roots)].real
        roots = roots[(roots >= -1e-9) & (roots <= 1 + 1e-9)]
        x = float(roots[np.argmin(np.abs(roots - f0))]) if roots.size else float(np.clip(f0, 0.0, 1.0))
        out.append((int(j), min(max(x, 0.0), 1.0), cl, cr))
    return out


def _fd_derivatives(g: np.ndarray, kinks=None):
    """First and second periodic differences of uniformly sampled g.

    Centred second-order stencils, except where a jump of the second
    derivative is detected between two samples: the two samples whose centred
    stencil straddles it switch to one-sided second-order stencils.  The same
    is done on either side of a slope jump (see :func:`_kinks`).
    """
    n = g.size
    dt = TWO_PI / n
    gp, gm = np.roll(g, -1), np.roll(g, 1)
    g1 = (gp - gm) / (2 * dt)
    g2 = (gp - 2 * g + gm) / dt**2
    c1, c2 = g1.copy(), g2.copy()
    # third difference on interval (j, j+1)
    d3 = np.roll(g, -2) - 3 * gp + 3 * g - gm
    a = np.abs(d3)
    scale = max(30.0 * float(np.median(a)), 1e-10 * max(1.0, float(np.abs(g).max())))
    jump = (a > scale) & (a >= np.roll(a, 1)) & (a >= np.roll(a, -1))
    kinks = _kinks(g) if kinks is None else kinks
    if jump.any() or kinks:
        left = (2 * g - 5 * gm + 4 * np.roll(g, 2) - np.roll(g, 3)) / dt**2
        right = (2 * g - 5 * gp + 4 * np.roll(g, -2) - np.roll(g, -3)) / dt**2
        l1 = (3 * g - 4 * gm + np.roll(g, 2)) / (2 * dt)
        r1 = (-3 * g + 4 * gp - np.roll(g, -2)) / (2 * dt)
        j = np.flatnonzero(jump)
        g2[j] = left[j]
        g2[(j + 1) % n] = right[(j + 1) % n]
        g1[j] = l1[j]
        g1[(j + 1) % n] = r1[(j + 1) % n]
        for k, *_ in kinks:
            for i in ((k - 1) % n, (k + 2) % n):
                g1[i], g2[i] = c1[i], c2[i]
            g1[k], g2[k] = l1[k], left[k]
            i = (k + 1) % n
            g1[i], g2[i] = r1[i], right[i]
    return g1, g2


def _kink_nodes(g, g1, g2, kinks):
    """Quadrature corrections for intervals containing a slope jump.

    The trapezoid share of each such interval is removed (negative weights at
    its two samples) and replaced by Gauss-Legendre nodes on either side of
    the kink, evaluated on the one-sided quadratic extrapolations.
    """
    n = g.size
    dt = TWO_PI / n
    th, w, G, G1, G2 = [], [], [], [], []
    for j, x, cl, cr in kinks:
        for i in (j, (j + 1) % n):
            th.append(TWO_PI * i / n)
            w.append(-0.5 * dt)
            G.append(g[i])
            G1.append(g1[i])
            G2.append(g2[i])
        for lo, hi, c in ((0.0, x, cl), (x, 1.0, cr)):
            if hi - lo <= 0:
                continue
            xs = 0.5 * (lo + hi) + 0.5 * (hi - lo) * _GL_X
            th.extend(TWO_PI * j / n + xs * dt)
            w.extend(0.5 * (hi - lo) * dt * _GL_W)
            G.extend(np.polyval(c, xs))
            G1.extend(np.polyval(np.polyder(c), xs) / dt)
            G2.extend(np.full(xs.size, 2 * c[0] / dt**2))
    return (np.asarray(v, dtype=float) for v in (th, w, G, G1, G2))


def _quadrature(curve: SupportCurve):
    """Nodes (unit-sphere theta), weights and (g, g', g'') for the integrals."""
    src = curve.source
    if src is None:
        g = np.tan(curve.m.k1 * curve.h)
        kinks = _kinks(g)
        g1, g2 = _fd_derivatives(g, kinks)
        w = np.full(curve.N, TWO_PI / curve.N)
        if not kinks:
            return curve.theta, w, g, g1, g2
        extra = list(_kink_nodes(g, g1, g2, kinks))
        base = [curve.theta, w, g, g1, g2]
        return tuple(np.concatenate([b, e]) for b, e in zip(base, extra))
    breaks = np.asarray(src.breaks, dtype=float)
    if breaks.size == 0:
        n = max(curve.N, 256)
        th = TWO_PI * np.arange(n) / n
        g, g1, g2 = src.eval(th)
        return th, np.full(n, TWO_PI / n), g, g1, g2
    edges = np.concatenate([breaks, [breaks[0] + TWO_PI]])
    panel = TWO_PI * _GL_ORDER / max(curve.N, 256)
    nodes, weights = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        if b - a <= 1e-15:
            continue
        k = max(1, int(math.ceil((b - a) / panel)))
        e = a + (b - a) * np.arange(k + 1) / k
        mid, half = 0.5 * (e[1:] + e[:-1]), 0.5 * (e[1:] - e[:-1])
        nodes.append((mid[:, None] + half[:, None] * _GL_X).ravel())
        weights.append((half[:, None] * _GL_W).ravel())
    th = np.concatenate(nodes)
    g, g1, g2 = src.eval(th)
    return th, np.concatenate(weights), g, g1, g2


# --- operations -----------------------------------------------------------------------


def contact_radius(curve: SupportCurve) -> np.ndarray:
    """Contact radius g = tan(k1 h)/k1 at the sample points."""
    arg = curve.m.k1 * curve.h
    if arg.max() >= math.pi / 2:
        raise SupportOverflowError("k1 h >= pi/2: contact radius diverges")
    return np.tan(arg) / curve.m.k1


def curvature_radius(g, g1, g2, m: Metric = UNIT):
    """Radius of curvature from the contact radius and its derivatives.

    R = (g'' + g) / (1 + k1^2 g'^2 / (1 + k1^2 g^2))^(3/2), physical units.
    """
    g, g1, g2 = (np.asarray(x, dtype=float) for x in (g, g1, g2))
    k2 = m.k1**2
    return (g2 + g) / (1.0 + k2 * g1 * g1 / (1.0 + k2 * g * g)) ** 1.5


def _arc_element(g, g1):
    """ds*/dtheta of the dual curve: sqrt(1 + g^2 + g'^2)/(1 + g^2), unit sphere."""
    return np.sqrt(1.0 + g * g + g1 * g1) / (1.0 + g * g)


def radius_samples(curve: SupportCurve) -> np.ndarray:
    """Curvature radius R(theta_j) at the sample points (physical units)."""
    k1 = curve.m.k1
    if curve.source is not None:
        g, g1, g2 = curve.source.eval(curve.theta)
    else:
        g = np.tan(k1 * curve.h)
        g1, g2 = _fd_derivatives(g)
    return curvature_radius(g, g1, g2, UNIT) / k1


def length(curve: SupportCurve, method: str = "auto") -> float:
    """Length of the curve from its support function.

    Parameters
    ----------
    method : {"auto", "radius", "support"}
        ``"radius"`` integrates R * sqrt(1+g^2+g'^2)/(1+g^2); it needs a finite
        curvature radius and is the default for lambda-convex curves.
        ``"support"`` integrates sin(k1 h)/k1 (spherical Cauchy formula, valid
        for any convex curve, including ones with geodesic edges); it is the
        default for curves with an upper curvature bound and for bare samples,
        where finite-difference curvature radii are too rough near corners.

    Raises
    ------
    ConvexityError
        With the radius method, if the reconstructed R is negative somewhere.
    """
    if method == "auto":
        exact = curve.source is not None
        method = "radius" if (curve.bound == "lower" and exact) else "support"
    th, w, g, g1, g2 = _quadrature(curve)
    if method == "support":
        return float(np.sum(w * np.sin(np.arctan(g)))) / curve.m.k1
    if method != "radius":
        raise DomainError(f"unknown length method {method!r}")
    R = curvature_radius(g, g1, g2, UNIT)
    tol = 1e-4 if curve.source is None else CONVEXITY_TOL
    if R.min() < -tol:
        raise ConvexityError(f"negative curvature radius {R.min():.3e}: curve is not convex")
    return float(np.sum(w * R * _arc_element(g, g1))) / curve.m.k1


def area(curve: SupportCurve) -> float:
    """Enclosed area: integral of 1 - sqrt(1+g^2+g'^2)/(1+g^2), over k1^2."""
    th, w, g, g1, g2 = _quadrature(curve)
    if not np.any(g > 0):
        return 0.0
    return float(np.sum(w * (1.0 - _arc_element(g, g1)))) / curve.m.k1**2


def jump_angle(v: Vertex, m: Metric = UNIT, strict: bool = False) -> float:
    """Jump angle of the tangent at a vertex from its support-direction range.

    phi = [arctan(cos u tan(theta - theta_v))] evaluated from alpha to beta,
    continued across theta - theta_v = +-pi/2 by adding pi per crossing.

    Parameters
    ----------
    strict : bool
        Raise :class:`BranchError` instead of continuing across a pole of tan.
    """
    from .errors import BranchError

    if not v.beta - v.alpha < math.pi:
        raise DomainError("vertex support range must be shorter than pi")
    cu = math.cos(m.k1 * v.u)

    def antiderivative(x):
        return math.atan2(cu * math.sin(x), math.cos(x)) + TWO_PI * round(x / TWO_PI)

    a, b = v.alpha - v.theta, v.beta - v.theta
    if strict and math.floor(a / math.pi + 0.5) != math.floor(b / math.pi + 0.5):
        raise BranchError("arctan(cos u tan x) crosses a pole of tan between alpha and beta")
    return antiderivative(b) - antiderivative(a)


def support_from_arcs(poly: ArcPolygon, N: int = DEFAULT_SAMPLES) -> SupportCurve:
    """Sampled support function of an arc polygon, with the exact evaluator attached."""
    if N < 256:
        raise DomainError("use at least 256 samples")
    src = ArcSupport(poly)
    th = TWO_PI * np.arange(N) / N
    g, _ = src.first(th)
    if g.min() < -1e-12:
        raise DomainError("chart origin lies outside the polygon")
    if not np.all(np.isfinite(g)):
        raise SupportOverflowError("polygon reaches the hemisphere boundary")
    return SupportCurve(poly.m, poly.lam, np.arctan(np.maximum(g, 0.0)) / poly.m.k1, src, poly.bound)


def support_from_function(m: Metric, lam: float, src: ExactSupport, N: int = DEFAULT_SAMPLES, bound="lower"):
    """Sampled support curve of any exact evaluator (unit-sphere units)."""
    th = TWO_PI * np.arange(N) / N
    g, _, _ = src.eval(th)
    return SupportCurve(m, lam, np.arctan(g) / m.k1, src, bound)


@dataclass(frozen=True)
class MeasureReport:
    """Length, area and curvature range of a curve (physical units)."""

    length: float
    area: float
    radius_min: float
    radius_max: float
    curvature_min: float
    curvature_max: float

    def as_dict(self) -> dict:
        return {
            "length": self.length,
            "area": self.area,
            "radius_min": self.radius_min,
            "radius_max": self.radius_max,
            "curvature_min": self.curvature_min,
            "curvature_max": self.curvature_max,
        }


def _inv(x: float) -> float:
    return math.inf if x <= 0 else 1.0 / x


def measure(curve, method: str = "auto") -> MeasureReport:
    """Aggregate length, area and curvature range of a SupportCurve or ArcPolygon.

    Arc polygons are measured exactly (arc lengths, Gauss-Bonnet); support
    curves by quadrature of the support-function integrals.
    """
    if isinstance(curve, ArcPolygon):
        kappa = curve.curvatures()
        has_vertex = bool(np.any(curve.turning_angles() > 1e-12))
        kmin, kmax = float(kappa.min()), float(kappa.max())
        if has_vertex:
            kmax = math.inf
        rmin = 0.0 if has_vertex else _inv(kmax)
        return MeasureReport(curve.length(), curve.area(), rmin, _inv(kmin), kmin, kmax)
    L = length(curve, method)
    A = area(curve)
    R = radius_samples(curve)
    rmin, rmax = float(max(R.min(), 0.0)), float(R.max())
    if curve.bound == "upper" and _has_flat_edges(curve):
        rmax = math.inf
    return MeasureReport(L, A, rmin, rmax, _inv(rmax), _inv(rmin))


def _has_flat_edges(curve: SupportCurve) -> bool:
    src = curve.source
    if isinstance(src, ArcSupport):
        return bool(np.any(np.abs(src.table[:, 9] - math.pi / 2) < 1e-12))
    if src is None:
        return bool(_kinks(np.tan(curve.m.k1 * curve.h)))
    return False


def is_lambda_convex(curve, tol: float = CONVEXITY_TOL) -> bool:
    """True if the curvature radius never exceeds 1/lambda (+ tol)."""
    if isinstance(curve, ArcPolygon):
        return bool(
            np.all(curve.curvatures() >= curve.lam * (1 - 1e-12) - tol)
            and np.all(curve.turning_angles() >= -tol)
        )
    R = radius_samples(curve)
    return bool(np.all(R <= 1.0 / curve.lam + tol) and np.all(R >= -max(tol, 1e-6)))


# --- curve JSON -------------------------------------------------------------------------


def _num(x: float) -> float:
    return float(format(float(x), ".17g"))


def to_json_dict(curve) -> dict:
    """Curve JSON: k1, lambda, repr ("support" | "arcs") and the data."""
    out = {"k1": curve.m.k1, "lambda": curve.lam, "bound": curve.bound}
    if isinstance(curve, ArcPolygon):
        out["repr"] = "arcs"
        arcs = []
        for a in curve.arcs:
            d = {"center_t": a.center_t, "center_theta": a.center_theta, "start": a.start, "extent": a.extent}
            if a.radius is not None:
                d["radius"] = a.radius
            arcs.append(d)
        out["arcs"] = arcs
    else:
        out["repr"] = "support"
        out["h"] = [float(x) for x in curve.h]
    return out


def _fmt(obj) -> str:
    if isinstance(obj, float):
        if math.isinf(obj):
            return '"inf"' if obj > 0 else '"-inf"'
        return format(obj, ".17g")
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        return "{" + ", ".join(f"{json.dumps(k)}: {_fmt(v)}" for k, v in obj.items()) + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in obj) + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def dumps(obj) -> str:
    """Deterministic JSON text with 17 significant digits for every float."""
    if isinstance(obj, (ArcPolygon, SupportCurve)):
        obj = to_json_dict(obj)
    return _fmt(obj) + "\n"


def from_json_dict(d: dict, N: int | None = None):
    """Parse curve JSON into an :class:`ArcPolygon` or :class:`SupportCurve`."""
    try:
        m = Metric(float(d["k1"]))
        lam = float(d["lambda"])
        kind = d["repr"]
        bound = d.get("bound", "lower")
    except (KeyError, TypeError, ValueError) as exc:
        raise ValueError(f"malformed curve JSON: {exc}") from exc
    if kind == "arcs":
        try:
            arcs = [
                Arc(
                    float(a["center_t"]),
                    float(a["center_theta"]),
                    float(a["start"]),
                    float(a["extent"]),
                    None if a.get("radius") is None else float(a["radius"]),
                )
                for a in d["arcs"]
            ]
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed arc entry: {exc}") from exc
        return ArcPolygon(m, lam, arcs, bound)
    if kind == "support":
        try:
            h = np.array([float(x) for x in d["h"]])
        except (KeyError, TypeError, ValueError) as exc:
            raise ValueError(f"malformed support samples: {exc}") from exc
        return SupportCurve(m, lam, h, None, bound)
    raise ValueError(f"unknown curve representation {kind!r}")


def loads(text: str):
    return from_json_dict(json.loads(text))


def as_support(curve, N: int = DEFAULT_SAMPLES) -> SupportCurve:
    """Support-curve view of either representation."""
    if isinstance(curve, ArcPolygon):
        return support_from_arcs(curve, N)
    return curve


def polygon_from_vertices(m: Metric, lam: float, V) -> ArcPolygon:
    """Lambda-polygon through unit vectors ``V`` (counterclockwise order).

    Consecutive vertices are joined by the minor arc of the lambda-circle
    whose centre lies on the inner side of the chord.

    Raises
    ------
    DomainError
        If a chord is longer than the lambda-circle's diameter.
    """
    V = np.asarray(V, dtype=float)
    rho = math.atan2(m.k1, lam)
    pieces = []
    for i in range(V.shape[0]):
        p, q = V[i], V[(i + 1) % V.shape[0]]
        cr = np.cross(p, q)
        d = math.atan2(float(np.linalg.norm(cr)), float(p @ q))
        if math.sin(d / 2) > math.sin(rho) * (1 + 1e-14):
            raise DomainError("chord exceeds the lambda-circle diameter")
        # right triangle centre-midpoint-p: sin(d/2) = sin rho sin psi, tan s = tan rho cos psi
        sh, sr = math.sin(d / 2), math.sin(rho)
        cos_psi = math.sqrt(max(0.0, (sr - sh) * (sr + sh))) / sr
        s = math.atan(math.tan(rho) * cos_psi)
        mid = (p + q) / np.linalg.norm(p + q)
        center = math.cos(s) * mid + math.sin(s) * cr / np.linalg.norm(cr)
        extent = 2.0 * math.atan2(sh, sr * cos_psi)
        pieces.append((center, rho, p, extent))
    return arcs_from_circles(m, pieces, lam)
