"""Extremal curves and the sharp reverse isoperimetric bounds.

Lower bound (lambda-convex curves): A >= A_lune(L), with equality only for
lunes.  Upper bound (curvature at most lambda): L <= L_race(A), with equality
only for racetracks.  The two are exchanged by polar duality.  Planar limits
of both are provided for comparison.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve_model import (
    ArcPolygon,
    arcs_from_circles,
    is_lambda_convex,
    measure,
    polygon_from_vertices,
)
from ._backend import kernels
from .errors import ConvexityError, CurvatureRangeError, DomainError
from .sphere_core import TWO_PI, UNIT, Metric, angle_on_circle, to_xyz

_REL = 1e-12
_GL_X, _GL_W = np.polynomial.legendre.leggauss(24)


@dataclass(frozen=True)
class LuneSpec:
    """Lune of length ``length`` bounded by two arcs of curvature ``lam``."""

    m: Metric
    lam: float
    length: float

    def __post_init__(self):
        if not self.lam > 0:
            raise DomainError("lambda must be positive")
        L_max = self.m.lune_length_max(self.lam)
        if not (0.0 < self.length <= L_max * (1 + _REL)):
            raise DomainError(f"lune length must lie in (0, {L_max!r}], got {self.length!r}")


def lune_area(L: float, lam: float, m: Metric = UNIT) -> float:
    """Area of the lambda-convex lune of length ``L``.

    A(L) = (4/k1^2) arctan((lambda/q) tan(q L/4)) - lambda L/k1^2 with
    q = sqrt(lambda^2 + k1^2), evaluated through atan2 so the endpoint
    q L/4 = pi/2 (the full circle) is regular.  For short or nearly planar
    lunes the two terms cancel; there the equivalent integral
    (4 lambda/q^3) int_0^x sin^2 t / (cos^2 t + a^2 sin^2 t) dt, with
    x = q L/4 and a = lambda/q, is used instead.
    """
    LuneSpec(m, lam, L)
    k1 = m.k1
    q = math.hypot(lam, k1)
    x = q * L / 4.0
    eps = k1 * k1 / (q * (q + lam))  # 1 - lambda/q without cancellation
    if eps > 1e-3 and x > 0.5:
        return (4.0 * math.atan2(lam * math.sin(x), q * math.cos(x)) - lam * L) / k1**2
    a2 = (lam / q) ** 2
    t = 0.5 * x * (1.0 + _GL_X)
    st2 = np.sin(t) ** 2
    f = st2 / (1.0 - st2 + a2 * st2)
    return 4.0 * lam / q**3 * 0.5 * x * float(np.dot(_GL_W, f))


def make_lune(spec: LuneSpec) -> ArcPolygon:
    """The lune of ``spec``, symmetric about the chart origin.

    Both vertices sit on the x-axis; each arc has half-extent
    psi = k1 L / (4 sin rho) on the lambda-circle of radius rho, and the arc
    centres lie on the y-axis at distance arctan(tan rho cos psi).
    """
    k1 = spec.m.k1
    rho = math.atan2(k1, spec.lam)
    psi = min(k1 * spec.length / (4.0 * math.sin(rho)), math.pi / 2)
    s = math.atan(math.tan(rho) * math.cos(psi))
    # right triangle centre-origin-vertex: sin a = sin rho sin psi, cos a = cos rho / cos s
    a = math.atan2(math.sin(rho) * math.sin(psi), math.cos(rho) / math.cos(s))
    v_right, v_left = to_xyz(a, 0.0), to_xyz(a, math.pi)
    upper_c, lower_c = to_xyz(s, 1.5 * math.pi), to_xyz(s, 0.5 * math.pi)
    pieces = [(upper_c, rho, v_right, 2 * psi), (lower_c, rho, v_left, 2 * psi)]
    return arcs_from_circles(spec.m, pieces, spec.lam)


def _lambda_measures(curve):
    if isinstance(curve, ArcPolygon):
        return curve.length(), curve.area()
    rep = measure(curve)
    return rep.length, rep.area


def lower_bound_deficit(curve, tol: float = 1e-8) -> float:
    """A(curve) - A_lune(L(curve)); non-negative for lambda-convex curves.

    Raises
    ------
    ConvexityError
        If the curve is not lambda-convex.
    """
    if not is_lambda_convex(curve, tol=max(tol, 1e-8) if isinstance(curve, ArcPolygon) else 1e-6):
        raise ConvexityError("curve is not lambda-convex")
    L, A = _lambda_measures(curve)
    L_max = curve.m.lune_length_max(curve.lam)
    if L > L_max * (1 + 1e-9):
        raise ConvexityError("length exceeds the lambda-circle: curve cannot be lambda-convex")
    return A - lune_area(min(L, L_max), curve.lam, curve.m)


def euclid_lower_bound(L: float, lam: float) -> float:
    """Planar lune area L/(2 lambda) - sin(lambda L / 2)/lambda^2."""
    if not (lam > 0 and 0.0 < L <= TWO_PI / lam * (1 + _REL)):
        raise DomainError("need lambda > 0 and 0 < L <= 2 pi / lambda")
    return L / (2 * lam) - math.sin(lam * L / 2) / lam**2


def make_racetrack(lam: float, separation: float, m: Metric = UNIT) -> ArcPolygon:
    """Convex hull of two circles of curvature ``lam`` with centres ``separation`` apart.

    The centres sit at distance delta = separation/2 from the origin on the
    x-axis.  Requires delta < pi/(2 k1) - rho so the hull stays in an open
    hemisphere.
    """
    if not lam > 0:
        raise DomainError("lambda must be positive")
    k1 = m.k1
    rho = math.atan2(k1, lam)
    delta = 0.5 * k1 * separation
    if not (0.0 <= delta < math.pi / 2 - rho):
        raise DomainError("separation too large (or negative) for a racetrack in a hemisphere")
    c1, c2 = to_xyz(delta, 0.0), to_xyz(delta, math.pi)
    nz = -math.sin(rho) / math.cos(delta)
    ny = math.sqrt(max(0.0, 1.0 - nz * nz))
    nu_up, nu_dn = np.array([0.0, ny, nz]), np.array([0.0, -ny, nz])

    def touch(c, nu):
        return (c + math.sin(rho) * nu) / math.cos(rho)

    def piece(center, r, p, q):
        ext = (angle_on_circle(center, q) - angle_on_circle(center, p)) % TWO_PI
        return (center, r, p, ext)

    p1u, p1d, p2u, p2d = touch(c1, nu_up), touch(c1, nu_dn), touch(c2, nu_up), touch(c2, nu_dn)
    pieces = [piece(c1, rho, p1d, p1u), piece(c2, rho, p2u, p2d)]
    if delta > 0:
        pieces.insert(1, piece(-nu_up, math.pi / 2, p1u, p2u))
        pieces.append(piece(-nu_dn, math.pi / 2, p2d, p1d))
    return arcs_from_circles(m, pieces, lam, bound="upper")


def racetrack_length_bound(A: float, lam: float, m: Metric = UNIT) -> float:
    """Largest length of a curve with curvature <= lambda enclosing area A.

    2 pi/k1 + (2 pi - k1^2 A)/lambda - (4/k1) arctan(k1 tan(y)/q), with
    q = sqrt(lambda^2 + k1^2) and y = (2 pi - k1^2 A) q / (4 lambda); the
    arctan is continued through y = pi/2 via atan2.  This is the dual of
    :func:`lune_area` under L* = 2 pi - A.
    """
    k1 = m.k1
    x = TWO_PI - k1 * k1 * A
    q = math.hypot(lam, k1)
    if not x > 0:
        raise DomainError("area outside the range of curves with curvature <= lambda")
    y = x * q / (4.0 * lam)
    if y > math.pi / 2 * (1 + 1e-9):
        raise DomainError("area below the circle of curvature lambda")
    return (TWO_PI + k1 * x / lam - 4.0 * math.atan2(k1 * math.sin(y), q * math.cos(y))) / k1


def upper_bound_slack(curve, tol: float = 1e-8) -> float:
    """L_race(A(curve)) - L(curve); non-negative when curvature lies in [0, lambda].

    Raises
    ------
    CurvatureRangeError
        If the measured curvature leaves [0, lambda] by more than the tolerance.
    """
    if isinstance(curve, ArcPolygon):
        kap = curve.curvatures()
        if kap.max() > curve.lam * (1 + 1e-12) + tol or np.any(curve.turning_angles() > 1e-9):
            raise CurvatureRangeError("curvature exceeds lambda")
        L, A = curve.length(), curve.area()
    else:
        rep = measure(curve)
        if rep.radius_min < 1.0 / curve.lam - max(tol, 1e-6):
            raise CurvatureRangeError("curvature exceeds lambda")
        L, A = rep.length, rep.area
    return racetrack_length_bound(A, curve.lam, curve.m) - L


def euclid_upper_bound(A: float, lam: float) -> float:
    """Planar racetrack bound L <= lambda A + pi/lambda."""
    if not (A > 0 and lam > 0):
        raise DomainError("need A > 0 and lambda > 0")
    return lam * A + math.pi / lam


# --- random test shapes ---------------------------------------------------------


def random_lambda_polygon(rng: np.random.Generator, n: int, lam: float = 1.0, m: Metric = UNIT, spread=0.95):
    """Random lambda-convex polygon with ``n`` arcs around the chart origin.

    Vertices are drawn at random azimuths (gaps below pi) and distances below
    ``spread`` times the lambda-circle radius, then joined by lambda-arcs.
    Draws that fail convexity are rejected and redrawn.
    """
    if n < 2:
        raise DomainError("a lambda-polygon needs at least two vertices")
    rho = math.atan2(m.k1, lam)
    for _ in range(10000):
        if n == 2:
            th0 = rng.uniform(0, TWO_PI)
            t0, t1 = rng.uniform(0.05, spread, 2) * rho
            V = to_xyz(np.array([t0, t1]), np.array([th0, th0 + math.pi]))
        else:
            theta = np.sort(rng.uniform(0, TWO_PI, n))
            gaps = np.diff(np.concatenate([theta, [theta[0] + TWO_PI]]))
            if gaps.max() >= math.pi * 0.98:
                continue
            t = rng.uniform(0.3, spread, n) * rho
            V = to_xyz(t, theta)
        _, _, turning, ok = kernels.polygon_measure(V, rho)
        if not ok or turning.min() < 0:
            continue
        try:
            poly = polygon_from_vertices(m, lam, V)
        except (DomainError, ConvexityError, ValueError):
            continue
        if _contains_origin(poly):
            return poly
    raise DomainError("could not draw a convex polygon with these parameters")


def _contains_origin(poly: ArcPolygon) -> bool:
    from .curve_model import ArcSupport

    g, _ = ArcSupport(poly).first(np.linspace(0, TWO_PI, 64, endpoint=False))
    return bool(g.min() > 1e-6)


def random_symmetric_polygon(rng: np.random.Generator, lam: float = 1.0, m: Metric = UNIT, spread=0.9):
    """Centrally symmetric 4-arc lambda-polygon: vertices A, B, -A*, -B* about the origin."""
    rho = math.atan2(m.k1, lam)
    for _ in range(10000):
        th_a = rng.uniform(0, TWO_PI)
        th_b = th_a + rng.uniform(0.25, 0.75) * math.pi
        ta, tb = rng.uniform(0.3, spread, 2) * rho
        A, B = to_xyz(ta, th_a), to_xyz(tb, th_b)
        V = np.array([A, B, to_xyz(ta, th_a + math.pi), to_xyz(tb, th_b + math.pi)])
        try:
            poly = polygon_from_vertices(m, lam, V)
        except (DomainError, ConvexityError, ValueError):
            continue
        if np.all(poly.turning_angles() > 1e-3):
            return poly
    raise DomainError("could not draw a symmetric polygon")


def trig_curve(rng: np.random.Generator, lam: float = 1.0, radius: float | None = None, modes: int = 4, amp=0.02):
    """Smooth random perturbation of a circle's support, unit sphere.

    Returns a :class:`TrigSupport` with h = radius + small trigonometric
    terms.  The default radius is 0.75 times the lambda-circle's, which leaves
    room for the perturbation to stay lambda-convex.
    """
    from .curve_model import TrigSupport

    r = 0.75 * math.atan2(1.0, lam) if radius is None else radius
    k = np.arange(1, modes + 1)
    a = rng.normal(size=modes) * amp / k**2
    b = rng.normal(size=modes) * amp / k**2
    return TrigSupport(r, a, b)
