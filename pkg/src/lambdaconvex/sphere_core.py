"""Elementary geometry of the round sphere S^2(k1^2).

All routines work internally on the unit sphere (k1 = 1) and rescale at the
boundary: lengths are multiplied by ``k1`` on the way in and divided on the
way out, areas by ``k1**2``.

Points are handled in two forms.  A :class:`SpherePoint` carries polar
coordinates ``(t, theta)`` about a fixed origin O (the north pole of the unit
sphere); the helpers :func:`to_xyz` / :func:`from_xyz` convert to and from unit
vectors of R^3, which is what most of the heavy lifting uses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class Metric:
    """Round sphere of Gaussian curvature ``k1**2``."""

    k1: float = 1.0

    def __post_init__(self):
        if not (self.k1 > 0.0 and math.isfinite(self.k1)):
            raise DomainError(f"k1 must be positive and finite, got {self.k1!r}")

    @property
    def max_distance(self) -> float:
        """Distance between antipodal points, pi / k1."""
        return math.pi / self.k1

    def lune_length_max(self, lam: float) -> float:
        """Length of the full circle of geodesic curvature ``lam``."""
        return TWO_PI / math.hypot(lam, self.k1)

    def circle_radius(self, kappa: float) -> float:
        """Geodesic radius of the circle of geodesic curvature ``kappa >= 0``."""
        if kappa < 0:
            raise DomainError("geodesic curvature must be non-negative")
        return math.atan2(1.0, kappa / self.k1) / self.k1


UNIT = Metric(1.0)


@dataclass(frozen=True)
class SpherePoint:
    """Polar coordinates about the chart origin: distance ``t`` and azimuth ``theta``."""

    t: float
    theta: float

    def __post_init__(self):
        if self.t < 0:
            raise DomainError("polar distance t must be non-negative")
        object.__setattr__(self, "theta", self.theta % TWO_PI)

    def xyz(self, m: Metric = UNIT) -> np.ndarray:
        return to_xyz(m.k1 * self.t, self.theta)

    @classmethod
    def from_xyz(cls, v, m: Metric = UNIT) -> "SpherePoint":
        t, theta = from_xyz(v)
        return cls(float(t) / m.k1, float(theta))


# --- unit-sphere vector helpers -------------------------------------------------


def to_xyz(t, theta) -> np.ndarray:
    """Unit vector(s) of the point(s) with polar coordinates (t, theta), k1 = 1."""
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    st = np.sin(t)
    return np.stack([st * np.cos(theta), st * np.sin(theta), np.cos(t)], axis=-1)


def from_xyz(v):
    """Inverse of :func:`to_xyz`; theta is reduced to [0, 2 pi)."""
    v = np.asarray(v, dtype=float)
    rxy = np.hypot(v[..., 0], v[..., 1])
    t = np.arctan2(rxy, v[..., 2])
    theta = np.mod(np.arctan2(v[..., 1], v[..., 0]), TWO_PI)
    return t, theta


def tangent_frame(t, theta):
    """Orthonormal tangent frame (e_t, e_theta) at the point (t, theta).

    The frame is defined through theta even at the pole t = 0, so a circle's
    start angle is well defined for every centre that is not the antipode.
    """
    t = np.asarray(t, dtype=float)
    theta = np.asarray(theta, dtype=float)
    ct, st = np.cos(t), np.sin(t)
    c, s = np.cos(theta), np.sin(theta)
    e1 = np.stack([ct * c, ct * s, -st], axis=-1)
    e2 = np.stack([-s, c, np.zeros_like(c)], axis=-1)
    return e1, e2


def frame_of(center: np.ndarray):
    """Tangent frame at a unit vector ``center`` (via its polar coordinates)."""
    t, theta = from_xyz(center)
    return tangent_frame(t, theta)


def circle_point(center, rho, psi):
    """Point at angle ``psi`` on the circle of radius ``rho`` about ``center``.

    ``psi`` is measured counterclockwise (seen from outside the sphere) from
    the frame vector e_t of :func:`frame_of`.
    """
    center = np.asarray(center, dtype=float)
    e1, e2 = frame_of(center)
    psi = np.asarray(psi, dtype=float)[..., None]
    return math.cos(rho) * center + math.sin(rho) * (np.cos(psi) * e1 + np.sin(psi) * e2)


def angle_on_circle(center, p) -> float:
    """Angle of ``p`` around ``center`` in the convention of :func:`circle_point`."""
    e1, e2 = frame_of(np.asarray(center, dtype=float))
    return float(math.atan2(float(np.dot(p, e2)), float(np.dot(p, e1))))


def distance(p, q):
    """Geodesic distance on the unit sphere, stable for close and far points."""
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    return np.arctan2(np.linalg.norm(np.cross(p, q), axis=-1), np.sum(p * q, axis=-1))


def normalize(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v, axis=-1, keepdims=True)


def signed_triangle_area(p, q, r):
    """Oriented area of the geodesic triangle pqr (positive when counterclockwise)."""
    p, q, r = (np.asarray(x, dtype=float) for x in (p, q, r))
    det = np.sum(p * np.cross(q, r), axis=-1)
    den = 1.0 + np.sum(p * q, axis=-1) + np.sum(q * r, axis=-1) + np.sum(r * p, axis=-1)
    return 2.0 * np.arctan2(det, den)


def point_reflection(mid) -> np.ndarray:
    """Rotation by pi about ``mid``: the central symmetry of the sphere through ``mid``."""
    mid = normalize(mid)
    return 2.0 * np.outer(mid, mid) - np.eye(3)


def rotation_between(a0, b0, a1, b1) -> np.ndarray:
    """Orientation-preserving isometry taking a0 -> a1 and b0 -> b1.

    Requires |a0 b0| == |a1 b1|; the b-points only fix the rotation about a.
    """

    def frame(a, b):
        a = normalize(a)
        n = normalize(np.cross(a, b))
        return np.column_stack([a, n, np.cross(a, n)])

    return frame(a1, b1) @ frame(a0, b0).T


def rotation_to_pole(p) -> np.ndarray:
    """A rotation taking unit vector ``p`` to the north pole (0, 0, 1)."""
    p = normalize(p)
    z = np.array([0.0, 0.0, 1.0])
    axis = np.cross(p, z)
    s = np.linalg.norm(axis)
    c = float(np.dot(p, z))
    if s < 1e-15:
        return np.eye(3) if c > 0 else np.diag([1.0, -1.0, -1.0])
    k = axis / s
    kx = np.array([[0, -k[2], k[1]], [k[2], 0, -k[0]], [-k[1], k[0], 0]])
    return np.eye(3) + s * kx + (1 - c) * kx @ kx


# --- operations ----------------------------------------------------------------


def geodesic_circle(rho: float, m: Metric = UNIT):
    """Geodesic curvature, circumference and enclosed area of a circle.

    Parameters
    ----------
    rho : float
        Geodesic radius, ``0 < rho < pi / (2 k1)``.
    m : Metric

    Returns
    -------
    (curvature, length, area) : tuple of float
    """
    r = m.k1 * rho
    if not (0.0 < r < math.pi / 2):
        raise DomainError(f"circle radius must lie in (0, pi/(2 k1)), got {rho!r}")
    kappa = m.k1 * math.cos(r) / math.sin(r)
    length = TWO_PI * math.sin(r) / m.k1
    area = TWO_PI * (1.0 - math.cos(r)) / m.k1**2
    return kappa, length, area


def triangle_area(a: float, b: float, alpha: float, m: Metric = UNIT) -> float:
    """Area of the geodesic triangle with sides ``a``, ``b`` and included angle ``alpha``.

    Uses the half-area tangent: tan(f/2) = sin a sin b sin alpha /
    ((1 + cos a)(1 + cos b) + sin a sin b cos alpha), evaluated with atan2 so
    that triangles with area above pi stay on the right branch.
    """
    a_n, b_n = m.k1 * a, m.k1 * b
    if not (0.0 <= a_n < math.pi and 0.0 <= b_n < math.pi):
        raise DomainError("triangle sides must lie in [0, pi/k1)")
    if not (0.0 <= alpha <= math.pi):
        raise DomainError("included angle must lie in [0, pi]")
    sa, sb = math.sin(a_n), math.sin(b_n)
    num = sa * sb * math.sin(alpha)
    den = (1.0 + math.cos(a_n)) * (1.0 + math.cos(b_n)) + sa * sb * math.cos(alpha)
    return 2.0 * math.atan2(num, den) / m.k1**2


def triangle_area_argmax(a: float, b: float, m: Metric = UNIT) -> float:
    """Included angle maximising :func:`triangle_area` for fixed sides.

    The maximiser solves cos(alpha0) = -tan(a/2) tan(b/2).
    """
    a_n, b_n = m.k1 * a, m.k1 * b
    if not (0.0 < a_n < math.pi and 0.0 < b_n < math.pi):
        raise DomainError("sides must lie in (0, pi/k1)")
    c = math.tan(a_n / 2) * math.tan(b_n / 2)
    if c > 1.0 + 1e-15:
        raise DomainError("tan(a/2) tan(b/2) > 1: area is increasing on all of [0, pi]")
    return math.acos(-min(c, 1.0))
