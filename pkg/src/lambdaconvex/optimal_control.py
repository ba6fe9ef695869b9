"""Optimal-control form of the area-minimisation problem and its PMP checks.

Unit sphere, lambda = 1.  The state is the contact radius x1 = g and its
derivative x2 = g' as functions of the support direction t; the control is
the radius of curvature u = R in [0, 1]:

    x1' = x2,   x2' = u ((1 + x1^2 + x2^2)/(1 + x1^2))^(3/2) - x1,

with area integrand 1 - r, length integrand u r, where
r = sqrt(1 + x1^2 + x2^2)/(1 + x1^2), and periodic boundary conditions.

The Pontryagin function is

    H = p1 x2 + p2 (u w - x1) - lambda0 (1 - r) + lambda1 u r,
    w = ((1 + x1^2 + x2^2)/(1 + x1^2))^(3/2),

linear in u with switching function H1 = p2 w + lambda1 r.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from ._backend import kernels
from .errors import DomainError, InfeasibleError
from .sphere_core import TWO_PI

N_STEPS = 2**16


@dataclass(frozen=True)
class ControlState:
    """State (x1, x2) and control u at parameter t."""

    t: float
    x1: float
    x2: float
    u: float = 0.0

    def __post_init__(self):
        if not (-1e-12 <= self.u <= 1.0 + 1e-12):
            raise DomainError("control must lie in [0, 1]")


@dataclass(frozen=True)
class AdjointState:
    """Adjoint variables and multipliers (lambda0 for the objective, lambda1 for length)."""

    p1: float
    p2: float
    lambda0: float = 1.0
    lambda1: float = 0.0

    @property
    def trivial(self) -> bool:
        return self.lambda0 == 0 and self.lambda1 == 0 and self.p1 == 0 and self.p2 == 0


def _q(x1, x2):
    q = 1.0 + x1 * x1
    s2 = q + x2 * x2
    return q, s2


def dynamics(s: ControlState) -> tuple[float, float]:
    """Right-hand side (x1', x2') of the controlled system."""
    q, s2 = _q(s.x1, s.x2)
    return s.x2, s.u * (s2 / q) ** 1.5 - s.x1


def pontryagin_H(s: ControlState, a: AdjointState) -> tuple[float, float]:
    """Pontryagin function H and switching function H1 = dH/du."""
    q, s2 = _q(s.x1, s.x2)
    r = math.sqrt(s2) / q
    w = (s2 / q) ** 1.5
    H1 = a.p2 * w + a.lambda1 * r
    H = a.p1 * s.x2 - a.p2 * s.x1 - a.lambda0 * (1.0 - r) + s.u * H1
    return H, H1


def adjoint_rhs(s: ControlState, a: AdjointState) -> tuple[float, float]:
    """(p1', p2') = -dH/dx."""
    y = np.array([s.x1, s.x2, a.p1, a.p2, 0.0, 0.0])
    out = np.zeros(6)
    from ._kernels_py import _rhs

    _rhs(y, s.u, a.lambda0, a.lambda1, True, out)
    return float(out[2]), float(out[3])


def bang_bang_control(H1_value: float, lambda1: float) -> float:
    """Maximising control: 1 if H1 > 0, 0 if H1 < 0, lambda1 on H1 = 0."""
    if H1_value > 0:
        return 1.0
    if H1_value < 0:
        return 0.0
    return float(lambda1)


def singular_adjoint(s: ControlState, lambda1: float, lambda0: float = 1.0) -> tuple[float, float]:
    """Adjoint values that keep H1 and its derivative at zero on a singular arc.

    p2 = -lambda1 sqrt(1 + x1^2)/(1 + x1^2 + x2^2),
    p1 = x2 (lambda1 x1 sqrt(1 + x1^2) - lambda0 sqrt(1 + x1^2 + x2^2)) / ((1 + x1^2)(1 + x1^2 + x2^2)).

    Raises
    ------
    DomainError
        If lambda0 = lambda1 = 0, which forces p = 0 (all multipliers vanish).
    """
    if lambda0 == 0 and lambda1 == 0:
        raise DomainError("lambda0 = lambda1 = 0 gives the trivial multiplier")
    q, s2 = _q(s.x1, s.x2)
    sq = math.sqrt(q)
    p2 = -lambda1 * sq / s2
    p1 = s.x2 * (lambda1 * s.x1 * sq - lambda0 * math.sqrt(s2)) / (q * s2)
    return p1, p2


def legendre_clebsch_value(s: ControlState) -> float:
    """-(d/du) d^2 H1/dt^2 on a singular arc: (1 + x1^2 + x2^2)^(3/2) / (1 + x1^2)^3.

    Positive everywhere, so the necessary condition for an optimal singular
    arc of order one fails.
    """
    q, s2 = _q(s.x1, s.x2)
    return s2**1.5 / q**3


# --- schedules and trajectories ----------------------------------------------------


@dataclass(frozen=True)
class Schedule:
    """Piecewise-constant control: ``values[i]`` on [breaks[i], breaks[i+1]], breaks spanning [0, 2 pi]."""

    breaks: tuple
    values: tuple

    def __post_init__(self):
        b = np.asarray(self.breaks, dtype=float)
        if len(self.values) != len(b) - 1 or len(b) < 2:
            raise DomainError("need one control value per interval")
        if abs(b[0]) > 1e-12 or abs(b[-1] - TWO_PI) > 1e-12 or np.any(np.diff(b) < 0):
            raise DomainError("breaks must increase from 0 to 2 pi")
        if any(v not in (0.0, 1.0) for v in self.values):
            raise DomainError("bang-bang schedules take values in {0, 1}")

    @property
    def switches(self) -> np.ndarray:
        """Interior switch points (where the value changes)."""
        b = np.asarray(self.breaks)
        v = np.asarray(self.values)
        idx = [i for i in range(1, len(v)) if v[i] != v[i - 1]]
        return b[idx]

    @classmethod
    def from_switches(cls, switches, first_value: float) -> "Schedule":
        sw = np.sort(np.mod(np.asarray(switches, dtype=float), TWO_PI))
        breaks = np.concatenate([[0.0], sw, [TWO_PI]])
        vals, v = [], float(first_value)
        for _ in range(len(breaks) - 1):
            vals.append(v)
            v = 1.0 - v
        return cls(tuple(breaks), tuple(vals))


def schedule_from_polygon(poly):
    """Bang-bang schedule and initial state of a lambda = k1 polygon.

    Vertex support ranges [alpha_i, beta_i] carry u = 0, arcs u = 1.
    """
    from .curve_model import ArcSupport

    if abs(poly.lam - poly.m.k1) > 1e-12 * poly.m.k1 or poly.bound != "lower":
        raise DomainError("the control problem is posed for lambda = k1 curves")
    pieces = []
    for v in poly.vertices():
        pieces.append((v.alpha % TWO_PI, v.beta - v.alpha))
    pts = []
    for a, w in pieces:
        pts.append((a, 0.0))
        pts.append(((a + w) % TWO_PI, 1.0))
    pts.sort()
    src = ArcSupport(poly)
    g, g1 = src.first(np.array([0.0]))
    if not pts:
        return Schedule((0.0, TWO_PI), (1.0,)), (float(g[0]), float(g1[0]))
    # the value in force at t = 0 is the one set by the last point before 2 pi
    first = pts[-1][1]
    breaks = [0.0] + [p for p, _ in pts] + [TWO_PI]
    values = [first] + [v for _, v in pts]
    keep_b, keep_v = [0.0], []
    for i, v in enumerate(values):
        if breaks[i + 1] - breaks[i] <= 0:
            continue
        keep_v.append(v)
        keep_b.append(breaks[i + 1])
    return Schedule(tuple(keep_b), tuple(keep_v)), (float(g[0]), float(g1[0]))


@dataclass
class ControlTrajectory:
    """Integrated trajectory on the RK4 node grid."""

    schedule: Schedule
    t: np.ndarray
    x: np.ndarray  # (n, 2)
    u: np.ndarray
    objective: float
    length: float
    L0: float
    periodicity_residual: float
    p: np.ndarray | None = None
    lambda0: float = 1.0
    lambda1: float = 0.0
    n_steps: int = N_STEPS

    @property
    def constraint_residual(self) -> float:
        return self.length - self.L0

    def H1(self) -> np.ndarray:
        if self.p is None:
            raise DomainError("trajectory has no adjoint")
        x1, x2 = self.x[:, 0], self.x[:, 1]
        q = 1.0 + x1 * x1
        s2 = q + x2 * x2
        return self.p[:, 1] * (s2 / q) ** 1.5 + self.lambda1 * np.sqrt(s2) / q

    def to_csv(self, stride: int = 1) -> str:
        """CSV text with columns t, x1, x2, u, p1, p2, H1."""
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["t", "x1", "x2", "u", "p1", "p2", "H1"])
        has_p = self.p is not None
        h1 = self.H1() if has_p else None
        f = lambda v: format(float(v), ".17g")  # noqa: E731
        for i in range(0, self.t.size, stride):
            p1, p2, hh = (self.p[i, 0], self.p[i, 1], h1[i]) if has_p else (math.nan, math.nan, math.nan)
            w.writerow([f(self.t[i]), f(self.x[i, 0]), f(self.x[i, 1]), f(self.u[i]), f(p1), f(p2), f(hh)])
        return buf.getvalue()


def _run(schedule: Schedule, y0, lam0=0.0, lam1=0.0, adjoint=False, record=False, n_steps=N_STEPS):
    return kernels.integrate(
        np.asarray(y0, dtype=float),
        np.asarray(schedule.breaks, dtype=float),
        np.asarray(schedule.values, dtype=float),
        float(lam0),
        float(lam1),
        bool(adjoint),
        int(n_steps),
        bool(record),
    )


def integrate_trajectory(schedule: Schedule, x0, L0: float, n_steps: int = N_STEPS) -> ControlTrajectory:
    """Integrate the state equations under ``schedule`` from ``x0`` over [0, 2 pi].

    Fixed-step RK4 with every break on a node.

    Raises
    ------
    InfeasibleError
        If x1 leaves [-1, 10] (the contact radius blows up).
    """
    y0 = [x0[0], x0[1], 0.0, 0.0, 0.0, 0.0]
    y, ts, ys, us = _run(schedule, y0, record=True, n_steps=n_steps)
    if not np.all(np.isfinite(ys)) or ys[:, 0].min() < -1.0 or ys[:, 0].max() > 10.0:
        raise InfeasibleError("trajectory leaves the admissible region")
    per = float(math.hypot(y[0] - x0[0], y[1] - x0[1]))
    return ControlTrajectory(schedule, ts, ys[:, 0:2].copy(), us, float(y[4]), float(y[5]), float(L0), per, n_steps=n_steps)


def shoot(schedule: Schedule, x0, L0: float, tol: float = 1e-11, max_iter: int = 30, n_steps: int = N_STEPS):
    """Damped Gauss-Newton on (x1(0), x2(0), switch points) for closure and length.

    Residual: (x(2 pi) - x(0), length - L0).  Returns the adjusted schedule
    and initial state.
    """
    sw = schedule.switches
    first = schedule.values[0]
    z = np.concatenate([np.asarray(x0, dtype=float), sw])

    def resid(z):
        sch = Schedule.from_switches(z[2:], first) if z.size > 2 else schedule
        y, *_ = _run(sch, [z[0], z[1], 0, 0, 0, 0], n_steps=n_steps)
        return np.array([y[0] - z[0], y[1] - z[1], y[5] - L0])

    r = resid(z)
    for _ in range(max_iter):
        if np.linalg.norm(r) < tol:
            break
        J = np.empty((3, z.size))
        for k in range(z.size):
            dz = np.zeros_like(z)
            dz[k] = 1e-7
            J[:, k] = (resid(z + dz) - resid(z - dz)) / 2e-7
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        t = 1.0
        while t > 1e-4:
            zn = z + t * step
            try:
                rn = resid(zn)
            except DomainError:
                rn = None
            if rn is not None and np.linalg.norm(rn) < np.linalg.norm(r):
                z, r = zn, rn
                break
            t *= 0.5
        else:
            break
    sch = Schedule.from_switches(z[2:], first) if z.size > 2 else schedule
    return sch, (float(z[0]), float(z[1])), float(np.linalg.norm(r))


# --- PMP verification ------------------------------------------------------------


@dataclass(frozen=True)
class PMPReport:
    """Outcome of fitting multipliers to a bang-bang trajectory."""

    consistent: bool
    lambda0: float
    lambda1: float
    p0: tuple
    max_H1_at_switches: float
    adjoint_periodicity: float
    sign_consistent: bool
    sign_violations: int
    H1_zeros: tuple
    switches: tuple

    def as_dict(self) -> dict:
        return {
            "consistent": self.consistent,
            "lambda0": self.lambda0,
            "lambda1": self.lambda1,
            "p1_0": self.p0[0],
            "p2_0": self.p0[1],
            "max_H1_at_switches": self.max_H1_at_switches,
            "adjoint_periodicity": self.adjoint_periodicity,
            "sign_consistent": self.sign_consistent,
            "sign_violations": self.sign_violations,
            "H1_zeros": list(self.H1_zeros),
            "switches": list(self.switches),
        }


def _H1_of(y):
    q = 1.0 + y[..., 0] ** 2
    s2 = q + y[..., 1] ** 2
    return y[..., 3] * (s2 / q) ** 1.5, np.sqrt(s2) / q


def verify_pmp(traj: ControlTrajectory, tol: float = 1e-6) -> tuple[PMPReport, ControlTrajectory]:
    """Fit (p1(0), p2(0), lambda1) with lambda0 = 1 and test the maximum condition.

    Along a fixed state trajectory the adjoint system is linear in
    (p(0), lambda0, lambda1), so H1 at the switches and the adjoint
    periodicity gap are affine in the unknowns; they are fitted by linear
    least squares.  The trajectory passes if the fit is exact to ``tol``
    (|H1| at switches, adjoint periodicity) and H1 has the sign demanded by
    the schedule on every interval.

    Returns the report and the trajectory with adjoints attached.
    """
    sch = traj.schedule
    x0 = traj.x[0]
    sw = sch.switches
    # affine basis: columns p1(0), p2(0), lambda1; offset lambda0 = 1
    basis = [([1.0, 0.0], 0.0, 0.0), ([0.0, 1.0], 0.0, 0.0), ([0.0, 0.0], 0.0, 1.0), ([0.0, 0.0], 1.0, 0.0)]
    runs = []
    for p0, l0, l1 in basis:
        y0 = [x0[0], x0[1], p0[0], p0[1], 0.0, 0.0]
        runs.append(_run(sch, y0, l0, l1, adjoint=True, record=True, n_steps=traj.n_steps))
    ts = runs[0][1]
    sw_idx = [int(np.argmin(np.abs(ts - s))) for s in sw]
    cols = []
    for (p0, l0, l1), (yend, _, ys, _) in zip(basis, runs):
        h_p2, r = _H1_of(ys)
        H1 = h_p2 + l1 * r
        gap = yend[2:4] - np.asarray(p0)
        cols.append(np.concatenate([H1[sw_idx], gap]))
    M = np.column_stack(cols[:3])
    b = -cols[3]
    if M.shape[0] >= 3:
        z = np.linalg.lstsq(M, b, rcond=None)[0]
    else:
        z = np.zeros(3)
    p0 = (float(z[0]), float(z[1]))
    lam1 = float(z[2])
    y0 = [x0[0], x0[1], p0[0], p0[1], 0.0, 0.0]
    yend, ts, ys, us = _run(sch, y0, 1.0, lam1, adjoint=True, record=True, n_steps=traj.n_steps)
    h_p2, r = _H1_of(ys)
    H1 = h_p2 + lam1 * r
    at_sw = float(np.max(np.abs(H1[sw_idx]))) if sw_idx else 0.0
    per = float(np.hypot(yend[2] - p0[0], yend[3] - p0[1]))
    # sign test away from the switch nodes
    near = np.zeros(ts.size, bool)
    for i in sw_idx:
        near[max(0, i - 1) : i + 2] = True
    want = np.where(us > 0.5, 1.0, -1.0)
    bad = (~near) & (want * H1 <= 0)
    zeros = _locate_zeros(sch, ts, ys, us, H1, 1.0, lam1)
    out = ControlTrajectory(
        sch, ts, ys[:, 0:2].copy(), us, traj.objective, traj.length, traj.L0,
        traj.periodicity_residual, ys[:, 2:4].copy(), 1.0, lam1, traj.n_steps,
    )
    sign_ok = not bool(bad.any())
    rep = PMPReport(
        consistent=bool(at_sw < tol and per < tol and sign_ok),
        lambda0=1.0,
        lambda1=lam1,
        p0=p0,
        max_H1_at_switches=at_sw,
        adjoint_periodicity=per,
        sign_consistent=sign_ok,
        sign_violations=int(bad.sum()),
        H1_zeros=tuple(zeros),
        switches=tuple(float(s) for s in sw),
    )
    return rep, out


def _locate_zeros(sch, ts, ys, us, H1, lam0, lam1, tol=1e-12):
    """Zeros of H1 by bisection of a partial RK4 step between sign-changing nodes."""
    zeros = []
    sgn = np.sign(H1)
    for i in np.flatnonzero(sgn[:-1] * sgn[1:] < 0):
        a, b = 0.0, float(ts[i + 1] - ts[i])
        u = float(us[i + 1])
        fa = H1[i]
        while b - a > tol:
            mid = 0.5 * (a + b)
            y = kernels.rk4_step(ys[i], u, lam0, lam1, True, mid)
            hp, r = _H1_of(y)
            fm = hp + lam1 * r
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        zeros.append(float(ts[i] + 0.5 * (a + b)))
    return zeros
