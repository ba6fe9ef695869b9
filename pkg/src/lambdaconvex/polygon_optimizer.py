"""Discrete area minimisation over lambda-convex polygons at fixed length.

Three tools:

* :func:`diameter` and :func:`symmetrize` split a polygon along a longest
  chord and reflect each half through the chord's midpoint, giving two
  centrally symmetric polygons whose mean area is the original area.
* :func:`four_bar_deform` moves a centrally symmetric polygon as a hinged
  quadrilateral of rigid arc chains, which keeps the length and lowers the
  area, until two corners flatten out.  :func:`deform_to_lune` repeats this
  down to a lune.
* :func:`minimize_area` is a seeded multistart pattern search over vertex
  positions with the length held fixed.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from ._backend import kernels
from .curve_model import ArcPolygon, arcs_from_circles, polygon_from_vertices
from .errors import DomainError, RigidityError
from .extremal_shapes import lune_area
from .sphere_core import (
    TWO_PI,
    UNIT,
    Metric,
    distance,
    frame_of,
    normalize,
    point_reflection,
    rotation_between,
    triangle_area_argmax,
)

_EXTENT_TOL = 1e-9


# --- diameter and symmetrisation --------------------------------------------------


def _farthest_on_poly(poly: ArcPolygon, p: np.ndarray):
    """Boundary point of ``poly`` farthest from ``p``: (point, arc index, angle)."""
    tab = poly.table()
    best = (-1.0, None, -1, 0.0)
    for j, row in enumerate(tab):
        c, e1, e2, rho, psi0, ext = row[0:3], row[3:6], row[6:9], row[9], row[10], row[11]
        cands = [psi0, psi0 + ext]
        psi = math.atan2(-float(p @ e2), -float(p @ e1))
        off = (psi - psi0) % TWO_PI
        if off <= ext:
            cands.append(psi0 + off)
        for s in cands:
            q = math.cos(rho) * c + math.sin(rho) * (math.cos(s) * e1 + math.sin(s) * e2)
            d = float(distance(p, q))
            if d > best[0]:
                best = (d, q, j, s)
    return best[1], best[2], best[3]


def diameter(poly: ArcPolygon, samples: int = 512):
    """Longest chord of the curve.

    A coarse all-pairs search over boundary samples seeds alternating exact
    farthest-point steps, which converge to a pair whose chord meets the
    curve orthogonally at both ends.

    Returns
    -------
    (P, Q, length) : unit vectors and the physical length.
    """
    pts = poly.boundary_points(samples)
    G = np.clip(pts @ pts.T, -1.0, 1.0)
    i, j = np.unravel_index(np.argmin(G), G.shape)
    P, Q = pts[i], pts[j]
    d = float(distance(P, Q))
    for _ in range(100):
        Q, _, _ = _farthest_on_poly(poly, P)
        P, _, _ = _farthest_on_poly(poly, Q)
        dn = float(distance(P, Q))
        if dn - d < 1e-15:
            d = dn
            break
        d = dn
    return P, Q, d / poly.m.k1


def _locate(poly: ArcPolygon, p: np.ndarray):
    """Arc index and angle of the boundary point nearest to ``p``."""
    tab = poly.table()
    best = (math.inf, -1, 0.0)
    for j, row in enumerate(tab):
        c, e1, e2, rho, psi0, ext = row[0:3], row[3:6], row[6:9], row[9], row[10], row[11]
        psi = math.atan2(float(p @ e2), float(p @ e1))
        off = min(max((psi - psi0) % TWO_PI, 0.0), ext) if (psi - psi0) % TWO_PI <= ext else None
        cands = [0.0, ext] + ([off] if off is not None else [])
        for o in cands:
            s = psi0 + o
            q = math.cos(rho) * c + math.sin(rho) * (math.cos(s) * e1 + math.sin(s) * e2)
            d = float(np.linalg.norm(q - p))
            if d < best[0]:
                best = (d, j, o)
    return best[1], best[2]


def _half(poly: ArcPolygon, P: np.ndarray, Q: np.ndarray):
    """Pieces (center, rho, start point, extent) of the boundary from P to Q (counterclockwise)."""
    tab = poly.table()
    n = tab.shape[0]
    jp, op = _locate(poly, P)
    jq, oq = _locate(poly, Q)
    spans = []
    if jp == jq and oq > op:
        spans.append((jp, op, oq))
    else:
        spans.append((jp, op, tab[jp, 11]))
        j = (jp + 1) % n
        while j != jq:
            spans.append((j, 0.0, tab[j, 11]))
            j = (j + 1) % n
        spans.append((jq, 0.0, oq))
    pieces = []
    for j, a, b in spans:
        if b - a > _EXTENT_TOL:
            row = tab[j]
            pieces.append((row[0:3], row[9], poly._points(j, row[10] + a), b - a))
    return pieces


def _reflect_pieces(pieces, R):
    return [(R @ c, rho, R @ p, ext) for c, rho, p, ext in pieces]


def symmetrize(poly: ArcPolygon):
    """Split along the diameter PQ and reflect each half through its midpoint.

    Returns
    -------
    (gamma1, gamma2) : ArcPolygon
        Centrally symmetric curves built from the P->Q and Q->P halves; their
        lengths are twice the half lengths and their mean area is the area of
        ``poly``.

    Raises
    ------
    ConvexityError
        If a reflected curve is not convex (diameter not found accurately).
    """
    P, Q, _ = diameter(poly)
    R = point_reflection(P + Q)
    out = []
    for a, b in ((P, Q), (Q, P)):
        half = _half(poly, a, b)
        pieces = half + _reflect_pieces(half, R)
        out.append(arcs_from_circles(poly.m, pieces, poly.lam, poly.bound))
    return out[0], out[1]


# --- four-bar linkage ----------------------------------------------------------------


def _merge(poly: ArcPolygon, tol: float = 1e-9) -> ArcPolygon:
    """Join consecutive arcs that continue each other on the same circle."""
    tab = poly.table()
    turning = poly.turning_angles()
    starts, _ = poly.endpoints()
    n = tab.shape[0]
    pieces = [[tab[j, 0:3], tab[j, 9], starts[j], tab[j, 11]] for j in range(n)]
    joinable = [
        turning[j] < tol
        and np.linalg.norm(tab[j, 0:3] - tab[(j + 1) % n, 0:3]) < 1e-10
        and abs(tab[j, 9] - tab[(j + 1) % n, 9]) < 1e-12
        for j in range(n)
    ]
    if not any(joinable) or n == 1:
        return poly
    # rotate so that piece 0 starts after a real junction
    first = next((j for j in range(n) if not joinable[j]), None)
    if first is None:
        c, rho, p, _ = pieces[0]
        return arcs_from_circles(poly.m, [(c, rho, p, TWO_PI)], poly.lam, poly.bound)
    order = [(first + 1 + k) % n for k in range(n)]
    merged = []
    for j in order:
        if merged and joinable[(j - 1) % n]:
            merged[-1][3] += pieces[j][3]
        else:
            merged.append(list(pieces[j]))
    return arcs_from_circles(poly.m, [tuple(p) for p in merged], poly.lam, poly.bound)


def _corners(poly: ArcPolygon, tol: float = 1e-9):
    """Corner points, their junction indices and jump angles."""
    turning = poly.turning_angles()
    _, ends = poly.endpoints()
    idx = [j for j in range(len(turning)) if turning[j] > tol]
    return ends[idx], idx, turning[idx]


def _tangent_dir(a, b):
    """Unit tangent at ``a`` of the geodesic towards ``b``."""
    t = b - (a @ b) * a
    return t / np.linalg.norm(t)


def _angle_at(a, b, c):
    """Angle at ``a`` between the geodesics to ``b`` and ``c``."""
    u, v = _tangent_dir(a, b), _tangent_dir(a, c)
    return math.atan2(float(a @ np.cross(u, v)), float(u @ v))


@dataclass(frozen=True)
class _Linkage:
    hinges: tuple  # indices into corner list: A, B, A_bar, B_bar
    a: float
    b: float
    alpha: float
    alpha0: float
    alpha_end: float


def _linkage(poly: ArcPolygon):
    V, idx, turn = _corners(poly)
    k = len(idx)
    if k < 4 or k % 2:
        raise RigidityError("need a centrally symmetric polygon with at least two corner pairs")
    h = k // 2
    mids = normalize(V[:h] + V[h:])
    if np.max(np.linalg.norm(mids - mids[0], axis=1)) > 1e-8:
        raise DomainError("polygon is not centrally symmetric")
    best = None
    for i in (0, 1):
        A, B, Bb = V[i], V[i + 1], V[(i + 1 + h) % k]
        a, b = float(distance(A, B)), float(distance(A, Bb))
        alpha = abs(_angle_at(A, B, Bb))
        alpha0 = triangle_area_argmax(a, b)
        # the corner at A flattens once alpha has grown by its jump angle
        alpha_end = alpha + turn[i]
        cand = _Linkage((i, i + 1, (i + h) % k, (i + 1 + h) % k), a, b, alpha, alpha0, alpha_end)
        if alpha >= alpha0 - 1e-12 and (best is None or alpha - alpha0 > best.alpha - best.alpha0):
            best = cand
    if best is None:
        raise DomainError("no hinge angle above the maximiser: linkage cannot decrease the area")
    return V, idx, best


def four_bar_deform(poly: ArcPolygon, step: float = math.pi / 180) -> ArcPolygon:
    """One area-decreasing move of the hinged quadrilateral A B A' B'.

    A stays fixed; the hinge angle at A grows by ``step`` (capped where the
    corner at A flattens).  B and B' are placed at their fixed distances from
    A, A' is the reflection of A through the midpoint of BB', and each arc
    chain follows its end points rigidly.  Arcs that end up on a common
    circle are merged.

    Raises
    ------
    RigidityError
        If the polygon has fewer than two corner pairs (a lune).
    """
    V, idx, L = _linkage(poly)
    return _transport(poly, V, idx, L, min(L.alpha + step, L.alpha_end))


def _transport(poly: ArcPolygon, V, idx, L: _Linkage, new_alpha: float) -> ArcPolygon:
    """Polygon with the linkage of ``poly`` opened to hinge angle ``new_alpha``."""
    ia, ib, iab, ibb = L.hinges
    A, B, Ab, Bb = V[ia], V[ib], V[iab], V[ibb]
    # rotate B about A so that the angle B-A-B' becomes new_alpha (B' fixed)
    sgn = 1.0 if _angle_at(A, B, Bb) > 0 else -1.0
    tb = _tangent_dir(A, Bb)
    perp = np.cross(A, tb)
    ang = -sgn * new_alpha
    dirB = math.cos(ang) * tb + math.sin(ang) * perp
    B_new = math.cos(L.a) * A + math.sin(L.a) * dirB
    M = normalize(B_new + Bb)
    Ab_new = point_reflection(M) @ A
    old = {ia: A, ib: B, iab: Ab, ibb: Bb}
    new = {ia: A, ib: B_new, iab: Ab_new, ibb: Bb}
    # chains between consecutive hinges (in corner order) move rigidly
    order = sorted(L.hinges)
    tab = poly.table()
    starts, _ = poly.endpoints()
    n = tab.shape[0]
    rot_of_arc = {}
    for s_i, s in enumerate(order):
        e = order[(s_i + 1) % 4]
        R = rotation_between(old[s], old[e], new[s], new[e])
        j = (idx[s] + 1) % n
        while True:
            rot_of_arc[j] = R
            if j == idx[e]:
                break
            j = (j + 1) % n
    pieces = []
    for j in range(n):
        R = rot_of_arc[j]
        pieces.append((R @ tab[j, 0:3], tab[j, 9], R @ starts[j], tab[j, 11]))
    out = arcs_from_circles(poly.m, pieces, poly.lam, poly.bound)
    return _merge(out, tol=1e-9)


def deform_to_lune(poly: ArcPolygon, step: float = math.pi / 180, max_steps: int = 100000):
    """Open four-bar linkages step by step until a lune remains.

    Each phase fixes one linkage and transports its chains from the polygon
    at the start of the phase, so rounding does not accumulate across steps.
    A phase ends when a corner pair flattens and its arcs merge.

    Returns the list of polygons visited, starting with ``poly``.
    """
    hist = [poly]
    cur = poly
    steps = 0
    while len(_corners(cur)[1]) > 2:
        V, idx, L = _linkage(cur)
        k = 1
        while True:
            alpha = min(L.alpha + k * step, L.alpha_end)
            nxt = _transport(cur, V, idx, L, alpha)
            hist.append(nxt)
            steps += 1
            if steps > max_steps:
                raise RigidityError("deformation did not reach a lune")
            if alpha >= L.alpha_end:
                break
            k += 1
        cur = nxt
    return hist


def is_lune(poly: ArcPolygon, tol: float = 1e-9) -> bool:
    return len(_corners(poly, tol)[1]) <= 2


# --- multistart search -------------------------------------------------------------


@dataclass(frozen=True)
class OptimizerReport:
    best_deficit: float
    L0: float
    n_arcs: int
    seed: int
    iterations: int
    converged_to_lune: bool

    def as_dict(self) -> dict:
        return {
            "best_deficit": self.best_deficit,
            "L0": self.L0,
            "n_arcs": self.n_arcs,
            "seed": self.seed,
            "iterations": self.iterations,
            "converged_to_lune": self.converged_to_lune,
        }


def _measure(V, rho):
    L, A, turning, ok = kernels.polygon_measure(V, rho)
    valid = ok and turning.min() >= -1e-12 and A >= 0.0 and A <= TWO_PI
    return L, A, turning, valid


def _log_map(c, V):
    cosd = np.clip(V @ c, -1.0, 1.0)
    d = np.arccos(cosd)
    t = V - cosd[:, None] * c
    nt = np.linalg.norm(t, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        return np.where(nt[:, None] > 1e-300, t * (d / nt)[:, None], 0.0)


def _exp_map(c, W):
    d = np.linalg.norm(W, axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        u = np.where(d[:, None] > 0, W / d[:, None], 0.0)
    return np.cos(d)[:, None] * c + np.sin(d)[:, None] * u


def _project_length(V, L0, rho):
    """Scale vertices about their centroid so that the polygon length is L0."""
    c = normalize(V.sum(axis=0))
    W = _log_map(c, V)

    def f(s):
        L, _, _, ok = kernels.polygon_measure(_exp_map(c, s * W), rho)
        return L - L0 if ok else 1.0

    if f(1.0) == 0.0:
        return V
    hi = 1.0
    while f(hi) < 0:
        hi *= 1.25
        if hi > 50:
            return None
    lo = 1.0 if f(1.0) < 0 else 0.0
    if f(lo) >= 0:
        lo = 1e-6
        if f(lo) >= 0:
            return None
    s = brentq(f, lo, hi, xtol=1e-15)
    return _exp_map(c, s * W)


def _random_start(rng, n, L0, rho):
    for _ in range(1000):
        if n == 2:
            th0 = rng.uniform(0, TWO_PI)
            theta = np.array([th0, th0 + math.pi])
        else:
            theta = np.sort(rng.uniform(0, TWO_PI, n))
            if np.diff(np.concatenate([theta, [theta[0] + TWO_PI]])).max() >= math.pi:
                continue
        t = rng.uniform(0.3, 1.0, n) * rho * 0.5
        st = np.sin(t)
        V = np.column_stack([st * np.cos(theta), st * np.sin(theta), np.cos(t)])
        V = _project_length(V, L0, rho)
        if V is None:
            continue
        L, A, _, ok = _measure(V, rho)
        if ok and abs(L - L0) < 1e-10:
            return V, A
    raise DomainError("could not find a feasible starting polygon")


def _local_search(V, A, L0, rho, rng, iterations):
    n = V.shape[0]
    step = 0.05 * rho
    it = 0
    while it < iterations and step > 1e-10:
        it += 1
        improved = False
        for k in rng.permutation(n):
            e1, e2 = frame_of(V[k])
            for d in (e1, -e1, e2, -e2):
                W = V.copy()
                W[k] = normalize(V[k] + step * d)
                W = _project_length(W, L0, rho)
                if W is None:
                    continue
                L, An, _, ok = _measure(W, rho)
                if ok and abs(L - L0) < 1e-9 and An < A - 1e-15:
                    V, A, improved = W, An, True
                    break
        if not improved:
            step *= 0.5
    return V, A, it


def _one_start(args):
    seed, n, L0, rho, iterations = args
    rng = np.random.default_rng(seed)
    V, A = _random_start(rng, n, L0, rho)
    V, A, it = _local_search(V, A, L0, rho, rng, iterations)
    return A, V, it


def minimize_area(
    n_arcs: int,
    L0: float,
    seed: int = 0,
    iterations: int = 200,
    lam: float = 1.0,
    m: Metric = UNIT,
    starts: int = 16,
    workers: int = 1,
):
    """Search for the least-area lambda-polygon with ``n_arcs`` arcs and length ``L0``.

    Each start draws a random polygon, rescales it to length ``L0`` and runs
    a pattern search over vertex positions, re-projecting onto the length
    constraint after every move.  The best start wins (ties by start index).

    Returns
    -------
    (best_poly, report) : ArcPolygon, OptimizerReport
    """
    if n_arcs < 2:
        raise DomainError("need at least two arcs")
    L_max = m.lune_length_max(lam)
    if not (0 < L0 <= L_max):
        raise DomainError(f"L0 must lie in (0, {L_max!r}]")
    rho = math.atan2(m.k1, lam)
    L0n = L0 * m.k1
    seeds = np.random.SeedSequence(seed).spawn(starts)
    jobs = [(int(s.generate_state(1)[0]), n_arcs, L0n, rho, iterations) for s in seeds]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_one_start, jobs))
    else:
        results = [_one_start(j) for j in jobs]
    best = min(range(len(results)), key=lambda i: (results[i][0], i))
    A, V, _ = results[best]
    total_it = int(sum(r[2] for r in results))
    poly = _merge(polygon_from_vertices(m, lam, V), tol=1e-9)
    deficit = A / m.k1**2 - lune_area(L0, lam, m)
    _, _, turning, _ = _measure(V, rho)
    lune_like = int(np.sum(turning > 1e-3)) <= 2
    rep = OptimizerReport(float(deficit), float(L0), int(n_arcs), int(seed), total_it, bool(deficit < 1e-4 and lune_like))
    return poly, rep
