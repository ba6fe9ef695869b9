"""Acceptance criteria, one test each; every test prints a single PASS/FAIL line."""

import math
import time

import numpy as np
import pytest

from lambdaconvex import (
    UNIT,
    ControlState,
    LuneSpec,
    Metric,
    SupportCurve,
    TrigSupport,
    area,
    deform_to_lune,
    duality_identities,
    euclid_lower_bound,
    euclid_upper_bound,
    integrate_trajectory,
    length,
    lower_bound_deficit,
    lune_area,
    make_lune,
    make_racetrack,
    measure,
    minimize_area,
    polar_dual,
    racetrack_length_bound,
    schedule_from_polygon,
    support_from_arcs,
    support_from_function,
    upper_bound_slack,
    verify_pmp,
)
from lambdaconvex.extremal_shapes import random_lambda_polygon, random_symmetric_polygon, trig_curve
from lambdaconvex.optimal_control import AdjointState, adjoint_rhs, legendre_clebsch_value, pontryagin_H
from lambdaconvex.polygon_optimizer import is_lune


@pytest.fixture
def report(capsys):
    def emit(n, ok, detail):
        with capsys.disabled():
            print(f"\nAC{n} {'PASS' if ok else 'FAIL'}: {detail}")
        assert ok, detail

    return emit


def test_ac1_circle_suite(report):
    t0 = time.perf_counter()
    worst = 0.0
    for rho in (math.pi / 8, math.pi / 6, math.pi / 4, 0.9 * math.pi / 3):
        curves = [
            SupportCurve(UNIT, 1.0, np.full(4096, rho)),
            support_from_function(UNIT, 1.0, TrigSupport(rho), 4096),
        ]
        for c in curves:
            worst = max(
                worst,
                abs(length(c) - 2 * math.pi * math.sin(rho)),
                abs(area(c) - 2 * math.pi * (1 - math.cos(rho))),
            )
    dt = time.perf_counter() - t0
    report(1, worst < 1e-8 and dt < 1.0, f"max |error| {worst:.2e} (< 1e-8), runtime {dt:.3f} s (< 1 s)")


def test_ac2_lune_area(report):
    worst, convex = 0.0, True
    for lam, k1 in ((1.0, 1.0), (2.0, 0.5)):
        m = Metric(k1)
        Lmax = m.lune_length_max(lam)
        for L in np.linspace(Lmax / 50, Lmax, 50):
            lune = make_lune(LuneSpec(m, lam, float(L)))
            ref = lune_area(float(L), lam, m)
            worst = max(worst, abs(lune.area() - ref), abs(area(support_from_arcs(lune)) - ref))
        grid = Lmax * np.arange(1, 1001) / 1000
        A = np.array([lune_area(float(x), lam, m) for x in grid])
        convex &= bool(np.all(np.diff(A, 2) > 0))
    report(2, worst < 1e-6 and convex, f"max |A(lune) - A~(L)| {worst:.2e} (< 1e-6), second differences positive: {convex}")


def test_ac3_lower_bound_sharpness(report):
    t0 = time.perf_counter()
    rng = np.random.default_rng(2024)
    deficits = [lower_bound_deficit(random_lambda_polygon(rng, int(rng.integers(2, 7)))) for _ in range(1000)]
    lune_def = max(
        abs(lower_bound_deficit(make_lune(LuneSpec(UNIT, 1.0, float(L))))) for L in np.linspace(0.1, 4.4, 50)
    )
    opt = {}
    for n in (4, 6):
        for L0 in (2.0, 3.0):
            _, rep = minimize_area(n, L0, seed=0)
            opt[(n, L0)] = rep.best_deficit
    dt = time.perf_counter() - t0
    ok = min(deficits) >= -1e-8 and lune_def < 1e-6 and all(0 <= d < 1e-4 for d in opt.values()) and dt < 120
    worst_opt = max(opt.values())
    report(
        3,
        ok,
        f"min deficit {min(deficits):.2e} (>= -1e-8), lune deficit {lune_def:.1e}, "
        f"optimizer max deficit {worst_opt:.1e} (< 1e-4), runtime {dt:.1f} s (< 120 s)",
    )


def test_ac4_duality(report):
    rng = np.random.default_rng(7)
    id_err, dd_err = 0.0, 0.0
    for i in range(100):
        if i % 2:
            curve = random_lambda_polygon(rng, int(rng.integers(2, 7)))
            N = 2048
            h0 = support_from_arcs(curve, N).h
            dd = support_from_arcs(polar_dual(polar_dual(curve)), N).h
        else:
            curve = support_from_function(UNIT, 1.0, trig_curve(rng, 1.0))
            h0 = curve.h
            dd = polar_dual(polar_dual(curve)).h
        rep, rep_d = measure(curve), measure(polar_dual(curve))
        L_star, A_star = duality_identities(rep)
        id_err = max(id_err, abs(rep_d.length - L_star), abs(rep_d.area - A_star))
        dd_err = max(dd_err, float(np.max(np.abs(dd - h0))))
    report(4, id_err < 1e-8 and dd_err < 1e-6, f"identity residual {id_err:.2e} (< 1e-8), double-dual distance {dd_err:.2e} (< 1e-6)")


def test_ac5_upper_bound_sharpness(report):
    race = max(abs(upper_bound_slack(make_racetrack(1.0, 2 * d))) for d in (0.0, 0.1, 0.3))
    rng = np.random.default_rng(11)
    slacks = []
    for _ in range(100):
        src = trig_curve(rng, 1.0, radius=math.pi / 4 + 0.25)
        slacks.append(upper_bound_slack(support_from_function(UNIT, 1.0, src, bound="upper")))
    ok = race < 1e-6 and min(slacks) >= -1e-8
    report(5, ok, f"racetrack |slack| {race:.1e} (< 1e-6), min slack of perturbed curves {min(slacks):.3e} (>= -1e-8)")


def test_ac6_euclidean_limits(report):
    m = Metric(1e-4)
    lam = 1.0
    worst = 0.0
    for L in np.linspace(0.1, m.lune_length_max(lam), 20):
        worst = max(worst, abs(lune_area(float(L), lam, m) / euclid_lower_bound(float(L), lam) - 1))
    for A in np.linspace(math.pi / lam**2 + 0.1, 50.0, 20):
        worst = max(worst, abs(racetrack_length_bound(float(A), lam, m) / euclid_upper_bound(float(A), lam) - 1))
    report(6, worst < 1e-6, f"max relative error at k1=1e-4 {worst:.2e} (< 1e-6)")


def test_ac7_pmp(report):
    rng = np.random.default_rng(5)
    eps, fd_err = 1e-6, 0.0
    for _ in range(100):
        s = ControlState(0.0, rng.uniform(0, 3), rng.uniform(-3, 3), rng.uniform(eps, 1 - eps))
        a = AdjointState(*rng.normal(size=2), lambda0=1.0, lambda1=rng.normal())

        def H(x1=s.x1, x2=s.x2, u=s.u):
            return pontryagin_H(ControlState(0.0, x1, x2, u), a)[0]

        dHdu = (H(u=s.u + eps) - H(u=s.u - eps)) / (2 * eps)
        dH1 = (H(x1=s.x1 + eps) - H(x1=s.x1 - eps)) / (2 * eps)
        dH2 = (H(x2=s.x2 + eps) - H(x2=s.x2 - eps)) / (2 * eps)
        p1, p2 = adjoint_rhs(s, a)
        fd_err = max(fd_err, abs(dHdu - pontryagin_H(s, a)[1]), abs(p1 + dH1), abs(p2 + dH2))
    x1, x2 = np.meshgrid(np.linspace(-1, 10, 111), np.linspace(-10, 10, 101))
    lc = min(legendre_clebsch_value(ControlState(0.0, u, v)) for u, v in zip(x1.ravel(), x2.ravel()))
    lune = make_lune(LuneSpec(UNIT, 1.0, 3.0))
    sch, x0 = schedule_from_polygon(lune)
    rep, _ = verify_pmp(integrate_trajectory(sch, x0, 3.0))
    other = random_symmetric_polygon(rng)
    sch2, y0 = schedule_from_polygon(other)
    rep2, _ = verify_pmp(integrate_trajectory(sch2, y0, other.length()))
    ok = fd_err < 1e-7 and lc > 0 and rep.consistent and rep.max_H1_at_switches < 1e-6 and not rep2.consistent
    report(
        7,
        ok,
        f"finite-difference error {fd_err:.1e} (< 1e-7), min Legendre-Clebsch {lc:.2e} (> 0), "
        f"lune |H1| at switches {rep.max_H1_at_switches:.1e}, sign pattern {rep.sign_consistent}, "
        f"non-optimal schedule flagged: {not rep2.consistent}",
    )


def test_ac8_deformation(report):
    rng = np.random.default_rng(8)
    drift, monotone, final = 0.0, True, 0.0
    for _ in range(20):
        hist = deform_to_lune(random_symmetric_polygon(rng))
        L = np.array([p.length() for p in hist])
        A = np.array([p.area() for p in hist])
        drift = max(drift, float(np.max(np.abs(L - L[0]))))
        monotone &= bool(np.all(np.diff(A) < 0))
        monotone &= is_lune(hist[-1])
        final = max(final, abs(lower_bound_deficit(hist[-1])))
    ok = drift < 1e-9 and monotone and final < 1e-4
    report(8, ok, f"length drift {drift:.1e} (< 1e-9), area strictly decreasing and ends at a lune: {monotone}, final deficit {final:.1e} (< 1e-4)")
