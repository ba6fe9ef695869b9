import math

import numpy as np
import pytest

from lambdaconvex import (
    UNIT,
    LuneSpec,
    Metric,
    euclid_lower_bound,
    euclid_upper_bound,
    lower_bound_deficit,
    lune_area,
    make_lune,
    make_racetrack,
    measure,
    racetrack_length_bound,
    support_from_arcs,
    support_from_function,
    upper_bound_slack,
)
from lambdaconvex.errors import ConvexityError, CurvatureRangeError, DomainError
from lambdaconvex.extremal_shapes import random_lambda_polygon, random_symmetric_polygon, trig_curve
from lambdaconvex.sphere_core import geodesic_circle


def test_lune_spec_domain():
    LuneSpec(UNIT, 1.0, math.pi * math.sqrt(2))
    for L in (0.0, -1.0, 4.5):
        with pytest.raises(DomainError):
            LuneSpec(UNIT, 1.0, L)
    with pytest.raises(DomainError):
        LuneSpec(UNIT, 0.0, 1.0)


def test_lune_area_endpoints():
    # full length: the lambda-circle
    _, _, A = geodesic_circle(math.pi / 4)
    assert lune_area(math.pi * math.sqrt(2), 1.0) == pytest.approx(A, rel=1e-14)
    assert lune_area(1e-6, 1.0) == pytest.approx(0.0, abs=1e-18)


@pytest.mark.parametrize("lam,k1", [(1.0, 1.0), (2.0, 0.5), (0.3, 1.0)])
def test_make_lune_matches_formula(lam, k1):
    m = Metric(k1)
    Lmax = m.lune_length_max(lam)
    for L in np.linspace(0.02, 1.0, 7) * Lmax:
        lune = make_lune(LuneSpec(m, lam, L))
        assert lune.length() == pytest.approx(L, rel=1e-13)
        assert lune.area() == pytest.approx(lune_area(L, lam, m), abs=1e-12 / k1**2)
        assert np.allclose(lune.curvatures(), lam)


def test_lune_symmetry(lune3):
    V = np.array([v.u for v in lune3.vertices()])
    assert V[0] == pytest.approx(V[1])


def test_lune_area_convex():
    L = np.linspace(0.01, math.pi * math.sqrt(2), 400)
    A = np.array([lune_area(x, 1.0) for x in L])
    assert np.all(np.diff(A, 2) > 0)


def test_lune_area_stable_branch_continuous():
    # switch between the two evaluation forms: eps = k1^2/(q(q+lam)) = 1e-3
    for k1 in (0.0447, 0.0448):
        m = Metric(k1)
        L = 0.5 * m.lune_length_max(1.0)
        assert lune_area(L, 1.0, m) == pytest.approx(make_lune(LuneSpec(m, 1.0, L)).area(), rel=1e-9)


def test_euclid_limits():
    m = Metric(1e-4)
    for L in (0.5, 2.0, 5.0):
        ref = euclid_lower_bound(L, 1.0)
        assert lune_area(L, 1.0, m) == pytest.approx(ref, rel=1e-6)
    for A in (3.5, 6.0, 10.0):
        assert racetrack_length_bound(A, 1.0, m) == pytest.approx(euclid_upper_bound(A, 1.0), rel=1e-6)
    with pytest.raises(DomainError):
        euclid_lower_bound(10.0, 1.0)
    with pytest.raises(DomainError):
        euclid_upper_bound(-1.0, 1.0)
    # planar racetrack of two unit circles with centres 1 apart: L = 2 pi + 2, A = pi + 2
    assert euclid_upper_bound(math.pi + 2, 1.0) == pytest.approx(2 * math.pi + 2)
    assert euclid_lower_bound(2 * math.pi, 1.0) == pytest.approx(math.pi)


def test_lower_bound_deficit_nonnegative(rng):
    for n in range(2, 7):
        for _ in range(10):
            p = random_lambda_polygon(rng, n)
            assert lower_bound_deficit(p) >= -1e-12
            assert lower_bound_deficit(support_from_arcs(p, 1024)) >= -1e-8


def test_lower_bound_rejects_nonconvex():
    from lambdaconvex import Arc, ArcPolygon

    big = ArcPolygon(UNIT, 1.0, [Arc(0.0, 0.0, 0.0, 2 * math.pi, 1.0)])
    with pytest.raises(ConvexityError):
        lower_bound_deficit(big)


def test_smooth_lower_curves(rng):
    for _ in range(5):
        c = support_from_function(UNIT, 1.0, trig_curve(rng, 1.0))
        assert lower_bound_deficit(c) > 0


def test_racetrack_geometry():
    for d in (0.0, 0.1, 0.3, 0.8):
        r = make_racetrack(1.0, d)
        assert r.bound == "upper"
        assert abs(upper_bound_slack(r)) < 1e-12
        assert abs(upper_bound_slack(support_from_arcs(r))) < 1e-8
        assert np.all(r.turning_angles() < 1e-12)
    with pytest.raises(DomainError):
        make_racetrack(1.0, 2.0)
    with pytest.raises(DomainError):
        make_racetrack(1.0, -0.1)


def test_racetrack_zero_separation_is_circle():
    r = make_racetrack(1.0, 0.0)
    _, L, A = geodesic_circle(math.pi / 4)
    assert r.length() == pytest.approx(L) and r.area() == pytest.approx(A)
    assert racetrack_length_bound(A, 1.0) == pytest.approx(L, rel=1e-14)


def test_racetrack_bound_domain():
    with pytest.raises(DomainError):
        racetrack_length_bound(7.0, 1.0)  # A above 2 pi
    with pytest.raises(DomainError):
        racetrack_length_bound(0.1, 1.0)  # below the lambda-circle area


def test_upper_bound_duality_with_lower(lune3):
    # the dual of a lune is extremal for the upper bound
    from lambdaconvex import polar_dual

    d = polar_dual(lune3)
    assert abs(upper_bound_slack(d)) < 1e-12


def test_upper_slack_smooth(rng):
    for _ in range(10):
        src = trig_curve(rng, 1.0, radius=math.pi / 4 + 0.25)
        c = support_from_function(UNIT, 1.0, src, bound="upper")
        assert upper_bound_slack(c) > 0
    with pytest.raises(CurvatureRangeError):
        upper_bound_slack(support_from_function(UNIT, 1.0, trig_curve(rng, 1.0, radius=0.3), bound="upper"))
    with pytest.raises(CurvatureRangeError):
        upper_bound_slack(make_lune(LuneSpec(UNIT, 1.0, 3.0)))


def test_random_shapes(rng):
    s = random_symmetric_polygon(rng)
    V = s.endpoints()[0]
    assert np.allclose(V[0], np.array([-V[2][0], -V[2][1], V[2][2]]))
    with pytest.raises(DomainError):
        random_lambda_polygon(rng, 1)
    p = random_lambda_polygon(rng, 2)
    assert len(p.arcs) == 2
    assert measure(p).length > 0
