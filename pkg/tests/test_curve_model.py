import json
import math

import numpy as np
import pytest
from scipy.integrate import quad

from lambdaconvex import (
    Arc,
    ArcPolygon,
    LuneSpec,
    SupportCurve,
    TrigSupport,
    Vertex,
    area,
    curvature_radius,
    dumps,
    is_lambda_convex,
    jump_angle,
    length,
    loads,
    make_lune,
    measure,
    polygon_from_vertices,
    support_from_arcs,
    support_from_function,
)
from lambdaconvex.curve_model import ArcSupport, as_support, from_json_dict, radius_samples
from lambdaconvex.errors import BranchError, ConvexityError, DomainError, GeometryError, SupportOverflowError
from lambdaconvex.extremal_shapes import random_lambda_polygon, trig_curve
from lambdaconvex.sphere_core import UNIT, Metric, to_xyz

SQ2 = math.sqrt(2)


def circle(rho, lam=1.0, m=UNIT):
    return ArcPolygon(m, lam, [Arc(0.0, 0.0, 0.0, 2 * math.pi, rho)])


# --- arc polygons ----------------------------------------------------------


def test_lambda_circle_exact_measures():
    c = ArcPolygon(UNIT, 1.0, [Arc(0.0, 0.0, 0.0, 2 * math.pi)])
    assert c.length() == pytest.approx(math.pi * SQ2, rel=1e-15)
    assert c.area() == pytest.approx(2 * math.pi - math.pi * SQ2, rel=1e-14)
    assert c.fan_area() == pytest.approx(c.area(), abs=1e-12)
    assert c.vertices() == [] or all(v.phi < 1e-12 for v in c.vertices())


def test_lune_exact_vs_support(lune3):
    assert lune3.length() == pytest.approx(3.0, abs=1e-14)
    s = support_from_arcs(lune3)
    assert length(s) == pytest.approx(3.0, abs=1e-9)
    assert area(s) == pytest.approx(lune3.area(), abs=1e-9)
    assert lune3.fan_area() == pytest.approx(lune3.area(), abs=1e-11)
    assert len(lune3.vertices()) == 2


def test_scaling_with_k1():
    m = Metric(2.0)
    lune = make_lune(LuneSpec(m, 2.0, 1.5))
    unit = make_lune(LuneSpec(UNIT, 1.0, 3.0))
    assert lune.length() == pytest.approx(1.5)
    assert lune.area() == pytest.approx(unit.area() / 4, rel=1e-12)
    s = support_from_arcs(lune)
    assert area(s) == pytest.approx(unit.area() / 4, rel=1e-9)


def test_open_polygon_rejected():
    with pytest.raises(GeometryError):
        ArcPolygon(UNIT, 1.0, [Arc(0.0, 0.0, 0.0, 6.0)])


def test_reflex_corner_rejected():
    V = [to_xyz(0.5, 0.0), to_xyz(0.5, 2.0), to_xyz(0.05, 3.14), to_xyz(0.5, 4.2)]
    with pytest.raises((ConvexityError, DomainError)):
        polygon_from_vertices(UNIT, 1.0, np.array(V[::-1]))


def test_bad_arc_parameters():
    with pytest.raises(DomainError):
        ArcPolygon(UNIT, 1.0, [Arc(0.0, 0.0, 0.0, -1.0)])
    with pytest.raises(DomainError):
        ArcPolygon(UNIT, -1.0, [Arc(0.0, 0.0, 0.0, 2 * math.pi)])
    with pytest.raises(DomainError):
        ArcPolygon(UNIT, 1.0, [Arc(0.0, 0.0, 0.0, 2 * math.pi, 2.0)])


def test_polygon_turning_gauss_bonnet(rng):
    for n in (3, 4, 6):
        p = random_lambda_polygon(rng, n)
        kg = p.total_curvature()
        assert p.area() == pytest.approx(2 * math.pi - kg - p.turning_angles().sum(), abs=1e-14)
        assert p.fan_area() == pytest.approx(p.area(), abs=1e-10)
        assert np.all(p.turning_angles() > 0)
        assert is_lambda_convex(p)


def test_transformed_preserves_measures(rng):
    from scipy.spatial.transform import Rotation

    p = random_lambda_polygon(rng, 4)
    q = p.transformed(Rotation.from_rotvec([0.0, 0.0, 1.1]).as_matrix())
    assert q.length() == pytest.approx(p.length(), abs=1e-13)
    assert q.area() == pytest.approx(p.area(), abs=1e-13)


def test_boundary_points_on_curve(lune3):
    P = lune3.boundary_points(64)
    assert np.allclose(np.linalg.norm(P, axis=1), 1.0)


# --- support curves ----------------------------------------------------------


@pytest.mark.parametrize("rho", [math.pi / 8, math.pi / 6, math.pi / 4, 0.9 * math.pi / 3])
def test_centered_circle_support(rho):
    exact = support_from_function(UNIT, 1.0, TrigSupport(rho), 4096)
    bare = SupportCurve(UNIT, 1.0, np.full(4096, rho))
    for c in (exact, bare):
        assert length(c) == pytest.approx(2 * math.pi * math.sin(rho), abs=1e-12)
        assert area(c) == pytest.approx(2 * math.pi * (1 - math.cos(rho)), abs=1e-12)
    assert np.allclose(radius_samples(exact), math.tan(rho))


def test_curvature_radius_circle():
    g = math.tan(0.4)
    assert curvature_radius(g, 0.0, 0.0) == pytest.approx(g)
    # k1 scaling: radius in physical units
    assert curvature_radius(g / 2, 0.0, 0.0, Metric(2.0)) == pytest.approx(g / 2)


def test_off_center_circle_support():
    p = circle(0.3)
    p = p.transformed(np.array(_rot_y(0.2)))
    s = support_from_arcs(p)
    assert length(s, "radius") == pytest.approx(2 * math.pi * math.sin(0.3), abs=1e-9)
    assert length(s, "support") == pytest.approx(2 * math.pi * math.sin(0.3), abs=1e-9)
    assert area(s) == pytest.approx(2 * math.pi * (1 - math.cos(0.3)), abs=1e-9)


def _rot_y(a):
    c, s = math.cos(a), math.sin(a)
    return [[c, 0, s], [0, 1, 0], [-s, 0, c]]


def test_sampled_only_polygon_close_to_exact(rng):
    p = random_lambda_polygon(rng, 4)
    s = support_from_arcs(p, 4096)
    bare = SupportCurve(p.m, p.lam, s.h)
    assert length(bare) == pytest.approx(p.length(), abs=1e-8)
    assert area(bare) == pytest.approx(p.area(), abs=1e-6)  # finite-difference g' near corners


def test_with_samples_and_errors(lune3):
    s = support_from_arcs(lune3, 512)
    assert s.with_samples(1024).N == 1024
    with pytest.raises(DomainError):
        SupportCurve(UNIT, 1.0, s.h).with_samples(1024)
    with pytest.raises(DomainError):
        SupportCurve(UNIT, 1.0, np.full(16, -0.1))
    with pytest.raises(SupportOverflowError):
        SupportCurve(UNIT, 1.0, np.full(16, math.pi / 2))
    with pytest.raises(DomainError):
        support_from_arcs(lune3, 64)
    with pytest.raises(DomainError):
        length(s, "bogus")


def test_origin_convention(lune3):
    s = support_from_arcs(lune3)
    assert s.h_max_remark2 == pytest.approx(math.pi / 4)
    assert s.origin_ok()
    far = SupportCurve(UNIT, 1.0, np.full(64, 1.0))
    assert not far.origin_ok()


def test_lambda_convexity_checks(rng):
    assert not is_lambda_convex(circle(1.0))
    assert is_lambda_convex(circle(0.5))
    src = trig_curve(rng, 1.0)
    assert is_lambda_convex(support_from_function(UNIT, 1.0, src))
    big = support_from_function(UNIT, 1.0, TrigSupport(1.0))
    assert not is_lambda_convex(big)


def test_nonconvex_support_raises():
    src = TrigSupport(0.3, [0.0, 0.0, 0.05], [0.0, 0.0, 0.0])
    with pytest.raises(ConvexityError):
        length(support_from_function(UNIT, 1.0, src), "radius")


def test_measure_report(lune3):
    rep = measure(lune3)
    assert rep.radius_min == 0 and rep.curvature_max == math.inf
    assert rep.curvature_min == pytest.approx(1.0)
    rep2 = measure(support_from_arcs(lune3))
    assert rep2.length == pytest.approx(rep.length, abs=1e-9)
    assert rep2.radius_max == pytest.approx(1.0, abs=1e-8)
    assert set(rep.as_dict()) == {"length", "area", "radius_min", "radius_max", "curvature_min", "curvature_max"}


# --- jump angle ------------------------------------------------------------------


def _jump_oracle(u, a, b):
    cu = math.cos(u)
    return quad(lambda x: cu / (math.cos(x) ** 2 + cu * cu * math.sin(x) ** 2), a, b, limit=200)[0]


@pytest.mark.parametrize(
    "u,a,b", [(0.3, -0.4, 0.5), (0.7, -1.4, 1.2), (0.2, 0.3, 2.5), (1.0, -2.0, 0.9)]
)
def test_jump_angle_quadrature_oracle(u, a, b):
    v = Vertex(u, 0.4, 0.4 + a, 0.4 + b, 0.0)
    assert jump_angle(v) == pytest.approx(_jump_oracle(u, a, b), abs=1e-10)


def test_jump_angle_limits():
    assert jump_angle(Vertex(0.0, 0.0, -0.5, 0.5, 0.0)) == pytest.approx(1.0)
    with pytest.raises(BranchError):
        jump_angle(Vertex(0.3, 0.0, 1.0, 2.0, 0.0), strict=True)
    with pytest.raises(DomainError):
        jump_angle(Vertex(0.3, 0.0, 0.0, 4.0, 0.0))


def test_vertex_jump_matches_turning(rng):
    p = random_lambda_polygon(rng, 5)
    for v in p.vertices():
        assert jump_angle(v, p.m) == pytest.approx(v.phi, abs=1e-10)


# --- JSON --------------------------------------------------------------------------


def test_json_roundtrip_arcs(rng):
    p = random_lambda_polygon(rng, 4)
    text = dumps(p)
    assert dumps(loads(text)) == text
    assert loads(text).area() == pytest.approx(p.area(), abs=1e-15)


def test_json_roundtrip_support(lune3):
    s = support_from_arcs(lune3, 256)
    text = dumps(s)
    q = loads(text)
    assert dumps(q) == text
    assert np.array_equal(q.h, s.h)


def test_json_malformed():
    for bad in ({}, {"k1": 1, "lambda": 1, "repr": "blob"}, {"k1": 1, "lambda": 1, "repr": "arcs", "arcs": [{}]},
                {"k1": 1, "lambda": 1, "repr": "support", "h": ["x"]}, {"k1": "a", "lambda": 1, "repr": "arcs"}):
        with pytest.raises(ValueError):
            from_json_dict(bad)


def test_json_inf_and_schema(lune3):
    d = json.loads(dumps(measure(lune3).as_dict()))
    assert d["curvature_max"] == "inf"
    d = json.loads(dumps(lune3))
    assert d["repr"] == "arcs" and d["bound"] == "lower" and "radius" not in d["arcs"][0]


def test_as_support(lune3):
    assert isinstance(as_support(lune3, 512), SupportCurve)
    s = support_from_arcs(lune3, 512)
    assert as_support(s) is s


def test_arc_support_contact(lune3):
    src = ArcSupport(lune3)
    which, psi, where = src.contact(np.array([0.0, math.pi / 2]))
    assert which.shape == (2,)
