import math

import numpy as np
import pytest

from lambdaconvex import COMPILED, LuneSpec, UNIT, make_lune, make_racetrack, schedule_from_polygon
from lambdaconvex._backend import kernels, pure
from lambdaconvex.extremal_shapes import random_lambda_polygon

needs_ext = pytest.mark.skipif(not COMPILED, reason="compiled extension not built")


@needs_ext
def test_arc_support_agrees(rng):
    th = np.linspace(0, 2 * math.pi, 777)
    for poly in [random_lambda_polygon(rng, n) for n in (2, 4, 6)] + [make_racetrack(1.0, 0.4)]:
        a = kernels.arc_support(th, poly.table())
        b = pure.arc_support(th, poly.table())
        np.testing.assert_allclose(a[0], b[0], atol=1e-14)
        np.testing.assert_allclose(a[1], b[1], atol=1e-12)
        np.testing.assert_array_equal(a[2], b[2])


@needs_ext
def test_integrate_agrees():
    lune = make_lune(LuneSpec(UNIT, 1.0, 3.0))
    sch, x0 = schedule_from_polygon(lune)
    y0 = np.array([x0[0], x0[1], 0.1, -0.6, 0.0, 0.0])
    br, va = np.asarray(sch.breaks), np.asarray(sch.values)
    a = kernels.integrate(y0, br, va, 1.0, 0.6, True, 2**12, True)
    b = pure.integrate(y0, br, va, 1.0, 0.6, True, 2**12, True)
    np.testing.assert_allclose(a[0], b[0], atol=1e-12)
    np.testing.assert_allclose(a[2], b[2], atol=1e-12)
    np.testing.assert_array_equal(a[3], b[3])


@needs_ext
def test_rk4_and_polygon_measure_agree(rng):
    y = np.array([0.8, 0.1, 0.2, -0.3, 0.0, 0.0])
    np.testing.assert_allclose(
        kernels.rk4_step(y, 1.0, 1.0, 0.5, True, 1e-3), pure.rk4_step(y, 1.0, 1.0, 0.5, True, 1e-3), atol=1e-15
    )
    poly = random_lambda_polygon(rng, 5)
    V = poly.endpoints()[0]
    a = kernels.polygon_measure(V, math.pi / 4)
    b = pure.polygon_measure(V, math.pi / 4)
    assert a[0] == pytest.approx(b[0], abs=1e-13) and a[1] == pytest.approx(b[1], abs=1e-13)
    np.testing.assert_allclose(a[2], b[2], atol=1e-13)
    assert a[3] == b[3]


def test_polygon_measure_matches_arcpolygon(rng):
    poly = random_lambda_polygon(rng, 4)
    L, A, turning, ok = pure.polygon_measure(poly.endpoints()[0], math.pi / 4)
    assert ok
    assert L == pytest.approx(poly.length(), abs=1e-13)
    assert A == pytest.approx(poly.area(), abs=1e-13)


def test_pure_backend_env(tmp_path):
    import subprocess
    import sys

    code = "import lambdaconvex as l; print(l.COMPILED)"
    r = subprocess.run([sys.executable, "-c", code], env={"LAMBDACONVEX_PURE": "1", "PATH": ""}, capture_output=True, text=True)
    assert r.stdout.strip() == "False"
