"""Property-based checks over random shapes and parameters."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lambdaconvex import (
    UNIT,
    LuneSpec,
    Metric,
    dumps,
    duality_identities,
    loads,
    lower_bound_deficit,
    lune_area,
    make_lune,
    make_racetrack,
    measure,
    polar_dual,
    racetrack_length_bound,
    support_from_arcs,
    upper_bound_slack,
)
from lambdaconvex.extremal_shapes import random_lambda_polygon

seeds = st.integers(0, 2**32 - 1)
lams = st.floats(0.2, 5.0)
k1s = st.floats(0.1, 3.0)


@given(seeds, st.integers(2, 6), lams)
def test_lower_bound_holds(seed, n, lam):
    poly = random_lambda_polygon(np.random.default_rng(seed), n, lam)
    assert lower_bound_deficit(poly) >= -1e-12


@given(seeds, st.integers(2, 6))
def test_duality_roundtrip(seed, n):
    poly = random_lambda_polygon(np.random.default_rng(seed), n)
    dual = polar_dual(poly)
    L_star, A_star = duality_identities(measure(poly))
    assert dual.length() == pytest.approx(L_star, abs=1e-12)
    assert dual.area() == pytest.approx(A_star, abs=1e-12)
    assert upper_bound_slack(dual) >= -1e-12


@given(k1s, lams, st.floats(0.01, 1.0))
def test_lune_scaling(k1, lam, frac):
    m = Metric(k1)
    L = frac * m.lune_length_max(lam)
    lune = make_lune(LuneSpec(m, lam, L))
    assert lune.length() == pytest.approx(L, rel=1e-12)
    assert lune.area() == pytest.approx(lune_area(L, lam, m), rel=1e-9, abs=1e-14)
    # homogeneity: A(k1; lam, L) = A(1; lam/k1, k1 L) / k1^2
    assert lune_area(L, lam, m) == pytest.approx(lune_area(k1 * L, lam / k1, UNIT) / k1**2, rel=1e-9)


@given(lams, st.floats(0.0, 0.95))
def test_racetrack_equality(lam, frac):
    rho = math.atan2(1.0, lam)
    sep = 2 * frac * (math.pi / 2 - rho)
    r = make_racetrack(lam, sep)
    assert racetrack_length_bound(r.area(), lam) == pytest.approx(r.length(), abs=1e-10)


@given(seeds, st.integers(2, 5))
def test_json_roundtrip(seed, n):
    poly = random_lambda_polygon(np.random.default_rng(seed), n)
    text = dumps(poly)
    assert dumps(loads(text)) == text
    s = support_from_arcs(poly, 256)
    assert dumps(loads(dumps(s))) == dumps(s)


@given(st.floats(0.05, 4.4), st.floats(0.05, 4.4))
def test_lune_area_monotone(a, b):
    lo, hi = sorted((a, b))
    assert lune_area(lo, 1.0) <= lune_area(hi, 1.0) + 1e-15
