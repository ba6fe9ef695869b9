"""Compiled vs pure-Python kernel timings.

Run with ``python3 benchmarks/bench_kernels.py [--repeat N]``. Each kernel is
called with identical inputs on both backends; the table lists the best wall
time of N repeats and the speed-up. Outputs are cross-checked before timing.
"""

from __future__ import annotations

import argparse
import math
import timeit

import numpy as np

from lambdaconvex import COMPILED, UNIT, LuneSpec, make_lune, schedule_from_polygon
from lambdaconvex._backend import kernels, pure
from lambdaconvex.extremal_shapes import random_lambda_polygon


def _cases():
    rng = np.random.default_rng(0)
    poly = random_lambda_polygon(rng, 6)
    table = poly.table()
    theta = np.linspace(0.0, 2 * math.pi, 4096, endpoint=False)
    V = poly.endpoints()[0]

    lune = make_lune(LuneSpec(UNIT, 1.0, 3.0))
    sch, x0 = schedule_from_polygon(lune)
    y0 = np.array([x0[0], x0[1], 0.1, -0.6, 0.0, 0.0])
    br, va = np.asarray(sch.breaks), np.asarray(sch.values)

    return [
        ("arc_support (6 arcs, 4096 angles)", lambda k: k.arc_support(theta, table)),
        ("integrate (4096 RK4 steps, adjoint)", lambda k: k.integrate(y0, br, va, 1.0, 0.6, True, 4096, False)),
        ("polygon_measure (6 vertices)", lambda k: k.polygon_measure(V, math.pi / 4)),
    ]


def _first(out):
    return np.asarray(out[0] if isinstance(out, tuple) else out, dtype=float)


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args(argv)
    if not COMPILED:
        print("compiled extension not available; only the pure backend is timed")
    print(f"{'kernel':40s} {'pure [ms]':>12s} {'compiled [ms]':>14s} {'speed-up':>9s}")
    for name, fn in _cases():
        ref = _first(fn(pure))
        t_pure = min(timeit.repeat(lambda: fn(pure), number=1, repeat=args.repeat)) * 1e3
        if COMPILED:
            got = _first(fn(kernels))
            if not np.allclose(got, ref, atol=1e-10, equal_nan=True):
                raise SystemExit(f"{name}: backends disagree")
            number = 20
            t_c = min(timeit.repeat(lambda: fn(kernels), number=number, repeat=args.repeat)) / number * 1e3
            print(f"{name:40s} {t_pure:12.3f} {t_c:14.4f} {t_pure / t_c:8.1f}x")
        else:
            print(f"{name:40s} {t_pure:12.3f} {'-':>14s} {'-':>9s}")


if __name__ == "__main__":
    main()
