"""Command-line front end.

Exit codes: 0 success, 2 malformed input, 3 domain error, 4 an inequality
was found violated (deficit or slack below -1e-6).
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import os
import sys

import numpy as np

from .curve_model import (
    DEFAULT_SAMPLES,
    ArcPolygon,
    SupportCurve,
    dumps,
    from_json_dict,
    measure,
    support_from_arcs,
)
from .errors import GeometryError, InfeasibleError
from .extremal_shapes import (
    LuneSpec,
    euclid_lower_bound,
    euclid_upper_bound,
    lower_bound_deficit,
    lune_area,
    make_lune,
    make_racetrack,
    racetrack_length_bound,
    upper_bound_slack,
)
from .sphere_core import Metric

EXIT_MALFORMED = 2
EXIT_DOMAIN = 3
EXIT_FALSIFIED = 4
FALSIFY_TOL = 1e-6


class _Malformed(Exception):
    pass


def _read_curve(path: str):
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise _Malformed(f"cannot read curve JSON {path!r}: {exc}") from exc
    if not isinstance(data, dict):
        raise _Malformed("curve JSON must be an object")
    try:
        return from_json_dict(data)
    except GeometryError:
        raise
    except ValueError as exc:
        raise _Malformed(str(exc)) from exc


def _write(path: str | None, text: str):
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _write_csv(path: str, header, rows):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


# --- subcommands -------------------------------------------------------------------


def cmd_lune(a):
    poly = make_lune(LuneSpec(Metric(a.k1), a.lam, a.length))
    _write(a.out, dumps(poly))
    return 0


def cmd_racetrack(a):
    poly = make_racetrack(a.lam, a.separation, Metric(a.k1))
    _write(a.out, dumps(poly))
    return 0


def _as_measured(curve, samples):
    if isinstance(curve, SupportCurve) and samples and samples != curve.N:
        raise _Malformed("--samples must match the sample count of a support JSON")
    return curve


def cmd_measure(a):
    curve = _read_curve(a.inp)
    if isinstance(curve, ArcPolygon) and a.samples:
        rep = measure(support_from_arcs(curve, a.samples))
    else:
        rep = measure(_as_measured(curve, a.samples))
    _write(None, dumps(rep.as_dict()))
    return 0


def cmd_check_lower(a):
    curve = _read_curve(a.inp)
    rep = measure(curve)
    deficit = lower_bound_deficit(curve)
    out = {
        "length": rep.length,
        "area": rep.area,
        "lune_area": rep.area - deficit,
        "deficit": deficit,
        "falsified": bool(deficit < -FALSIFY_TOL),
    }
    _write(None, dumps(out))
    if out["falsified"]:
        print(f"lower bound violated: deficit {deficit!r}", file=sys.stderr)
        return EXIT_FALSIFIED
    return 0


def cmd_check_upper(a):
    curve = _read_curve(a.inp)
    rep = measure(curve)
    slack = upper_bound_slack(curve)
    out = {
        "length": rep.length,
        "area": rep.area,
        "length_bound": rep.length + slack,
        "slack": slack,
        "falsified": bool(slack < -FALSIFY_TOL),
    }
    _write(None, dumps(out))
    if out["falsified"]:
        print(f"upper bound violated: slack {slack!r}", file=sys.stderr)
        return EXIT_FALSIFIED
    return 0


def cmd_dual(a):
    from .polar_duality import polar_dual

    curve = _read_curve(a.inp)
    _write(a.out, dumps(polar_dual(curve)))
    return 0


def cmd_optimize(a):
    from .polygon_optimizer import minimize_area

    m = Metric(a.k1)
    poly, rep = minimize_area(a.arcs, a.length, a.seed, a.iters, a.lam, m, a.starts, a.workers)
    _write(a.out, dumps(rep.as_dict()))
    if a.curve_out:
        _write(a.curve_out, dumps(poly))
    if rep.best_deficit < -FALSIFY_TOL:
        print(f"lower bound violated: deficit {rep.best_deficit!r}", file=sys.stderr)
        return EXIT_FALSIFIED
    return 0


def cmd_pmp_verify(a):
    from .optimal_control import integrate_trajectory, schedule_from_polygon, verify_pmp

    curve = _read_curve(a.inp)
    if not isinstance(curve, ArcPolygon):
        raise _Malformed("pmp-verify needs an arc-polygon curve JSON")
    sch, x0 = schedule_from_polygon(curve)
    traj = integrate_trajectory(sch, x0, curve.length() * curve.m.k1)
    rep, full = verify_pmp(traj)
    out = rep.as_dict()
    out["objective"] = traj.objective
    out["length"] = traj.length
    out["periodicity_residual"] = traj.periodicity_residual
    out["constraint_residual"] = traj.constraint_residual
    _write(None, dumps(out))
    if a.out:
        _write(a.out, full.to_csv(stride=a.stride))
    return 0


def cmd_deform(a):
    from .polygon_optimizer import _corners, deform_to_lune, symmetrize

    curve = _read_curve(a.inp)
    if not isinstance(curve, ArcPolygon):
        raise _Malformed("deform needs an arc-polygon curve JSON")
    os.makedirs(a.out_dir, exist_ok=True)
    try:
        from .polygon_optimizer import _linkage

        _linkage(curve)
        runs = [("deform", curve)]
    except GeometryError:
        g1, g2 = symmetrize(curve)
        runs = [("deform_gamma1", g1), ("deform_gamma2", g2)]
    step = math.pi / (180 * a.steps) if a.steps > 0 else math.pi / 180
    for name, poly in runs:
        hist = [poly] if len(_corners(poly)[1]) <= 2 else deform_to_lune(poly, step)
        rows = []
        for i, p in enumerate(hist):
            rows.append([i, p.length(), p.area(), lower_bound_deficit(p), len(_corners(p)[1])])
        _write_csv(os.path.join(a.out_dir, f"{name}.csv"), ["step", "length", "area", "deficit", "corners"], rows)
        _write(os.path.join(a.out_dir, f"{name}_final.json"), dumps(hist[-1]))
    return 0


def _parse_grid(spec: str) -> np.ndarray:
    """``start:stop:num`` or a comma-separated list."""
    try:
        if ":" in spec:
            lo, hi, n = spec.split(":")
            return np.linspace(float(lo), float(hi), int(n))
        return np.array([float(x) for x in spec.split(",")])
    except ValueError as exc:
        raise _Malformed(f"bad grid spec {spec!r}") from exc


def cmd_sweep(a):
    m = Metric(a.k1)
    grid = _parse_grid(a.grid)
    rows = []
    if a.what == "lower":
        header = ["length", "lune_area", "planar_lune_area", "lune_deficit"]
        for L in grid:
            poly = make_lune(LuneSpec(m, a.lam, float(L)))
            d = lower_bound_deficit(support_from_arcs(poly, a.samples))
            rows.append([float(L), lune_area(float(L), a.lam, m), euclid_lower_bound(float(L), a.lam), d])
    else:
        header = ["separation", "area", "length_bound", "planar_length_bound", "racetrack_slack"]
        for s in grid:
            poly = make_racetrack(a.lam, float(s), m)
            A = poly.area()
            slack = upper_bound_slack(support_from_arcs(poly, a.samples))
            rows.append([float(s), A, racetrack_length_bound(A, a.lam, m), euclid_upper_bound(A, a.lam), slack])
    _write_csv(a.out, header, rows)
    return 0


# --- parser ----------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lambdaconvex", description="Reverse isoperimetric tools for lambda-convex curves.")
    sub = p.add_subparsers(dest="cmd", required=True)

    def metric(sp):
        sp.add_argument("--k1", type=float, default=1.0)
        sp.add_argument("--lambda", dest="lam", type=float, default=1.0)

    s = sub.add_parser("lune", help="write a lambda-convex lune")
    metric(s)
    s.add_argument("--length", type=float, required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_lune)

    s = sub.add_parser("racetrack", help="write a racetrack curve")
    metric(s)
    s.add_argument("--separation", type=float, required=True, help="distance between the circle centres")
    s.add_argument("--out")
    s.set_defaults(func=cmd_racetrack)

    s = sub.add_parser("measure", help="length, area and curvature range")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--samples", type=int, default=0, help="measure an arc polygon through N support samples")
    s.set_defaults(func=cmd_measure)

    for name, fn in (("check-lower", cmd_check_lower), ("check-upper", cmd_check_upper)):
        s = sub.add_parser(name)
        s.add_argument("--in", dest="inp", required=True)
        s.set_defaults(func=fn)

    s = sub.add_parser("dual", help="polar dual curve")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.set_defaults(func=cmd_dual)

    s = sub.add_parser("optimize", help="multistart area minimisation at fixed length")
    metric(s)
    s.add_argument("--arcs", type=int, required=True)
    s.add_argument("--length", type=float, required=True)
    s.add_argument("--seed", type=int, default=0)
    s.add_argument("--iters", type=int, default=200)
    s.add_argument("--starts", type=int, default=16)
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--out")
    s.add_argument("--curve-out")
    s.set_defaults(func=cmd_optimize)

    s = sub.add_parser("pmp-verify", help="fit Pontryagin multipliers to a polygon's bang-bang trajectory")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--out")
    s.add_argument("--stride", type=int, default=16, help="write every STRIDE-th integrator node")
    s.set_defaults(func=cmd_pmp_verify)

    s = sub.add_parser("deform", help="four-bar deformation to a lune")
    s.add_argument("--in", dest="inp", required=True)
    s.add_argument("--steps", type=int, default=1, help="increments per degree of hinge opening")
    s.add_argument("--out-dir", required=True)
    s.set_defaults(func=cmd_deform)

    s = sub.add_parser("sweep", help="deficit/slack tables")
    metric(s)
    s.add_argument("--what", choices=("lower", "upper"), required=True)
    s.add_argument("--grid", required=True, help="start:stop:num or comma list (length or separation)")
    s.add_argument("--samples", type=int, default=DEFAULT_SAMPLES)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return int(args.func(args))
    except _Malformed as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (GeometryError, InfeasibleError) as exc:
        print(f"domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
