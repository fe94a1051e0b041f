"""Command-line interface.

Subcommands cover basis inspection (basis-info, eval-basis, collocation,
dump-arrangement), reduction construction (reduce), global interpolation and
smoothness reporting (interpolate, c2-check), and the verification suite
(check).  All output is deterministic; CSV files carry a one-line header.

Exit codes: 0 success, 1 verification failure (with line-oriented
``FAIL <check> <observed> <expected> <tol>`` reports), 2 usage errors.
The WS3_TOL environment variable overrides the default tolerance of the
check subcommand.
"""
from __future__ import annotations

import argparse
import os
import sys
from fractions import Fraction

import numpy as np

from . import checks
from .fields import field_from_spec
from .global_space import build_space, c2_report
from .hermite import collocation_matrix
from .local_basis import (KNOT_CONFIGS, SYMMETRY_GROUPS, WEIGHT_FRACTIONS,
                          _POINT_BARY3, build_basis, dual_polynomials)
from .mesh import MeshError, load_mesh
from .reduction import (EDGE_STRATEGIES, INTERIOR_PRESETS, reduce_space,
                        verify_poly_reproduction)
from .ws3_geometry import BOUNDARY_POINT_NAMES, build_ws3

_DEFAULT_TRIANGLE = "0,0,1,0,0,1"


def _fmt(x) -> str:
    return repr(float(x))


def _parse_triangle(text: str):
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad triangle {text!r}: {exc}") from exc
    if len(vals) != 6:
        raise argparse.ArgumentTypeError(
            f"triangle needs 6 numbers x1,y1,x2,y2,x3,y3; got {len(vals)}")
    return [(vals[0], vals[1]), (vals[2], vals[3]), (vals[4], vals[5])]


def _parse_interior(text: str):
    if text in INTERIOR_PRESETS:
        return text
    if text.startswith("custom:"):
        parts = text[len("custom:"):].split(",")
        if len(parts) != 3:
            raise argparse.ArgumentTypeError(
                "custom interior point needs 3 numbers: custom:r2,r3,r5")
        try:
            return tuple(float(p) for p in parts)
        except ValueError as exc:
            raise argparse.ArgumentTypeError(str(exc)) from exc
    raise argparse.ArgumentTypeError(
        f"unknown interior choice {text!r}; presets: {sorted(INTERIOR_PRESETS)} "
        "or custom:r2,r3,r5")


def _open_out(path):
    if path in (None, "-"):
        return sys.stdout, False
    return open(path, "w", encoding="utf-8"), True


def _write_lines(path, lines):
    out, close = _open_out(path)
    try:
        for line in lines:
            out.write(line + "\n")
    finally:
        if close:
            out.close()


# -- subcommand bodies ---------------------------------------------------------

def _cmd_basis_info(args) -> int:
    corners = args.triangle
    basis = build_basis(*corners)
    lines = [f"triangle {corners[0]} {corners[1]} {corners[2]}",
             f"area {_fmt(basis.area)}",
             "symmetry groups (1-based): "
             + "; ".join("{" + ",".join(str(j + 1) for j in g) + "}"
                         for g in SYMMETRY_GROUPS)]
    lines.append("index weight knots[barycentric thirds]")
    for j, cfg in enumerate(KNOT_CONFIGS):
        w = Fraction(WEIGHT_FRACTIONS[j], 15)
        knots = " ".join(str(_POINT_BARY3[i]).replace(" ", "") for i in cfg)
        names = " ".join(BOUNDARY_POINT_NAMES[i] for i in cfg)
        lines.append(f"B{j + 1} area*{w} {knots} ({names})")
    _write_lines(args.out, lines)
    return 0


def _cmd_eval_basis(args) -> int:
    basis = build_basis(*args.triangle)
    n = args.grid
    rows = ["x,y," + ",".join(f"B{j + 1}" for j in range(28))]
    pts = []
    for i in range(n + 1):
        for j in range(n + 1 - i):
            k = n - i - j
            w = np.array([i, j, k], dtype=float) / n
            pts.append(w @ basis.corners)
    pts = np.array(pts)
    val, _, _ = basis.eval_many(pts, order=0)
    for p, v in zip(pts, val):
        rows.append(",".join([_fmt(p[0]), _fmt(p[1])] + [_fmt(x) for x in v]))
    _write_lines(args.out, rows)
    return 0


def _cmd_collocation(args) -> int:
    basis = build_basis(*args.triangle)
    C = collocation_matrix(basis).matrix
    if args.csv:
        rows = ["functional," + ",".join(f"B{j + 1}" for j in range(28))]
        for i in range(28):
            rows.append(f"lambda{i + 1}," + ",".join(_fmt(v) for v in C[i]))
    else:
        rows = []
        for i in range(28):
            rows.append(f"lambda{i + 1:2d}: "
                        + " ".join(f"{v: .6g}" for v in C[i]))
    _write_lines(args.out, rows)
    return 0


def _cmd_dump_arrangement(args) -> int:
    geom = build_ws3(*args.triangle)
    rows = ["cell,vertex,x,y"]
    for ci, poly in enumerate(geom.cell_polygons()):
        for vi, (x, y) in enumerate(poly):
            rows.append(f"{ci},{vi},{_fmt(x)},{_fmt(y)}")
    _write_lines(args.out, rows)
    return 0


def _cmd_reduce(args) -> int:
    basis = build_basis(*args.triangle)
    C = collocation_matrix(basis)
    rs = reduce_space(basis, C, args.m, interior=args.interior,
                      edge_strategy=args.edge_strategy)
    duals = dual_polynomials(basis, C)
    resid = verify_poly_reproduction(rs.simplex, duals)
    lines = [f"m {args.m}",
             f"interior coefficients {[ _fmt(v) for v in rs.interior.as_array() ]}",
             f"edge strategy {rs.edge_strategy}",
             f"cubic-reproduction residual {_fmt(resid)}"]
    lines.append("hermite-side R21:")
    for row in rs.hermite.r21:
        lines.append(",".join(_fmt(v) for v in row))
    lines.append("simplex-side R21:")
    for row in rs.simplex.r21:
        lines.append(",".join(_fmt(v) for v in row))
    _write_lines(args.out, lines)
    return 0


def _cmd_interpolate(args) -> int:
    mesh = load_mesh(args.mesh)
    field = field_from_spec(args.fn)
    space = build_space(mesh, args.m, interior=args.interior,
                        edge_strategy=args.edge_strategy)
    spline = space.interpolate(field)
    pts = mesh.positions()
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    n = args.grid
    rows = ["x,y,s,sx,sy,sxx,sxy,syy"]
    xs = np.linspace(lo[0], hi[0], n)
    ys = np.linspace(lo[1], hi[1], n)
    for y in ys:
        for x in xs:
            try:
                t = spline.locate_triangle((x, y))
            except Exception:
                continue
            v, g, h = spline.eval_on_triangle(t, (x, y), order=2)
            rows.append(",".join(_fmt(u) for u in
                                 (x, y, v, g[0], g[1], h[0, 0], h[0, 1], h[1, 1])))
    _write_lines(args.out, rows)
    return 0


def _cmd_c2_check(args) -> int:
    mesh = load_mesh(args.mesh)
    field = field_from_spec(args.fn)
    space = build_space(mesh, args.m, interior=args.interior,
                        edge_strategy=args.edge_strategy)
    spline = space.interpolate(field)
    rep = c2_report(spline, samples_per_edge=args.samples)
    rows = ["edge,value_jump,gradient_jump,hessian_jump"]
    for e, v, g, h in zip(rep.edges, rep.value, rep.gradient, rep.hessian):
        rows.append(f"{e},{_fmt(v)},{_fmt(g)},{_fmt(h)}")
    _write_lines(args.out, rows)
    return 0


def _cmd_check(args) -> int:
    names = list(checks.CHECK_NAMES) if args.which == "all" else [args.which]
    overrides = {}
    tol_env = os.environ.get("WS3_TOL")
    if tol_env is not None:
        try:
            tol = float(tol_env)
        except ValueError:
            print(f"bad WS3_TOL value {tol_env!r}", file=sys.stderr)
            return 2
        overrides["tol"] = tol
    ok = True
    for name in names:
        kwargs = dict(overrides)
        if name == "table2" and args.h is not None:
            kwargs["h_values"] = (args.h,)
        if name in ("global-assembly", "derivatives"):
            kwargs.pop("tol", None)
        result = checks.run_check(name, **kwargs)
        ok = ok and result.passed
        for line in result.lines():
            print(line)
    if args.which == "all":
        print("ALL CHECKS PASSED" if ok else "SOME CHECKS FAILED")
    return 0 if ok else 1


# -- parser ---------------------------------------------------------------------

def _add_triangle(p):
    p.add_argument("--triangle", type=_parse_triangle, default=_DEFAULT_TRIANGLE,
                   help="x1,y1,x2,y2,x3,y3 (default reference triangle)")


def _add_out(p):
    p.add_argument("--out", default=None, help="output path (default stdout)")


def _add_space_options(p):
    p.add_argument("--interior", type=_parse_interior, default="eq10",
                   help="interior reduction: preset name or custom:r2,r3,r5")
    p.add_argument("--edge-strategy", choices=EDGE_STRATEGIES,
                   default="quad-average")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ws3",
        description="C2 cubic splines on the order-3 Wang-Shi split")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("basis-info", help="weights, symmetry groups, knot table")
    _add_triangle(p); _add_out(p)
    p.set_defaults(handler=_cmd_basis_info)

    p = sub.add_parser("eval-basis", help="sample all basis functions on a grid")
    _add_triangle(p); _add_out(p)
    p.add_argument("--grid", type=int, default=30, help="barycentric subdivisions")
    p.set_defaults(handler=_cmd_eval_basis)

    p = sub.add_parser("collocation", help="dump the 28x28 collocation matrix")
    _add_triangle(p); _add_out(p)
    p.add_argument("--csv", action="store_true", help="emit CSV instead of aligned text")
    p.set_defaults(handler=_cmd_collocation)

    p = sub.add_parser("dump-arrangement", help="cells of the split as CSV loops")
    _add_triangle(p); _add_out(p)
    p.set_defaults(handler=_cmd_dump_arrangement)

    p = sub.add_parser("reduce", help="build a reduced local space")
    _add_triangle(p); _add_out(p)
    p.add_argument("--m", type=int, choices=(18, 21, 27), required=True)
    _add_space_options(p)
    p.set_defaults(handler=_cmd_reduce)

    p = sub.add_parser("interpolate", help="interpolate a field over a mesh")
    p.add_argument("--mesh", required=True)
    p.add_argument("--m", type=int, choices=(18, 21, 27, 28), default=28)
    p.add_argument("--fn", default="franke",
                   help="poly:c00,c10,... | franke | sincos")
    p.add_argument("--grid", type=int, default=25)
    _add_space_options(p); _add_out(p)
    p.set_defaults(handler=_cmd_interpolate)

    p = sub.add_parser("c2-check", help="two-sided jump table over interior edges")
    p.add_argument("--mesh", required=True)
    p.add_argument("--m", type=int, choices=(18, 21, 27, 28), default=28)
    p.add_argument("--fn", default="franke")
    p.add_argument("--samples", type=int, default=20)
    _add_space_options(p); _add_out(p)
    p.set_defaults(handler=_cmd_c2_check)

    p = sub.add_parser("check", help="run verification checks")
    p.add_argument("which", choices=checks.CHECK_NAMES + ("all",))
    p.add_argument("--h", type=float, default=None,
                   help="single h for the table2 check (default 1, 1/2, 3)")
    p.set_defaults(handler=_cmd_check)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if isinstance(getattr(args, "triangle", None), str):
        args.triangle = _parse_triangle(args.triangle)
    try:
        return args.handler(args)
    except (MeshError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
