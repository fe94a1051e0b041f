"""Named verification checks, shared by the command line and the test suite.

Each check returns a CheckResult with machine-readable failure lines of the
form ``FAIL <check> <observed> <expected> <tol>``.  Informational findings
that are not failures (notably the known inconsistency in the tabulated
reference row 27) are reported as ``DISCREPANCY`` lines.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

import numpy as np

from .fields import PolynomialField, franke_field
from .global_space import build_space, c2_report
from .hermite import collocation_matrix, hermite_interpolate, apply_functionals
from .local_basis import build_basis, dual_polynomials
from .mesh import mesh_from_arrays
from .reduction import (EDGE_STRATEGIES, INTERIOR_PRESETS, ReductionMatrix,
                        convert_bases, interior_reduction, reduce_space,
                        verify_poly_reproduction)
from .reference_tables import (REFERENCE_ROW_SCALE, reference_collocation_matrix,
                               sparsity_mask)
from .ws3_geometry import build_ws3

__all__ = ["CheckResult", "run_check", "run_all", "CHECK_NAMES"]

CHECK_NAMES = ("table2", "arrangement", "partition", "marsden", "family",
               "reproduction", "global-assembly", "derivatives")


@dataclass
class CheckResult:
    name: str
    passed: bool = True
    failures: list = field(default_factory=list)
    info: list = field(default_factory=list)
    elapsed: float = 0.0

    def fail(self, observed, expected, tol):
        self.passed = False
        self.failures.append(f"FAIL {self.name} {observed!r} {expected!r} {tol!r}")

    def require(self, ok: bool, observed, expected, tol):
        if not ok:
            self.fail(observed, expected, tol)

    def lines(self):
        status = "PASS" if self.passed else "FAIL"
        yield f"{status} {self.name} ({self.elapsed:.2f}s)"
        yield from self.info
        yield from self.failures


def _random_triangle(rng, min_area: float = 0.15):
    while True:
        corners = rng.uniform(-1.5, 1.5, (3, 2))
        area = 0.5 * abs(np.cross(corners[1] - corners[0], corners[2] - corners[0]))
        if area > min_area:
            return corners


def _quasi_random_barycentric(n: int) -> np.ndarray:
    """Low-discrepancy points in the unit triangle (additive recurrence,
    folded from the unit square)."""
    rho = 1.3247179572447460          # plastic number
    a = np.array([1.0 / rho, 1.0 / rho ** 2])
    k = np.arange(1, n + 1)[:, None]
    uv = np.mod(0.5 + k * a[None, :], 1.0)
    over = uv.sum(axis=1) > 1.0
    uv[over] = 1.0 - uv[over]
    return uv


def check_table2(h_values=(1.0, 0.5, 3.0), tol: float = 1e-12,
                 seed: int = 20240901) -> CheckResult:
    """Collocation entries against the tabulated reference (rel/abs tol), the
    generic sparsity pattern, and the block splits."""
    res = CheckResult("table2")
    t0 = time.time()
    n_checked = 0
    for h in h_values:
        basis = build_basis((0.0, 0.0), (h, 0.0), (0.0, h))
        C = collocation_matrix(basis).matrix
        ref = reference_collocation_matrix(h, apply_row_scale=True)
        raw = reference_collocation_matrix(h, apply_row_scale=False)
        for i in range(28):
            for j in range(28):
                expected = ref[i, j]
                got = C[i, j]
                if expected == 0.0:
                    res.require(abs(got) < tol, got, 0.0, tol)
                else:
                    res.require(abs(got - expected) <= tol * abs(expected),
                                got, expected, tol)
                n_checked += 1
        for i1, scale in REFERENCE_ROW_SCALE.items():
            i = i1 - 1
            nz = np.abs(raw[i]) > 0
            ratio = C[i, nz] / raw[i, nz]
            res.require(np.allclose(ratio, float(scale), rtol=tol * 1e3, atol=0),
                        list(np.round(ratio, 6)), float(scale), tol)
            if h == h_values[0]:
                res.info.append(
                    f"DISCREPANCY table2 row {i1}: tabulated entries are "
                    f"{1 / float(scale):g}x the symmetry-consistent values; "
                    f"computed entries match tabulated*{scale} exactly")
    res.info.insert(0, f"checked {n_checked} entries over h={list(h_values)}")

    # generic-shape sparsity and block structure
    rng = np.random.default_rng(seed)
    corners = _random_triangle(rng)
    C = collocation_matrix(build_basis(*corners))
    mask = sparsity_mask()
    worst_zero = float(np.abs(C.matrix[~mask]).max())
    res.require(worst_zero < tol, worst_zero, 0.0, tol)
    for m in C.block_splits:
        blank = C.zero_block_max(m)
        res.require(blank < tol, blank, 0.0, tol)
        c11, c22 = C.diagonal_block_condition(m)
        res.require(math.isfinite(c11) and math.isfinite(c22),
                    (c11, c22), "finite", "-")
    res.info.append(f"block splits verified at m={list(C.block_splits)}")
    res.elapsed = time.time() - t0
    return res


def check_arrangement(n_random: int = 5, tol: float = 1e-12,
                      seed: int = 715) -> CheckResult:
    """Cell and interior-line counts plus exact area tiling, on the reference
    triangle and random ones."""
    res = CheckResult("arrangement")
    t0 = time.time()
    rng = np.random.default_rng(seed)
    triangles = [np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])]
    triangles += [_random_triangle(rng) for _ in range(n_random)]
    for corners in triangles:
        geom = build_ws3(*corners)
        res.require(geom.cell_count == 75, geom.cell_count, 75, 0)
        res.require(geom.interior_line_count == 18, geom.interior_line_count, 18, 0)
        total = geom.cell_areas().sum()
        rel = abs(total - geom.area) / geom.area
        res.require(rel < tol, total, geom.area, tol)
        areas = geom.cell_areas()
        res.require(areas.min() > 0, areas.min(), "> 0", 0)
    res.info.append(f"{len(triangles)} triangles: 75 cells / 18 interior lines each")
    res.elapsed = time.time() - t0
    return res


def check_partition(n_triangles: int = 5, n_points: int = 10_000,
                    tol: float = 1e-12, seed: int = 99) -> CheckResult:
    """Partition of unity and nonnegativity at quasi-random points."""
    res = CheckResult("partition")
    t0 = time.time()
    rng = np.random.default_rng(seed)
    uv = _quasi_random_barycentric(n_points)
    worst_sum = 0.0
    worst_neg = 0.0
    for k in range(n_triangles):
        corners = (np.array([(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)])
                   if k == 0 else _random_triangle(rng))
        basis = build_basis(*corners)
        pts = corners[0] + uv @ np.vstack([corners[1] - corners[0],
                                           corners[2] - corners[0]])
        val, _, _ = basis.eval_many(pts, order=0)
        worst_sum = max(worst_sum, float(np.abs(val.sum(axis=1) - 1.0).max()))
        worst_neg = min(worst_neg, float(val.min()))
    res.require(worst_sum < tol, worst_sum, 0.0, tol)
    res.require(worst_neg >= -tol, worst_neg, ">= 0", tol)
    res.info.append(f"max |sum-1| = {worst_sum:.3e}, min B_j = {worst_neg:.3e} "
                    f"over {n_triangles} x {n_points} points")
    res.elapsed = time.time() - t0
    return res


def check_marsden(n_samples: int = 200, tol: float = 1e-10,
                  seed: int = 2718) -> CheckResult:
    """Residual of the dual-polynomial expansion of (1 + y.x)^3."""
    res = CheckResult("marsden")
    t0 = time.time()
    rng = np.random.default_rng(seed)
    basis = build_basis(*_random_triangle(rng))
    C = collocation_matrix(basis)
    duals = dual_polynomials(basis, C)
    worst = 0.0
    ys = rng.uniform(-1.0, 1.0, (n_samples, 2))
    w = rng.random((n_samples, 3))
    w /= w.sum(axis=1, keepdims=True)
    xs = w @ basis.corners
    B, _, _ = basis.eval_many(xs, order=0)
    for y, x, bx in zip(ys, xs, B):
        lhs = duals.evaluate(y) @ bx
        rhs = (1.0 + y @ x) ** 3
        worst = max(worst, abs(lhs - rhs))
    res.require(worst < tol, worst, 0.0, tol)
    res.info.append(f"max residual {worst:.3e} over {n_samples} (y, x) pairs")
    res.elapsed = time.time() - t0
    return res


def check_family(n_samples: int = 100_000, tol: float = 1e-10,
                 seed: int = 31) -> CheckResult:
    """The named interior solutions solve the dual condition; random family
    members are never nonnegative and never beat the -1/29 bound."""
    res = CheckResult("family")
    t0 = time.time()
    rng = np.random.default_rng(seed)
    basis = build_basis(*_random_triangle(rng))
    C = collocation_matrix(basis)
    duals = dual_polynomials(basis, C)
    for name, params in INTERIOR_PRESETS.items():
        R = interior_reduction(*params)
        resid = verify_poly_reproduction(R, duals)
        res.require(resid < tol, resid, 0.0, tol)
        res.info.append(f"preset {name}: dual residual {resid:.3e}")

    r2, r3, r5 = rng.uniform(-1.0, 1.0, (3, n_samples))
    r1 = 4 * r2 + 12 * r3 + 12 / 5 * r5 + 2 / 3
    r4 = -15 * r2 - 35 * r3 - 7 * r5 - 2
    r6 = 9 / 2 * r2 + 21 / 2 * r3 + 9 / 5 * r5 + 5 / 6
    allsix = np.vstack([r1, r2, r3, r4, r5, r6])
    mins = allsix.min(axis=0)
    n_nonneg = int(np.count_nonzero(mins >= -1e-12))
    res.require(n_nonneg == 0, n_nonneg, 0, 1e-12)
    bound = -1.0 / 29.0 + 1e-12
    worst_min = float(mins.max())
    res.require(worst_min <= bound, worst_min, -1.0 / 29.0, 1e-12)
    from .reduction import family_point
    eq10_min = min(family_point(*INTERIOR_PRESETS["eq10"]).as_array())
    res.require(abs(eq10_min + 1.0 / 29.0) < 1e-15, eq10_min, -1.0 / 29.0, 1e-15)
    res.info.append(f"{n_samples} sampled members: none nonnegative, "
                    f"max of min-coefficient {worst_min:.6f} <= -1/29")
    res.elapsed = time.time() - t0
    return res


def check_reproduction(n_polys: int = 20, n_points: int = 200,
                       tol: float = 1e-9, roundtrip_tol: float = 1e-12,
                       seed: int = 4242) -> CheckResult:
    """Conversion round trips at every block split, and cubic reproduction by
    the full and reduced local spaces under both edge strategies."""
    res = CheckResult("reproduction")
    t0 = time.time()
    rng = np.random.default_rng(seed)

    for k in range(3):
        basis = build_basis(*_random_triangle(rng))
        C = collocation_matrix(basis)
        for m in C.block_splits:
            R_b = ReductionMatrix(m=m, r21=rng.standard_normal((28 - m, m)),
                                  side="simplex")
            back = convert_bases(C, m, convert_bases(C, m, R_b))
            err = float(np.abs(back.r21 - R_b.r21).max())
            res.require(err < roundtrip_tol, err, 0.0, roundtrip_tol)
    res.info.append("simplex->hermite->simplex round trips pass at "
                    "m in {3, 9, 18, 21, 27} on 3 triangles")

    basis = build_basis(*_random_triangle(rng))
    C = collocation_matrix(basis)
    uv = _quasi_random_barycentric(n_points)
    pts = basis.corners[0] + uv @ np.vstack([basis.corners[1] - basis.corners[0],
                                             basis.corners[2] - basis.corners[0]])
    B, _, _ = basis.eval_many(pts, order=0)
    worst = 0.0
    for _ in range(n_polys):
        f = PolynomialField.random_cubic(rng)
        lam = apply_functionals(basis, f)
        exact = np.array([f.eval(p)[0] for p in pts])
        scale = max(1.0, float(np.abs(exact).max()))
        for strategy in EDGE_STRATEGIES:
            for m in (28, 27, 21, 18):
                if m == 28:
                    coeffs = hermite_interpolate(C, lam)
                else:
                    rs = reduce_space(basis, C, m, edge_strategy=strategy)
                    kept = lam[:m]
                    coeffs = C.solve(np.concatenate([kept, rs.hermite.r21 @ kept]))
                err = float(np.abs(B @ coeffs - exact).max()) / scale
                worst = max(worst, err)
                res.require(err < tol, err, 0.0, tol)
    res.info.append(f"{n_polys} random cubics reproduced in m=28/27/21/18, "
                    f"both strategies; worst relative error {worst:.2e}")
    res.elapsed = time.time() - t0
    return res


def _test_meshes():
    one = mesh_from_arrays([(0, 0), (1, 0), (0, 1)], [(0, 1, 2)])
    square = mesh_from_arrays([(0, 0), (1, 0), (1, 1), (0, 1)],
                              [(0, 1, 2), (0, 2, 3)])
    pts = [(0.0, 0.0)] + [(math.cos(k * math.pi / 4), math.sin(k * math.pi / 4))
                          for k in range(8)]
    fan = mesh_from_arrays(pts, [(0, 1 + k, 1 + (k + 1) % 8) for k in range(8)])
    return {"single": one, "square": square, "fan": fan}


def check_global_assembly(tol_poly: float = 1e-9, tol_c2: float = 1e-8,
                          seed: int = 64) -> CheckResult:
    """Dimension formulas, global cubic reproduction, and two-sided C2 jumps
    for all spaces on three meshes."""
    res = CheckResult("global-assembly")
    t0 = time.time()
    rng = np.random.default_rng(seed)
    smooth = franke_field()
    for name, mesh in _test_meshes().items():
        for m in (18, 21, 27, 28):
            space = build_space(mesh, m)
            per_edge = {18: 0, 21: 1, 27: 3, 28: 3}[m]
            expect = 6 * mesh.n_V + per_edge * mesh.n_E + (mesh.n_T if m == 28 else 0)
            res.require(space.dimension == expect, space.dimension, expect, 0)

            f = PolynomialField.random_cubic(rng)
            s = space.interpolate(f)
            worst = 0.0
            for t in range(mesh.n_T):
                corners = mesh.triangle_corners(t)
                w = rng.random((40, 3))
                w /= w.sum(axis=1, keepdims=True)
                pts = w @ corners
                vals, _, _ = s.eval_many_on_triangle(t, pts, order=0)
                exact = np.array([f.eval(p)[0] for p in pts])
                scale = max(1.0, float(np.abs(exact).max()))
                worst = max(worst, float(np.abs(vals - exact).max()) / scale)
            res.require(worst < tol_poly, worst, 0.0, tol_poly)

            s2 = space.interpolate(smooth)
            rep = c2_report(s2, samples_per_edge=20)
            res.require(rep.max_jump() < tol_c2, rep.max_jump(), 0.0, tol_c2)
            res.info.append(f"{name} m={m}: dim {space.dimension}, "
                            f"cubic err {worst:.2e}, max C2 jump {rep.max_jump():.2e}")
    res.elapsed = time.time() - t0
    return res


def check_derivatives(n_points: int = 100, tol_grad: float = 1e-6,
                      tol_hess: float = 1e-4, seed: int = 5150) -> CheckResult:
    """Recurrence derivatives of all 28 basis functions against central finite
    differences at points away from knot lines."""
    res = CheckResult("derivatives")
    t0 = time.time()
    rng = np.random.default_rng(seed)
    basis = build_basis(*_random_triangle(rng))
    geom = basis.geometry

    pts = []
    while len(pts) < n_points:
        w = rng.random(3)
        w /= w.sum()
        x = w @ basis.corners
        u, v = geom.to_reference(x)
        clear = 0.02
        if u < clear or v < clear or u + v > 1 - clear:
            continue
        ref = geom._ref
        dists = [abs(a * u + b * v + c) / math.hypot(a, b) for a, b, c in ref.lines]
        if min(dists) > 5e-3:
            pts.append(x)
    pts = np.array(pts)

    # the restriction to one cell is a cubic, so in-cell difference stencils
    # carry no truncation error except the h^2 f'''/6 term of the gradient
    # formula; a small step for gradients and a larger one for the pure
    # roundoff-limited second differences keep both far below tolerance
    h_g = 1e-5 * math.sqrt(geom.area)
    h = 1e-4 * math.sqrt(geom.area)
    val, grad, hess = basis.eval_many(pts, order=2)
    ex = np.array([1.0, 0.0])
    ey = np.array([0.0, 1.0])

    def value_at(p):
        return basis.eval_many(p[None, :], order=0)[0][0]

    worst_g = worst_h = 0.0
    for x, g, H in zip(pts, grad, hess):
        fd_gx = (value_at(x + h_g * ex) - value_at(x - h_g * ex)) / (2 * h_g)
        fd_gy = (value_at(x + h_g * ey) - value_at(x - h_g * ey)) / (2 * h_g)
        worst_g = max(worst_g, float(np.abs(g[:, 0] - fd_gx).max()),
                      float(np.abs(g[:, 1] - fd_gy).max()))
        v0 = value_at(x)
        fd_hxx = (value_at(x + h * ex) - 2 * v0 + value_at(x - h * ex)) / (h * h)
        fd_hyy = (value_at(x + h * ey) - 2 * v0 + value_at(x - h * ey)) / (h * h)
        fd_hxy = (value_at(x + h * (ex + ey)) - value_at(x + h * (ex - ey))
                  - value_at(x - h * (ex - ey)) + value_at(x - h * (ex + ey))
                  ) / (4 * h * h)
        worst_h = max(worst_h,
                      float(np.abs(H[:, 0, 0] - fd_hxx).max()),
                      float(np.abs(H[:, 1, 1] - fd_hyy).max()),
                      float(np.abs(H[:, 0, 1] - fd_hxy).max()))
    res.require(worst_g < tol_grad, worst_g, 0.0, tol_grad)
    res.require(worst_h < tol_hess, worst_h, 0.0, tol_hess)
    res.info.append(f"worst gradient mismatch {worst_g:.3e}, "
                    f"worst hessian mismatch {worst_h:.3e} at {n_points} points")
    res.elapsed = time.time() - t0
    return res


_CHECK_FUNCTIONS = {
    "table2": check_table2,
    "arrangement": check_arrangement,
    "partition": check_partition,
    "marsden": check_marsden,
    "family": check_family,
    "reproduction": check_reproduction,
    "global-assembly": check_global_assembly,
    "derivatives": check_derivatives,
}


def run_check(name: str, **kwargs) -> CheckResult:
    try:
        fn = _CHECK_FUNCTIONS[name]
    except KeyError:
        raise ValueError(f"unknown check {name!r}; expected one of {CHECK_NAMES}")
    return fn(**kwargs)


def run_all(**kwargs) -> list[CheckResult]:
    return [run_check(name, **kwargs.get(name, {})) for name in CHECK_NAMES]
