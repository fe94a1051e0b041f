"""The 28-function simplex spline basis on one split triangle.

The basis functions are scaled six-knot simplex splines whose knots sit on
the 9 boundary points of the split.  The knot table below is written in
barycentric thirds: each knot is an integer triple (i, j, k) with
i + j + k = 3, meaning the point (i*p1 + j*p2 + k*p3) / 3.  Scaling by the
weight vector (area/15 times a fixed rational per function) makes the family
a nonnegative partition of unity.

The table is pinned mechanically, not transcribed from a drawing: it is the
unique set of admissible six-knot multisets over the 9 boundary points whose
scaled collocation values reproduce the closed-form reference table for the
right triangle family (see reference_tables), and it is cross-checked by the
partition-of-unity and sparsity-pattern tests.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .simplex_spline import KnotMultiset, SimplexSpline, SimplexSplineValue
from .ws3_geometry import GeometryError, MacroTriangleGeometry, build_ws3

__all__ = [
    "BasisSet",
    "DualPolynomialTable",
    "KNOT_CONFIGS",
    "SYMMETRY_GROUPS",
    "WEIGHT_FRACTIONS",
    "build_basis",
    "dual_polynomials",
]

# Barycentric thirds of the 9 boundary points, in the order of
# ws3_geometry.BOUNDARY_POINT_NAMES: p1 p2 p3 p12 p13 p21 p23 p31 p32.
_POINT_BARY3 = (
    (3, 0, 0), (0, 3, 0), (0, 0, 3),
    (0, 2, 1), (0, 1, 2),
    (2, 0, 1), (1, 0, 2),
    (2, 1, 0), (1, 2, 0),
)

# Knot multisets of the 28 basis functions, as indices into _POINT_BARY3.
KNOT_CONFIGS = (
    (0, 0, 0, 0, 5, 7),      # 1: quadruple corner p1
    (1, 1, 1, 1, 3, 8),      # 2: quadruple corner p2
    (2, 2, 2, 2, 4, 6),      # 3: quadruple corner p3
    (0, 0, 0, 5, 7, 8),      # 4: triple p1, leaning on edge p1p2
    (0, 0, 0, 5, 6, 7),      # 5: triple p1, leaning on edge p3p1
    (1, 1, 1, 3, 4, 8),      # 6: triple p2, leaning on edge p2p3
    (1, 1, 1, 3, 7, 8),      # 7: triple p2, leaning on edge p1p2
    (2, 2, 2, 4, 5, 6),      # 8: triple p3, leaning on edge p3p1
    (2, 2, 2, 3, 4, 6),      # 9: triple p3, leaning on edge p2p3
    (0, 0, 1, 5, 7, 8),      # 10: edge p1p2, heavy at p1
    (0, 0, 2, 5, 6, 7),      # 11: edge p3p1, heavy at p1
    (1, 1, 2, 3, 4, 8),      # 12: edge p2p3, heavy at p2
    (0, 1, 1, 3, 7, 8),      # 13: edge p1p2, heavy at p2
    (0, 2, 2, 4, 5, 6),      # 14: edge p3p1, heavy at p3
    (1, 2, 2, 3, 4, 6),      # 15: edge p2p3, heavy at p3
    (0, 0, 5, 6, 7, 8),      # 16: double corner p1, all adjacent thirds
    (1, 1, 3, 4, 7, 8),      # 17: double corner p2, all adjacent thirds
    (2, 2, 3, 4, 5, 6),      # 18: double corner p3, all adjacent thirds
    (0, 1, 3, 5, 7, 8),      # 19: edge p1p2
    (1, 2, 3, 4, 6, 8),      # 20: edge p2p3
    (0, 2, 4, 5, 6, 7),      # 21: edge p3p1
    (0, 3, 5, 6, 7, 8),      # 22: hexagon with p13 -> p1
    (0, 4, 5, 6, 7, 8),      # 23: hexagon with p12 -> p1
    (1, 3, 4, 6, 7, 8),      # 24: hexagon with p21 -> p2
    (1, 3, 4, 5, 7, 8),      # 25: hexagon with p23 -> p2
    (2, 3, 4, 5, 6, 7),      # 26: hexagon with p32 -> p3
    (2, 3, 4, 5, 6, 8),      # 27: hexagon with p31 -> p3
    (3, 4, 5, 6, 7, 8),      # 28: the hexagon of all six edge thirds
)

# Scaling factors: weight_j = area(triangle) / 15 * WEIGHT_FRACTIONS[j].
WEIGHT_FRACTIONS = tuple(
    [Fraction(1, 6)] * 3 + [Fraction(1, 3)] * 6 + [Fraction(1, 2)] * 6
    + [Fraction(2, 3)] * 3 + [Fraction(5, 6)] * 3 + [Fraction(2, 3)] * 6
    + [Fraction(1)]
)

# Orbits of the basis under the symmetry group of the triangle (0-based).
SYMMETRY_GROUPS = (
    (0, 1, 2),
    (3, 4, 5, 6, 7, 8),
    (9, 10, 11, 12, 13, 14),
    (15, 16, 17),
    (18, 19, 20),
    (21, 22, 23, 24, 25, 26),
    (27,),
)


class BasisSet:
    """The 28 scaled basis functions attached to one triangle."""

    def __init__(self, geometry: MacroTriangleGeometry):
        self.geometry = geometry
        self.corners = geometry.corners
        self.area = geometry.area
        self.weights = np.array([float(f) for f in WEIGHT_FRACTIONS]) * (self.area / 15.0)
        knots = geometry.knots
        self.splines = tuple(
            SimplexSpline(KnotMultiset(knots[list(cfg)])) for cfg in KNOT_CONFIGS
        )

    def __len__(self) -> int:
        return 28

    def knot_multiset(self, j: int) -> KnotMultiset:
        """Knot multiset of basis function j (0-based)."""
        return self.splines[j].knots

    # -- evaluation ----------------------------------------------------------

    def _require_inside(self, x):
        try:
            return self.geometry.locate(x)
        except GeometryError:
            raise

    def eval_one(self, j: int, x, order: int = 2) -> SimplexSplineValue:
        """Basis function j at one point inside the closed triangle."""
        loc = self._require_inside(x)
        vp = self.geometry.cell_centroid(loc.cell)
        raw = self.splines[j].eval(np.asarray(x, dtype=float), order=order, viewpoint=vp)
        w = self.weights[j]
        return SimplexSplineValue(w * raw.value, w * raw.gradient, w * raw.hessian)

    def eval_all(self, x, order: int = 2):
        """All 28 functions at one point: (values, gradients, hessians)."""
        val, grad, hess = self.eval_many(np.asarray(x, dtype=float)[None, :], order=order)
        return (val[0],
                grad[0] if order >= 1 else None,
                hess[0] if order >= 2 else None)

    def eval_many(self, X, order: int = 0):
        """All 28 functions at many points.

        Points are grouped by containing cell so each simplex spline is
        evaluated as the per-cell polynomial; points on knot lines use the
        lowest incident cell.  Shapes: (N,28), (N,28,2), (N,28,2,2).
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        n = len(X)
        cells = self.geometry.locate_many(X)
        val = np.zeros((n, 28))
        grad = np.zeros((n, 28, 2)) if order >= 1 else None
        hess = np.zeros((n, 28, 2, 2)) if order >= 2 else None
        for cell in np.unique(cells):
            idx = np.nonzero(cells == cell)[0]
            pts = X[idx]
            vp = self.geometry.cell_centroid(int(cell))
            for j, ss in enumerate(self.splines):
                bits = ss.indicator_bits(vp, cache_key=int(cell))
                if not any(bits):
                    continue
                v, g, h = ss.eval_batch(pts, order=order, bits=bits)
                w = self.weights[j]
                val[idx, j] = w * v
                if order >= 1:
                    grad[idx, j] = w * g
                if order >= 2:
                    hess[idx, j] = w * h
        return val, grad, hess


def build_basis(p1, p2, p3) -> BasisSet:
    """Build the basis for the triangle (p1, p2, p3); corners may be in any
    orientation but must not be collinear."""
    return BasisSet(build_ws3(p1, p2, p3))


# -- dual polynomials --------------------------------------------------------

_MONOMIAL_POWERS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2),
                    (3, 0), (2, 1), (1, 2), (0, 3))


def _monomial_row(y):
    y1, y2 = y
    return np.array([y1 ** a * y2 ** b for a, b in _MONOMIAL_POWERS])


@dataclass
class DualPolynomialTable:
    """Cubic dual polynomials: (1 + y.x)^3 = sum_j psi_j(y) B_j(x).

    ``coefficients`` holds the monomial coefficients of each psi_j in the
    basis 1, y1, y2, y1^2, y1 y2, y2^2, y1^3, y1^2 y2, y1 y2^2, y2^3.
    """

    coefficients: np.ndarray   # (28, 10)
    nodes: np.ndarray          # (10, 2) fitting nodes

    def evaluate(self, y) -> np.ndarray:
        """psi_1..psi_28 at one point y."""
        return self.coefficients @ _monomial_row(np.asarray(y, dtype=float))


def _bezier_nodes(corners) -> np.ndarray:
    nodes = []
    for i in range(4):
        for j in range(4 - i):
            k = 3 - i - j
            nodes.append((i * corners[0] + j * corners[1] + k * corners[2]) / 3.0)
    return np.array(nodes)


def dual_polynomials(basis: BasisSet, collocation) -> DualPolynomialTable:
    """Compute the dual polynomials through the collocation matrix.

    For each fitting node y, the vector psi(y) solves C psi(y) = L(y) where
    L_i(y) applies the i-th interpolation functional to x -> (1 + y.x)^3.
    Ten unisolvent nodes then determine the cubic coefficient table exactly.
    """
    from .hermite import apply_functionals  # local import to avoid a cycle

    C = collocation.matrix if hasattr(collocation, "matrix") else np.asarray(collocation)
    nodes = _bezier_nodes(basis.corners)
    V = np.array([_monomial_row(y) for y in nodes])
    samples = np.empty((10, 28))
    for k, y in enumerate(nodes):
        samples[k] = np.linalg.solve(C, apply_functionals(basis, _MarsdenField(y)))
    coeffs = np.linalg.solve(V, samples)   # (10 nodes) x (28 funcs)
    return DualPolynomialTable(coefficients=coeffs.T, nodes=nodes)


class _MarsdenField:
    """The cubic x -> (1 + y.x)^3 with exact derivatives."""

    def __init__(self, y):
        self.y = np.asarray(y, dtype=float)

    def eval(self, x, order: int = 2):
        y = self.y
        t = 1.0 + float(y @ np.asarray(x, dtype=float))
        value = t ** 3
        grad = 3.0 * t ** 2 * y
        hess = 6.0 * t * np.outer(y, y)
        return value, grad, hess
