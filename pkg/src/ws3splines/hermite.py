"""Hermite interpolation functionals and the local collocation matrix.

The 28 functionals identifying a spline on one split triangle are, in order:
values at the three corners (1-3); first partials Dx, Dy per corner (4-9);
second partials Dx^2, Dy^2 per corner (10-15); mixed DxDy per corner (16-18);
first outward-normal derivatives at the three edge midpoints (19-21); second
outward-normal derivatives at the six edge third-points (22-27); the value at
the barycenter (28).  First partials are taken along the global Cartesian
axes, not triangle-dependent directions.

Edge normals are the local *outward* unit normals.  When a triangle takes
part in a mesh, every shared edge carries one global frame; the per-triangle
functional then differs from the global-frame derivative by a recorded sign
(first normal derivatives are odd in the direction, second are even).
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .local_basis import BasisSet
from .reference_tables import BLOCK_SPLITS

__all__ = [
    "HermiteFunctional",
    "CollocationMatrix",
    "SingularCollocationError",
    "hermite_functionals",
    "apply_functionals",
    "collocation_matrix",
    "hermite_interpolate",
]


class SingularCollocationError(ValueError):
    """The collocation matrix failed to factor; upstream basis data is wrong."""


@dataclass(frozen=True)
class HermiteFunctional:
    """One interpolation functional: a value or derivative at an anchor point.

    kind is one of value, dx, dy, dxx, dyy, dxy, normal, normal2; ``direction``
    is the unit normal for the two normal kinds.  ``sign`` records the factor
    relating this functional to its mesh-global counterpart (always +1 for a
    standalone triangle).
    """

    kind: str
    anchor: np.ndarray
    direction: np.ndarray | None = None
    sign: float = 1.0

    def apply(self, value: float, grad: np.ndarray, hess: np.ndarray) -> float:
        kind = self.kind
        if kind == "value":
            return float(value)
        if kind == "dx":
            return float(grad[0])
        if kind == "dy":
            return float(grad[1])
        if kind == "dxx":
            return float(hess[0, 0])
        if kind == "dyy":
            return float(hess[1, 1])
        if kind == "dxy":
            return float(hess[0, 1])
        if kind == "normal":
            return float(self.direction @ grad)
        if kind == "normal2":
            return float(self.direction @ hess @ self.direction)
        raise ValueError(f"unknown functional kind {kind!r}")

    @property
    def order(self) -> int:
        return {"value": 0, "dx": 1, "dy": 1, "normal": 1}.get(self.kind, 2)


def _outward_normal(corners, k: int) -> np.ndarray:
    """Unit normal of the edge opposite corner k, pointing away from it."""
    a, b = np.delete(corners, k, axis=0)
    t = (b - a) / np.linalg.norm(b - a)
    n = np.array([-t[1], t[0]])
    if n @ (corners[k] - (a + b) / 2) > 0:
        n = -n
    return n


def hermite_functionals(corners) -> list[HermiteFunctional]:
    """The 28 functionals for a triangle given as a (3, 2) corner array."""
    corners = np.asarray(corners, dtype=float)
    p1, p2, p3 = corners
    n1, n2, n3 = (_outward_normal(corners, k) for k in range(3))
    q1, q2, q3 = (p2 + p3) / 2, (p1 + p3) / 2, (p1 + p2) / 2
    thirds = {
        "p12": (2 * p2 + p3) / 3, "p13": (p2 + 2 * p3) / 3,
        "p21": (2 * p1 + p3) / 3, "p23": (p1 + 2 * p3) / 3,
        "p31": (2 * p1 + p2) / 3, "p32": (p1 + 2 * p2) / 3,
    }
    fns = [HermiteFunctional("value", p) for p in (p1, p2, p3)]
    for p in (p1, p2, p3):
        fns.append(HermiteFunctional("dx", p))
        fns.append(HermiteFunctional("dy", p))
    for p in (p1, p2, p3):
        fns.append(HermiteFunctional("dxx", p))
        fns.append(HermiteFunctional("dyy", p))
    for p in (p1, p2, p3):
        fns.append(HermiteFunctional("dxy", p))
    fns.append(HermiteFunctional("normal", q3, n3))
    fns.append(HermiteFunctional("normal", q1, n1))
    fns.append(HermiteFunctional("normal", q2, n2))
    fns.append(HermiteFunctional("normal2", thirds["p31"], n3))
    fns.append(HermiteFunctional("normal2", thirds["p21"], n2))
    fns.append(HermiteFunctional("normal2", thirds["p12"], n1))
    fns.append(HermiteFunctional("normal2", thirds["p32"], n3))
    fns.append(HermiteFunctional("normal2", thirds["p23"], n2))
    fns.append(HermiteFunctional("normal2", thirds["p13"], n1))
    fns.append(HermiteFunctional("value", corners.mean(axis=0)))
    return fns


def apply_functionals(basis: BasisSet, f_evaluator) -> np.ndarray:
    """Apply all 28 functionals of the basis triangle to a field.

    ``f_evaluator`` provides ``eval(x, order) -> (value, gradient, hessian)``.
    """
    fns = hermite_functionals(basis.corners)
    out = np.empty(28)
    for i, fn in enumerate(fns):
        value, grad, hess = f_evaluator.eval(fn.anchor, fn.order)
        out[i] = fn.sign * fn.apply(value, grad, hess)
    return out


@dataclass
class CollocationMatrix:
    """Matrix of functional-against-basis values with its block structure."""

    matrix: np.ndarray                   # (28, 28)
    functionals: list = field(repr=False, default=None)
    block_splits: tuple = BLOCK_SPLITS

    def zero_block_max(self, m: int) -> float:
        """Largest magnitude in the rows<=m, columns>m block (exactly zero in
        theory for every valid split)."""
        return float(np.abs(self.matrix[:m, m:]).max())

    def blocks(self, m: int):
        """C11 (m x m), C21, C22 for the split at m."""
        C = self.matrix
        return C[:m, :m], C[m:, :m], C[m:, m:]

    def diagonal_block_condition(self, m: int) -> tuple[float, float]:
        C11, _, C22 = self.blocks(m)
        return float(np.linalg.cond(C11)), float(np.linalg.cond(C22))

    def solve(self, data) -> np.ndarray:
        try:
            coeffs = np.linalg.solve(self.matrix, np.asarray(data, dtype=float))
        except np.linalg.LinAlgError as exc:
            raise SingularCollocationError(str(exc)) from exc
        return coeffs


def collocation_matrix(basis: BasisSet) -> CollocationMatrix:
    """Assemble C[i, j] = (functional i applied to basis function j).

    All derivatives come out of the evaluation recurrence; anchors lying on
    knot lines are evaluated in the closure of their lowest incident cell.
    """
    fns = hermite_functionals(basis.corners)
    evals = {}
    for fn in fns:
        key = fn.anchor.tobytes()
        if key not in evals:
            evals[key] = basis.eval_all(fn.anchor, order=2)
    C = np.empty((28, 28))
    for i, fn in enumerate(fns):
        val, grad, hess = evals[fn.anchor.tobytes()]
        for j in range(28):
            C[i, j] = fn.sign * fn.apply(val[j], grad[j], hess[j])
    mat = CollocationMatrix(matrix=C, functionals=fns)
    # fail fast on singularity: the interpolation problem is provably unisolvent
    try:
        np.linalg.solve(C, np.eye(28))
    except np.linalg.LinAlgError as exc:
        raise SingularCollocationError(
            "collocation matrix is singular; basis data is inconsistent"
        ) from exc
    return mat


def hermite_interpolate(C: CollocationMatrix, data) -> np.ndarray:
    """Coefficients c with C c = data: the simplex-basis representation of the
    unique spline matching the 28 interpolation values."""
    return C.solve(data)
