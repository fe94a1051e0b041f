"""Bivariate cubic simplex splines with six knots.

A simplex spline here is the unit-integral density M(x | K) determined by a
multiset K of six planar knots.  It is piecewise cubic, supported on the
convex hull of K, and of smoothness C^(4-mu) across a line carrying mu knots.
Values are computed by the classical knot-insertion recurrence

    M(x | K) = n/(n-2) * sum_i mu_i(x) M(x | K \\ {k_i}),      n = |K| - 1,

where the mu_i are barycentric coordinates of x with respect to an affinely
independent triple of knots, and derivatives by the companion recurrence

    D_v M(x | K) = n * sum_i nu_i(v) M(x | K \\ {k_i}),

with sum nu_i = 0 and sum nu_i k_i = v.  The pivot triple is chosen per
multiset (never per point), so the whole recursion tree is a fixed DAG whose
leaves are triangle indicator functions; evaluation at a batch of points is a
sweep of affine forms over that DAG.

On knot lines the pointwise value is ambiguous; every evaluation therefore
carries a *viewpoint*: a point (or an infinitesimal direction) that selects
the closure of one region, and all indicator decisions are taken there.  The
result is the polynomial of the selected region evaluated exactly at x.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateKnotsError",
    "KnotMultiset",
    "SimplexSplineValue",
    "SimplexSpline",
    "eval_simplex_spline",
    "recurrence_weights",
]

# Fixed tie-break direction for evaluations without an explicit viewpoint:
# a point on a knot line is treated as x + 0+ * _TIE_DIR.  The slope is
# irrational, so it is never parallel to a line through rational knots.
_TIE_DIR = np.array([0.8414709848078965, 0.5403023058681398])  # (sin 1, cos 1)

_DEGENERACY_REL_TOL = 1e-10  # |det| threshold relative to (hull diameter)^2


class DegenerateKnotsError(ValueError):
    """Raised when a knot multiset has no affinely independent triple."""


@dataclass(frozen=True)
class SimplexSplineValue:
    """Value and derivatives of a simplex spline at one point."""

    value: float
    gradient: np.ndarray   # (2,)
    hessian: np.ndarray    # (2, 2), symmetric

    def directional(self, v) -> float:
        return float(np.dot(self.gradient, v))

    def directional2(self, u, v=None) -> float:
        v = u if v is None else v
        return float(np.asarray(u) @ self.hessian @ np.asarray(v))


class KnotMultiset:
    """Six planar knots, repetitions encoding multiplicity."""

    def __init__(self, points):
        pts = np.asarray(points, dtype=float)
        if pts.shape != (6, 2):
            raise ValueError(f"expected 6 planar knots, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("knots must be finite")
        self.points = pts
        self._diam2 = float(max(np.sum((pts[i] - pts[j]) ** 2)
                                for i in range(6) for j in range(i)))
        if self._best_triple(tuple(range(6))) is None:
            raise DegenerateKnotsError("knot multiset has zero-area convex hull")

    def _best_triple(self, slots):
        """Lexicographically first affinely independent triple of maximal |det|."""
        pts = self.points
        best = None
        best_det = _DEGENERACY_REL_TOL * self._diam2
        for tri in itertools.combinations(range(len(slots)), 3):
            a, b, c = (pts[slots[t]] for t in tri)
            d = abs((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))
            if d > best_det * (1 + 1e-13):
                best, best_det = tri, d
        return best


@dataclass(frozen=True)
class _Leaf:
    """Triangle indicator leaf: density 1/area inside the base triangle."""

    corners: np.ndarray        # (3, 2)
    inv_area: float
    edge_normals: np.ndarray   # (3, 2) inward normals of the edges
    edge_offsets: np.ndarray   # (3,) so inside <=> normals @ p + offsets > 0

    def contains(self, p, tie_dir) -> bool:
        s = self.edge_normals @ np.asarray(p, dtype=float) + self.edge_offsets
        tol = 1e-13 * max(1.0, float(np.max(np.abs(self.corners))))
        for k in range(3):
            v = s[k]
            if abs(v) <= tol:
                v = float(self.edge_normals[k] @ tie_dir)
            if v <= 0.0:
                return False
        return True


@dataclass(frozen=True)
class _Node:
    children: tuple            # node keys after removing each pivot slot
    mu: np.ndarray             # (3, 3): mu_i(x) = mu[i,0] x0 + mu[i,1] x1 + mu[i,2]
    nu: np.ndarray             # (3, 2): nu[i, a] = nu_i(e_a)
    val_factor: float          # n / (n - 2)
    der_factor: float          # n


class SimplexSpline:
    """Evaluator for one six-knot simplex spline (unit-integral normalization)."""

    def __init__(self, knots: KnotMultiset):
        if not isinstance(knots, KnotMultiset):
            knots = KnotMultiset(knots)
        self.knots = knots
        self._nodes = {}
        self._leaf_keys = []
        self._root = tuple(range(6))
        self._build(self._root)
        self._indicator_cache = {}

    # -- plan construction (x independent) ----------------------------------

    def _build(self, key):
        if key in self._nodes:
            return
        pts = self.knots.points
        tri = self.knots._best_triple(key)
        if tri is None:
            self._nodes[key] = None  # degenerate: zero density a.e.
            return
        corners = np.array([pts[key[t]] for t in tri])
        if len(key) == 3:
            a, b, c = corners
            area2 = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
            if area2 < 0:
                corners = corners[::-1]
                a, b, c = corners
                area2 = -area2
            normals = np.empty((3, 2))
            offsets = np.empty(3)
            for k in range(3):
                p, q = corners[k], corners[(k + 1) % 3]
                normals[k] = (p[1] - q[1], q[0] - p[0])  # inward for CCW loop
                offsets[k] = -normals[k] @ p
            leaf = _Leaf(corners=corners, inv_area=2.0 / area2,
                         edge_normals=normals, edge_offsets=offsets)
            self._nodes[key] = leaf
            self._leaf_keys.append(key)
            return
        T = np.vstack([corners.T, np.ones(3)])
        Tinv = np.linalg.inv(T)
        children = []
        for t in tri:
            child = key[:t] + key[t + 1:]
            children.append(child)
            self._build(child)
        n = len(key) - 1
        self._nodes[key] = _Node(
            children=tuple(children),
            mu=Tinv,
            nu=Tinv[:, :2].copy(),
            val_factor=n / (n - 2),
            der_factor=float(n),
        )

    # -- indicators ----------------------------------------------------------

    def indicator_bits(self, viewpoint=None, cache_key=None):
        """Leaf indicator pattern for the region selected by the viewpoint."""
        if cache_key is not None and cache_key in self._indicator_cache:
            return self._indicator_cache[cache_key]
        if viewpoint is None:
            raise ValueError("viewpoint required to compute indicator bits")
        vp = np.asarray(viewpoint, dtype=float)
        bits = tuple(self._nodes[k].contains(vp, _TIE_DIR) for k in self._leaf_keys)
        if cache_key is not None:
            self._indicator_cache[cache_key] = bits
        return bits

    @property
    def is_anywhere_nonzero(self):
        return any(self._nodes[k] is not None for k in self._leaf_keys)

    # -- evaluation -----------------------------------------------------------

    def eval_batch(self, X, order: int = 2, *, bits=None, viewpoint=None,
                   cache_key=None):
        """Evaluate at all rows of X within one region.

        ``bits`` (or a viewpoint from which they are derived) fixes every
        indicator decision, so the result is the selected region's polynomial
        evaluated at the given points.  Returns (value, gradient, hessian)
        arrays of shapes (N,), (N,2), (N,2,2); higher entries are None when
        ``order`` is smaller.
        """
        X = np.atleast_2d(np.asarray(X, dtype=float))
        if bits is None:
            bits = self.indicator_bits(viewpoint, cache_key=cache_key)
        leaf_on = dict(zip(self._leaf_keys, bits))
        n = len(X)
        memo = {}

        # rec returns (value, gradient, hessian) with None meaning
        # "identically zero on the selected region".
        def rec(key):
            if key in memo:
                return memo[key]
            node = self._nodes[key]
            if node is None:
                out = (None, None, None)
            elif isinstance(node, _Leaf):
                v = np.full(n, node.inv_area) if leaf_on[key] else None
                out = (v, None, None)
            else:
                ch = [rec(c) for c in node.children]
                mu = node.mu
                val = None
                for i in range(3):
                    cv = ch[i][0]
                    if cv is None:
                        continue
                    term = (X @ mu[i, :2] + mu[i, 2]) * cv
                    val = term if val is None else val + term
                if val is not None:
                    val = node.val_factor * val
                grad = hess = None
                if order >= 1:
                    for i in range(3):
                        cv = ch[i][0]
                        if cv is None:
                            continue
                        term = np.multiply.outer(cv, node.nu[i])
                        grad = term if grad is None else grad + term
                    if grad is not None:
                        grad = node.der_factor * grad
                if order >= 2:
                    for i in range(3):
                        cg = ch[i][1]
                        if cg is None:
                            continue
                        term = cg[:, :, None] * node.nu[i][None, None, :]
                        hess = term if hess is None else hess + term
                    if hess is not None:
                        hess = node.der_factor * hess
                        hess = 0.5 * (hess + np.swapaxes(hess, 1, 2))
                out = (val, grad, hess)
            memo[key] = out
            return out

        val, grad, hess = rec(self._root)
        if val is None:
            val = np.zeros(n)
        if order >= 1 and grad is None:
            grad = np.zeros((n, 2))
        if order >= 2 and hess is None:
            hess = np.zeros((n, 2, 2))
        return val, (grad if order >= 1 else None), (hess if order >= 2 else None)

    def eval(self, x, order: int = 2, *, viewpoint=None) -> SimplexSplineValue:
        """Evaluate at a single point.

        Without an explicit viewpoint the point itself decides the region,
        with on-line ties broken along a fixed irrational direction.
        """
        x = np.asarray(x, dtype=float)
        vp = x if viewpoint is None else np.asarray(viewpoint, dtype=float)
        val, grad, hess = self.eval_batch(x[None, :], order=order, viewpoint=vp)
        return SimplexSplineValue(
            value=float(val[0]),
            gradient=(grad[0] if order >= 1 else np.zeros(2)),
            hessian=(hess[0] if order >= 2 else np.zeros((2, 2))),
        )


def eval_simplex_spline(knots, x, order: int = 2, *, viewpoint=None) -> SimplexSplineValue:
    """One-shot evaluation of M(x | knots); see SimplexSpline for semantics."""
    return SimplexSpline(knots).eval(x, order=order, viewpoint=viewpoint)


def recurrence_weights(knots, x):
    """Pivot triple and barycentric weights used at the top recurrence level.

    Returns (slot_indices, weights) with weights summing to one and
    sum_i weights[i] * knots[slot_indices[i]] = x.
    """
    km = knots if isinstance(knots, KnotMultiset) else KnotMultiset(knots)
    tri = km._best_triple(tuple(range(6)))
    if tri is None:
        raise DegenerateKnotsError("no affinely independent knot triple")
    corners = km.points[list(tri)]
    T = np.vstack([corners.T, np.ones(3)])
    w = np.linalg.solve(T, np.array([x[0], x[1], 1.0]))
    return tuple(tri), w
