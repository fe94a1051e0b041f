"""Globally C2 spline spaces over a whole triangulation.

For m in {18, 21, 27, 28} the space keeps, per triangle, the first m local
interpolation conditions; conditions attached to shared vertices and edges
are identified across triangles through the mesh's global edge frames, and
removed conditions are re-expressed by the same edge rules on both sides of
every edge, which is what makes the local pieces join with C2 smoothness.

Degrees of freedom are laid out as six slots per vertex (value, Dx, Dy,
Dx^2, Dy^2, DxDy), then per-edge slots (one first-normal for m >= 21, plus
two second-normal for m >= 27), then one barycenter value per triangle for
the full space m = 28.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .fields import LocalSplineField
from .hermite import CollocationMatrix, collocation_matrix, hermite_functionals
from .local_basis import BasisSet, build_basis
from .mesh import TriangulationMesh
from .reduction import (DEFAULT_EDGE_STRATEGY, DEFAULT_INTERIOR_PRESET,
                        ReducedSpace, reduce_space)
from .ws3_geometry import GeometryError

__all__ = [
    "GlobalDofTable",
    "GlobalSplineSpace",
    "GlobalSpline",
    "EdgeJumpReport",
    "build_space",
    "interpolate",
    "eval_global",
    "c2_report",
]

_EDGE_SLOTS = {18: 0, 21: 1, 27: 3, 28: 3}
# local lambda index (0-based) of the first-normal condition per local edge
_EDGE_NORMAL_IX = {2: 18, 0: 19, 1: 20}
# and of the second-normal conditions per (local edge, near corner)
_EDGE_NORMAL2_IX = {(2, 0): 21, (1, 0): 22, (0, 1): 23,
                    (2, 1): 24, (1, 2): 25, (0, 2): 26}


@dataclass
class GlobalDofTable:
    """Slot layout and the (slot, sign) map for every triangle's kept
    functionals."""

    m: int
    n_V: int
    n_E: int
    n_T: int
    total_dim: int
    vertex_slot_base: int = 0
    edge_slot_base: int = 0
    triangle_slot_base: int = 0
    local_maps: list = field(default_factory=list)   # per triangle: (slots, signs)

    def vertex_slots(self, v: int) -> slice:
        return slice(6 * v, 6 * v + 6)

    def edge_slots(self, e: int) -> slice:
        k = _EDGE_SLOTS[self.m]
        return slice(self.edge_slot_base + k * e, self.edge_slot_base + k * (e + 1))

    def triangle_slot(self, t: int) -> int:
        if self.m != 28:
            raise ValueError("per-triangle slots exist only in the full space")
        return self.triangle_slot_base + t


@dataclass
class _TriangleData:
    basis: BasisSet
    collocation: CollocationMatrix
    reduced: ReducedSpace | None      # None for the full space


class GlobalSplineSpace:
    """The space S(m) over a mesh, with per-triangle construction data."""

    def __init__(self, mesh: TriangulationMesh, m: int,
                 interior=DEFAULT_INTERIOR_PRESET,
                 edge_strategy: str = DEFAULT_EDGE_STRATEGY):
        if m not in (18, 21, 27, 28):
            raise ValueError(f"m must be one of 18, 21, 27, 28; got {m}")
        self.mesh = mesh
        self.m = m
        self.interior = interior
        self.edge_strategy = edge_strategy
        self.triangle_data = []
        for t in range(mesh.n_T):
            corners = mesh.triangle_corners(t)
            basis = build_basis(*corners)
            C = collocation_matrix(basis)
            reduced = None if m == 28 else reduce_space(
                basis, C, m, interior=interior, edge_strategy=edge_strategy)
            self.triangle_data.append(_TriangleData(basis, C, reduced))
        self.dof_table = self._build_dof_table()

    # -- dof table -----------------------------------------------------------

    def _build_dof_table(self) -> GlobalDofTable:
        mesh, m = self.mesh, self.m
        per_edge = _EDGE_SLOTS[m]
        edge_base = 6 * mesh.n_V
        tri_base = edge_base + per_edge * mesh.n_E
        total = tri_base + (mesh.n_T if m == 28 else 0)
        table = GlobalDofTable(
            m=m, n_V=mesh.n_V, n_E=mesh.n_E, n_T=mesh.n_T, total_dim=total,
            edge_slot_base=edge_base, triangle_slot_base=tri_base,
        )
        for t in range(mesh.n_T):
            table.local_maps.append(self._local_map(t, table))
        return table

    def _local_map(self, t: int, table: GlobalDofTable):
        mesh, m = self.mesh, self.m
        tri = mesh.triangles[t]
        fns = hermite_functionals(mesh.triangle_corners(t))
        slots = np.empty(m, dtype=np.int64)
        signs = np.ones(m)
        for v_local, v_global in enumerate(tri):
            base = 6 * v_global
            slots[v_local] = base                       # value
            slots[3 + 2 * v_local] = base + 1           # Dx
            slots[4 + 2 * v_local] = base + 2           # Dy
            if m >= 18:
                slots[9 + 2 * v_local] = base + 3       # Dx^2
                slots[10 + 2 * v_local] = base + 4      # Dy^2
                slots[15 + v_local] = base + 5          # DxDy
        if m >= 21:
            for k in range(3):
                a, b = tri[(k + 1) % 3], tri[(k + 2) % 3]
                e = mesh.edge_index[(min(a, b), max(a, b))]
                lam = _EDGE_NORMAL_IX[k]
                slots[lam] = table.edge_slots(e).start
                local_n = fns[lam].direction
                signs[lam] = 1.0 if local_n @ mesh.edges[e].unit_normal > 0 else -1.0
        if m >= 27:
            for (k, near), lam in _EDGE_NORMAL2_IX.items():
                a, b = tri[(k + 1) % 3], tri[(k + 2) % 3]
                lo, hi = min(a, b), max(a, b)
                e = mesh.edge_index[(lo, hi)]
                near_global = tri[near]
                offset = 1 if near_global == lo else 2
                slots[lam] = table.edge_slots(e).start + offset
        if m == 28:
            slots[27] = table.triangle_slot(t)
        return slots, signs

    # -- spline construction ---------------------------------------------------

    @property
    def dimension(self) -> int:
        return self.dof_table.total_dim

    def interpolate(self, f_evaluator) -> "GlobalSpline":
        """Fill all degrees of freedom from a field and return the spline."""
        mesh, m = self.mesh, self.m
        dofs = np.zeros(self.dimension)
        for v in mesh.vertices:
            value, grad, hess = f_evaluator.eval(v.position, 2)
            dofs[6 * v.id: 6 * v.id + 6] = (
                value, grad[0], grad[1], hess[0, 0], hess[1, 1], hess[0, 1])
        if m >= 21:
            for e in mesh.edges:
                a, b = e.endpoints
                mid = (mesh.vertices[a].position + mesh.vertices[b].position) / 2
                base = self.dof_table.edge_slots(e.id).start
                _, grad, hess = f_evaluator.eval(mid, 2)
                dofs[base] = e.unit_normal @ grad
                if m >= 27:
                    pa = mesh.vertices[a].position
                    pb = mesh.vertices[b].position
                    for off, pt in ((1, (2 * pa + pb) / 3), (2, (pa + 2 * pb) / 3)):
                        _, _, hess = f_evaluator.eval(pt, 2)
                        dofs[base + off] = e.unit_normal @ hess @ e.unit_normal
        if m == 28:
            for t in range(mesh.n_T):
                q = mesh.triangle_corners(t).mean(axis=0)
                value, _, _ = f_evaluator.eval(q, 0)
                dofs[self.dof_table.triangle_slot(t)] = value
        return GlobalSpline(self, dofs)


class GlobalSpline:
    """A member of a global space: global DOF values plus lazily recovered
    per-triangle simplex coefficients."""

    def __init__(self, space: GlobalSplineSpace, dof_values):
        self.space = space
        self.dof_values = np.asarray(dof_values, dtype=float)
        if self.dof_values.shape != (space.dimension,):
            raise ValueError(
                f"expected {space.dimension} degrees of freedom, "
                f"got {self.dof_values.shape}")
        self._coeffs: dict[int, np.ndarray] = {}

    @property
    def m(self) -> int:
        return self.space.m

    def local_coefficients(self, t: int) -> np.ndarray:
        """Simplex-basis coefficients of the spline restricted to triangle t."""
        got = self._coeffs.get(t)
        if got is not None:
            return got
        space = self.space
        slots, signs = space.dof_table.local_maps[t]
        kept = signs * self.dof_values[slots]
        data = space.triangle_data[t]
        if space.m == 28:
            full = kept
        else:
            full = np.concatenate([kept, data.reduced.hermite.r21 @ kept])
        coeffs = data.collocation.solve(full)
        self._coeffs[t] = coeffs
        return coeffs

    # -- evaluation -------------------------------------------------------------

    def locate_triangle(self, x, slack: float = 1e-12) -> int:
        """Containing triangle: lowest id whose barycentric coordinates are
        all >= -slack (relative)."""
        mesh = self.space.mesh
        x = np.asarray(x, dtype=float)
        for t in range(mesh.n_T):
            corners = mesh.triangle_corners(t)
            T = np.column_stack([corners[1] - corners[0], corners[2] - corners[0]])
            uv = np.linalg.solve(T, x - corners[0])
            if uv[0] >= -slack and uv[1] >= -slack and uv.sum() <= 1 + slack:
                return t
        raise GeometryError(f"point {tuple(x)} lies outside the mesh domain")

    def eval(self, x, order: int = 2):
        """(value, gradient, hessian) at a point of the mesh domain."""
        return self.eval_on_triangle(self.locate_triangle(x), x, order=order)

    def eval_on_triangle(self, t: int, x, order: int = 2):
        """Evaluate the restriction to triangle t (x must lie in its closure)."""
        c = self.local_coefficients(t)
        basis = self.space.triangle_data[t].basis
        val, grad, hess = basis.eval_all(np.asarray(x, dtype=float), order=order)
        value = float(val @ c)
        g = grad.T @ c if order >= 1 else None
        h = np.tensordot(c, hess, axes=(0, 0)) if order >= 2 else None
        return value, g, h

    def eval_many_on_triangle(self, t: int, X, order: int = 2):
        c = self.local_coefficients(t)
        basis = self.space.triangle_data[t].basis
        val, grad, hess = basis.eval_many(X, order=order)
        value = val @ c
        g = np.einsum("njd,j->nd", grad, c) if order >= 1 else None
        h = np.einsum("njab,j->nab", hess, c) if order >= 2 else None
        return value, g, h

    def as_field(self, t: int) -> LocalSplineField:
        """The restriction to triangle t as a field object."""
        return LocalSplineField(self.space.triangle_data[t].basis,
                                self.local_coefficients(t))


@dataclass
class EdgeJumpReport:
    """Maximum two-sided mismatch across each interior edge."""

    edges: list          # edge ids
    value: np.ndarray
    gradient: np.ndarray  # max over both components
    hessian: np.ndarray   # max over all components

    def max_jump(self) -> float:
        if not self.edges:
            return 0.0
        return float(max(self.value.max(), self.gradient.max(), self.hessian.max()))


def c2_report(spline: GlobalSpline, samples_per_edge: int = 20) -> EdgeJumpReport:
    """Evaluate value, gradient and hessian from both sides of every interior
    edge at interior sample points and report the largest jumps."""
    mesh = spline.space.mesh
    edges, v_j, g_j, h_j = [], [], [], []
    ts = np.arange(1, samples_per_edge + 1) / (samples_per_edge + 1.0)
    for e in mesh.interior_edges():
        a, b = e.endpoints
        pa, pb = mesh.vertices[a].position, mesh.vertices[b].position
        pts = pa[None, :] + ts[:, None] * (pb - pa)[None, :]
        t1, t2 = e.adjacent_triangles
        v1, g1, h1 = spline.eval_many_on_triangle(t1, pts, order=2)
        v2, g2, h2 = spline.eval_many_on_triangle(t2, pts, order=2)
        edges.append(e.id)
        v_j.append(np.abs(v1 - v2).max())
        g_j.append(np.abs(g1 - g2).max())
        h_j.append(np.abs(h1 - h2).max())
    return EdgeJumpReport(edges=edges, value=np.array(v_j),
                          gradient=np.array(g_j), hessian=np.array(h_j))


def build_space(mesh: TriangulationMesh, m: int, *,
                interior=DEFAULT_INTERIOR_PRESET,
                edge_strategy: str = DEFAULT_EDGE_STRATEGY) -> GlobalSplineSpace:
    return GlobalSplineSpace(mesh, m, interior=interior, edge_strategy=edge_strategy)


def interpolate(space: GlobalSplineSpace, f_evaluator) -> GlobalSpline:
    return space.interpolate(f_evaluator)


def eval_global(spline: GlobalSpline, x, order: int = 2):
    return spline.eval(x, order=order)
