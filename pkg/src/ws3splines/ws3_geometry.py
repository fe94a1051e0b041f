"""Geometry of the order-3 Wang-Shi split of a triangle.

Each edge of the triangle is divided into thirds, giving 9 boundary points.
The complete graph on those points cuts the triangle into 75 convex cells
bounded by 18 interior lines (plus the 3 edge lines).  All combinatorics are
computed once, exactly, on the reference triangle (0,0),(1,0),(0,1) using
rational arithmetic; an arbitrary triangle only carries the affine map to and
from that reference.  This avoids any floating-point trouble with the many
exact triple intersections of the complete graph.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cmp_to_key, lru_cache
from math import gcd

import numpy as np

__all__ = [
    "MacroTriangleGeometry",
    "CellLocation",
    "GeometryError",
    "build_ws3",
    "locate_cell",
    "BOUNDARY_POINT_NAMES",
]

_F = Fraction

# The 9 boundary points of the reference triangle, as (u, v) rationals.
# Order: p1, p2, p3, p12, p13, p21, p23, p31, p32 where pkl is the point at
# distance 1/3 from vertex l on the edge opposite vertex k.
BOUNDARY_POINT_NAMES = ("p1", "p2", "p3", "p12", "p13", "p21", "p23", "p31", "p32")

_REF_POINTS = (
    (_F(0), _F(0)),          # p1
    (_F(1), _F(0)),          # p2
    (_F(0), _F(1)),          # p3
    (_F(2, 3), _F(1, 3)),    # p12 = (2 p2 + p3)/3
    (_F(1, 3), _F(2, 3)),    # p13 = (p2 + 2 p3)/3
    (_F(0), _F(1, 3)),       # p21 = (2 p1 + p3)/3
    (_F(0), _F(2, 3)),       # p23 = (p1 + 2 p3)/3
    (_F(1, 3), _F(0)),       # p31 = (2 p1 + p2)/3
    (_F(2, 3), _F(0)),       # p32 = (p1 + 2 p2)/3
)

# Point ids lying on each edge line of the reference triangle.
EDGE_POINT_IDS = (
    frozenset({0, 1, 7, 8}),  # edge p1-p2 (v = 0)
    frozenset({1, 2, 3, 4}),  # edge p2-p3 (u + v = 1)
    frozenset({0, 2, 5, 6}),  # edge p3-p1 (u = 0)
)


class GeometryError(ValueError):
    """Raised for degenerate input or out-of-domain queries."""


def _line_through(p, q):
    """Integer-normalized line a*u + b*v + c = 0 through two rational points."""
    a = q[1] - p[1]
    b = p[0] - q[0]
    c = -(a * p[0] + b * p[1])
    den = a.denominator * b.denominator * c.denominator
    ai, bi, ci = int(a * den), int(b * den), int(c * den)
    g = gcd(gcd(abs(ai), abs(bi)), abs(ci))
    ai, bi, ci = ai // g, bi // g, ci // g
    if (ai, bi, ci) < (0, 0, 0) or (ai < 0) or (ai == 0 and bi < 0):
        ai, bi, ci = -ai, -bi, -ci
    return (ai, bi, ci)


def _dir_key(d):
    """Comparator key pieces for exact CCW angular sorting of directions."""
    dx, dy = d
    upper = 0 if (dy > 0 or (dy == 0 and dx > 0)) else 1
    return upper


def _dir_cmp(d1, d2):
    h1, h2 = _dir_key(d1), _dir_key(d2)
    if h1 != h2:
        return -1 if h1 < h2 else 1
    cross = d1[0] * d2[1] - d1[1] * d2[0]
    if cross > 0:
        return -1
    if cross < 0:
        return 1
    return 0


@dataclass(frozen=True)
class _ReferenceCell:
    """One face of the reference arrangement."""

    index: int
    vertices: tuple          # CCW loop of (Fraction, Fraction)
    area: Fraction
    centroid: tuple          # (Fraction, Fraction), strictly interior
    signs: tuple             # sign of each arrangement line at the centroid


class _ReferenceArrangement:
    """The full arrangement of the complete graph, computed once and cached."""

    def __init__(self):
        pts = _REF_POINTS
        lines = sorted({_line_through(pts[i], pts[j])
                        for i, j in itertools.combinations(range(9), 2)})
        if len(lines) != 21:
            raise AssertionError(f"expected 21 distinct knot lines, got {len(lines)}")
        self.lines = tuple(lines)
        edge_lines = {_line_through(pts[0], pts[1]),
                      _line_through(pts[1], pts[2]),
                      _line_through(pts[2], pts[0])}
        self.edge_line_indices = tuple(i for i, ln in enumerate(lines) if ln in edge_lines)
        self.interior_line_indices = tuple(i for i, ln in enumerate(lines)
                                           if ln not in edge_lines)

        verts = self._intersection_vertices()
        self._vertices = verts
        segments = self._atomic_segments(verts)
        self.cells = self._extract_faces(verts, segments)
        self.pattern_to_cell = {c.signs: c.index for c in self.cells}
        self.adjacency = self._cell_adjacency(segments)

    # -- construction ------------------------------------------------------

    def _intersection_vertices(self):
        seen = {}
        for (a1, b1, c1), (a2, b2, c2) in itertools.combinations(self.lines, 2):
            det = a1 * b2 - a2 * b1
            if det == 0:
                continue
            u = _F(b1 * c2 - b2 * c1, det)
            v = _F(a2 * c1 - a1 * c2, det)
            if u >= 0 and v >= 0 and u + v <= 1:
                seen.setdefault((u, v), len(seen))
        return seen

    def _atomic_segments(self, verts):
        segments = set()
        for (a, b, c) in self.lines:
            on_line = [p for p in verts if a * p[0] + b * p[1] + c == 0]
            d = (_F(-b), _F(a))
            on_line.sort(key=lambda p: p[0] * d[0] + p[1] * d[1])
            for p, q in zip(on_line, on_line[1:]):
                mid = ((p[0] + q[0]) / 2, (p[1] + q[1]) / 2)
                if mid[0] >= 0 and mid[1] >= 0 and mid[0] + mid[1] <= 1:
                    segments.add((verts[p], verts[q]))
        return segments

    def _extract_faces(self, verts, segments):
        ids = {i: p for p, i in verts.items()}
        outgoing = {i: [] for i in ids}
        for u, v in segments:
            outgoing[u].append(v)
            outgoing[v].append(u)

        def direction(u, v):
            pu, pv = ids[u], ids[v]
            dx, dy = pv[0] - pu[0], pv[1] - pu[1]
            den = dx.denominator * dy.denominator
            xi, yi = int(dx * den), int(dy * den)
            g = gcd(abs(xi), abs(yi))
            return (xi // g, yi // g)

        order = {}
        for u, nbrs in outgoing.items():
            nbrs.sort(key=cmp_to_key(lambda a, b: _dir_cmp(direction(u, a), direction(u, b))))
            order[u] = {v: k for k, v in enumerate(nbrs)}

        visited = set()
        faces = []
        for u, v in itertools.chain(((a, b) for a, b in segments),
                                    ((b, a) for a, b in segments)):
            if (u, v) in visited:
                continue
            loop = []
            a, b = u, v
            while (a, b) not in visited:
                visited.add((a, b))
                loop.append(a)
                # next dart with the face kept on the left: rotate the
                # reversed dart one step clockwise around b
                nbrs = outgoing[b]
                k = order[b][a]
                c = nbrs[(k - 1) % len(nbrs)]
                a, b = b, c
            pts = [ids[i] for i in loop]
            area2 = sum(p[0] * q[1] - q[0] * p[1] for p, q in zip(pts, pts[1:] + pts[:1]))
            if area2 > 0:
                faces.append((pts, _F(area2, 2), frozenset(loop)))

        total = sum(a for _, a, _ in faces)
        if total != _F(1, 2):
            raise AssertionError(f"cell areas sum to {total}, expected 1/2")

        cells = []
        faces.sort(key=lambda f: min(f[0]))
        for pts, area, _ in faces:
            cx = sum(p[0] for p in pts) / len(pts)
            cy = sum(p[1] for p in pts) / len(pts)
            signs = tuple(1 if a * cx + b * cy + c > 0 else -1
                          for (a, b, c) in self.lines)
            cells.append((pts, area, (cx, cy), signs))
        cells.sort(key=lambda c: c[2])
        return tuple(_ReferenceCell(i, tuple(pts), area, cen, signs)
                     for i, (pts, area, cen, signs) in enumerate(cells))

    def _cell_adjacency(self, segments):
        vid = self._vertices
        seg_faces = {}
        for cell in self.cells:
            n = len(cell.vertices)
            for k in range(n):
                p, q = cell.vertices[k], cell.vertices[(k + 1) % n]
                key = tuple(sorted((vid[p], vid[q])))
                seg_faces.setdefault(key, []).append(cell.index)
        adj = {i: set() for i in range(len(self.cells))}
        for faces in seg_faces.values():
            for a, b in itertools.combinations(sorted(set(faces)), 2):
                adj[a].add(b)
                adj[b].add(a)
        return {i: tuple(sorted(s)) for i, s in adj.items()}

    # -- queries -----------------------------------------------------------

    def signs_of_point(self, u, v):
        return tuple(
            0 if (s := a * u + b * v + c) == 0 else (1 if s > 0 else -1)
            for (a, b, c) in self.lines
        )

    def cells_incident(self, signs):
        """Cells whose closure contains a point with the given sign vector."""
        out = []
        for cell in self.cells:
            if all(sp == 0 or sp == sc for sp, sc in zip(signs, cell.signs)):
                out.append(cell.index)
        return tuple(out)


@lru_cache(maxsize=1)
def reference_arrangement() -> _ReferenceArrangement:
    return _ReferenceArrangement()


@dataclass(frozen=True)
class CellLocation:
    """Result of a point-location query: one interior cell, or the set of
    cells incident to a point lying on knot lines."""

    cells: tuple
    on_lines: bool

    @property
    def cell(self) -> int:
        """Deterministic representative: the lowest incident cell id."""
        return self.cells[0]


@dataclass
class MacroTriangleGeometry:
    """Wang-Shi split data for one triangle.

    World-coordinate quantities are derived from the exact reference
    arrangement through the affine map corner coordinates -> reference.
    """

    corners: np.ndarray            # (3, 2) p1, p2, p3
    knots: np.ndarray              # (9, 2) boundary points, order of BOUNDARY_POINT_NAMES
    edge_thirds: np.ndarray        # (6, 2) p12, p13, p21, p23, p31, p32
    midpoints: np.ndarray          # (3, 2) q1, q2, q3
    barycenter: np.ndarray         # (2,)
    area: float
    _jac: np.ndarray = field(repr=False, default=None)
    _jac_inv: np.ndarray = field(repr=False, default=None)
    _ref: _ReferenceArrangement = field(repr=False, default=None)
    _line_tol: float = field(repr=False, default=1e-12)

    # -- derived views -----------------------------------------------------

    @property
    def cell_count(self) -> int:
        return len(self._ref.cells)

    @property
    def interior_line_count(self) -> int:
        return len(self._ref.interior_line_indices)

    def cell_polygons(self):
        """World-coordinate vertex loops of all cells (list of (k,2) arrays)."""
        return [self.to_world_many(c.vertices) for c in self._ref.cells]

    def cell_areas(self) -> np.ndarray:
        scale = abs(float(np.linalg.det(self._jac)))
        return np.array([float(c.area) for c in self._ref.cells]) * scale

    def cell_centroid(self, cell: int) -> np.ndarray:
        cu, cv = self._ref.cells[cell].centroid
        return self.to_world(float(cu), float(cv))

    def cell_adjacency(self):
        return self._ref.adjacency

    def interior_lines(self):
        """The 18 interior knot lines as world-coordinate segment endpoints."""
        ref = self._ref
        segs = []
        for li in ref.interior_line_indices:
            a, b, c = ref.lines[li]
            pts = [p for p in _REF_POINTS if a * p[0] + b * p[1] + c == 0]
            pts.sort()
            segs.append(self.to_world_many((pts[0], pts[-1])))
        return segs

    # -- coordinate maps ----------------------------------------------------

    def to_world(self, u: float, v: float) -> np.ndarray:
        return self.corners[0] + self._jac @ np.array([u, v])

    def to_world_many(self, ref_pts) -> np.ndarray:
        arr = np.array([[float(u), float(v)] for u, v in ref_pts])
        return self.corners[0] + arr @ self._jac.T

    def to_reference(self, x) -> np.ndarray:
        return self._jac_inv @ (np.asarray(x, dtype=float) - self.corners[0])

    # -- point location -----------------------------------------------------

    def locate(self, x) -> CellLocation:
        """Locate a world point in the split; raises GeometryError outside."""
        u, v = self.to_reference(x)
        tol = self._line_tol
        if u < -tol or v < -tol or u + v > 1 + tol:
            raise GeometryError(f"point {tuple(np.asarray(x))} lies outside the triangle")
        ref = self._ref
        signs = []
        on_lines = False
        for (a, b, c) in ref.lines:
            s = a * u + b * v + c
            scale = abs(a) + abs(b)
            if abs(s) <= tol * scale:
                signs.append(0)
                on_lines = True
            else:
                signs.append(1 if s > 0 else -1)
        signs = tuple(signs)
        if not on_lines:
            cell = ref.pattern_to_cell.get(signs)
            if cell is not None:
                return CellLocation(cells=(cell,), on_lines=False)
            on_lines = True  # numerically inconsistent pattern: fall through
        cells = ref.cells_incident(signs)
        if not cells:
            raise GeometryError(f"point {tuple(np.asarray(x))} lies outside the triangle")
        return CellLocation(cells=cells, on_lines=True)

    def locate_many(self, X) -> np.ndarray:
        """Representative cell id for each row of X (lowest incident id)."""
        X = np.asarray(X, dtype=float)
        UV = (X - self.corners[0]) @ self._jac_inv.T
        ref = self._ref
        A = np.array([[a, b] for (a, b, _) in ref.lines], dtype=float)
        C = np.array([c for (_, _, c) in ref.lines], dtype=float)
        S = UV @ A.T + C
        scale = (np.abs(A).sum(axis=1)) * self._line_tol
        near = np.abs(S) <= scale
        pattern = np.where(S > 0, 1, -1).astype(np.int8)
        out = np.empty(len(X), dtype=np.int64)
        clean = ~near.any(axis=1)
        lut = ref.pattern_to_cell
        for i in np.nonzero(clean)[0]:
            cell = lut.get(tuple(int(s) for s in pattern[i]))
            if cell is None:
                clean[i] = False
            else:
                out[i] = cell
        for i in np.nonzero(~clean)[0]:
            out[i] = self.locate(X[i]).cell
        return out


def build_ws3(p1, p2, p3, *, line_tol: float = 1e-12) -> MacroTriangleGeometry:
    """Construct the order-3 Wang-Shi split of the triangle (p1, p2, p3)."""
    corners = np.array([p1, p2, p3], dtype=float)
    if not np.all(np.isfinite(corners)):
        raise GeometryError("triangle corners must be finite")
    jac = np.column_stack([corners[1] - corners[0], corners[2] - corners[0]])
    det = float(np.linalg.det(jac))
    diam2 = float(max(np.sum((corners[i] - corners[j]) ** 2)
                      for i in range(3) for j in range(i)))
    if abs(det) <= 1e-12 * diam2:
        raise GeometryError("triangle corners are (nearly) collinear")
    ref = reference_arrangement()
    knots = corners[0] + np.array([[float(u), float(v)] for u, v in _REF_POINTS]) @ jac.T
    geom = MacroTriangleGeometry(
        corners=corners,
        knots=knots,
        edge_thirds=knots[3:],
        midpoints=np.array([(corners[1] + corners[2]) / 2,
                            (corners[0] + corners[2]) / 2,
                            (corners[0] + corners[1]) / 2]),
        barycenter=corners.mean(axis=0),
        area=abs(det) / 2,
        _jac=jac,
        _jac_inv=np.linalg.inv(jac),
        _ref=ref,
        _line_tol=line_tol,
    )
    return geom


def locate_cell(geom: MacroTriangleGeometry, x) -> CellLocation:
    """Locate a point in the split of ``geom`` (module-level convenience)."""
    return geom.locate(x)
