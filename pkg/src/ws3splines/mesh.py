"""Triangulation ingestion, validation and edge topology.

The mesh file format is line oriented text: a header ``nV nT``, then nV
lines ``x y``, then nT lines ``i j k`` of 0-based vertex indices.  ``#``
starts a comment.  Edges are always derived.

Every edge carries one global frame shared by both adjacent triangles: the
tangent points from the lower to the higher vertex id and the normal is the
tangent rotated by +90 degrees.  Whether that normal agrees with a given
triangle's outward edge normal is the triangle's business to track; only
orientation consistency across the edge matters for assembling globally
smooth splines.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

__all__ = [
    "MeshError",
    "Vertex",
    "Edge",
    "TriangulationMesh",
    "load_mesh",
    "parse_mesh",
    "mesh_from_arrays",
    "edge_frame",
]

_DEGENERATE_AREA_REL = 1e-12


class MeshError(ValueError):
    """Invalid mesh file or mesh geometry."""


@dataclass(frozen=True)
class Vertex:
    id: int
    position: np.ndarray


@dataclass(frozen=True)
class Edge:
    """Undirected edge with its global frame.

    ``endpoints`` is (lower id, higher id); the tangent runs from the lower
    to the higher endpoint and the normal is the tangent rotated +90 degrees.
    """

    id: int
    endpoints: tuple
    adjacent_triangles: tuple
    unit_tangent: np.ndarray
    unit_normal: np.ndarray

    @property
    def is_boundary(self) -> bool:
        return len(self.adjacent_triangles) == 1


@dataclass
class TriangulationMesh:
    vertices: list
    triangles: list            # vertex-id triples, counterclockwise
    edges: list
    edge_index: dict = field(repr=False, default_factory=dict)
    triangle_edges: list = field(repr=False, default_factory=list)

    @property
    def n_V(self) -> int:
        return len(self.vertices)

    @property
    def n_E(self) -> int:
        return len(self.edges)

    @property
    def n_T(self) -> int:
        return len(self.triangles)

    def positions(self) -> np.ndarray:
        return np.array([v.position for v in self.vertices])

    def triangle_corners(self, t: int) -> np.ndarray:
        return np.array([self.vertices[i].position for i in self.triangles[t]])

    def interior_edges(self):
        return [e for e in self.edges if not e.is_boundary]


def _signed_area(a, b, c) -> float:
    return 0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]))


def _strictly_inside_segment(p, a, b, tol) -> bool:
    ab = b - a
    cross = ab[0] * (p[1] - a[1]) - ab[1] * (p[0] - a[0])
    if abs(cross) > tol:
        return False
    t = float(np.dot(p - a, ab) / np.dot(ab, ab))
    return tol < t < 1 - tol


def _point_strictly_inside_triangle(p, corners, tol) -> bool:
    signs = []
    for k in range(3):
        a, b = corners[k], corners[(k + 1) % 3]
        signs.append((b[0] - a[0]) * (p[1] - a[1]) - (b[1] - a[1]) * (p[0] - a[0]))
    return all(s > tol for s in signs) or all(s < -tol for s in signs)


def _segments_cross(p1, p2, q1, q2, tol) -> bool:
    def orient(a, b, c):
        v = (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
        return 0 if abs(v) <= tol else (1 if v > 0 else -1)

    o1, o2 = orient(p1, p2, q1), orient(p1, p2, q2)
    o3, o4 = orient(q1, q2, p1), orient(q1, q2, p2)
    return o1 * o2 < 0 and o3 * o4 < 0


def mesh_from_arrays(points, triangles) -> TriangulationMesh:
    """Build and validate a mesh from coordinate and connectivity arrays."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise MeshError(f"vertex array must be (n, 2), got {pts.shape}")
    if not np.all(np.isfinite(pts)):
        raise MeshError("vertex coordinates must be finite")
    tris = [tuple(int(i) for i in t) for t in triangles]
    n = len(pts)
    bbox = pts.max(axis=0) - pts.min(axis=0) if n else np.zeros(2)
    diag2 = float(bbox @ bbox)
    area_tol = _DEGENERATE_AREA_REL * max(diag2, np.finfo(float).tiny)

    oriented = []
    for t, (i, j, k) in enumerate(tris):
        if len({i, j, k}) != 3:
            raise MeshError(f"triangle {t} repeats a vertex: {(i, j, k)}")
        if not all(0 <= v < n for v in (i, j, k)):
            raise MeshError(f"triangle {t} references a vertex out of range")
        area = _signed_area(pts[i], pts[j], pts[k])
        if abs(area) < area_tol:
            raise MeshError(f"triangle {t} is degenerate (area {area:g})")
        oriented.append((i, j, k) if area > 0 else (i, k, j))

    edge_tris: dict[tuple, list] = {}
    for t, (i, j, k) in enumerate(oriented):
        for a, b in ((i, j), (j, k), (k, i)):
            edge_tris.setdefault((min(a, b), max(a, b)), []).append(t)

    for (a, b), ts in edge_tris.items():
        if len(ts) > 2:
            raise MeshError(f"edge {(a, b)} is shared by {len(ts)} triangles")

    # conformity: no vertex strictly inside another triangle's edge, and no
    # pair of triangles overlapping in their interiors
    geom_tol = 1e-12 * max(diag2, 1.0)
    for v in range(n):
        for (a, b) in edge_tris:
            if v in (a, b):
                continue
            if _strictly_inside_segment(pts[v], pts[a], pts[b], geom_tol):
                raise MeshError(
                    f"vertex {v} hangs on edge {(a, b)}: mesh is not conforming")
    for t1, t2 in itertools.combinations(range(len(oriented)), 2):
        c1 = [pts[v] for v in oriented[t1]]
        c2 = [pts[v] for v in oriented[t2]]
        shared = set(oriented[t1]) & set(oriented[t2])
        for v in set(oriented[t1]) - shared:
            if _point_strictly_inside_triangle(pts[v], c2, geom_tol):
                raise MeshError(f"triangles {t1} and {t2} overlap")
        for v in set(oriented[t2]) - shared:
            if _point_strictly_inside_triangle(pts[v], c1, geom_tol):
                raise MeshError(f"triangles {t1} and {t2} overlap")
        for ea in itertools.combinations(oriented[t1], 2):
            for eb in itertools.combinations(oriented[t2], 2):
                if set(ea) & set(eb):
                    continue
                if _segments_cross(pts[ea[0]], pts[ea[1]], pts[eb[0]], pts[eb[1]],
                                   geom_tol):
                    raise MeshError(f"triangles {t1} and {t2} overlap")

    edges = []
    edge_index = {}
    for eid, ((a, b), ts) in enumerate(sorted(edge_tris.items())):
        tangent = pts[b] - pts[a]
        tangent = tangent / np.linalg.norm(tangent)
        normal = np.array([-tangent[1], tangent[0]])
        edges.append(Edge(id=eid, endpoints=(a, b), adjacent_triangles=tuple(ts),
                          unit_tangent=tangent, unit_normal=normal))
        edge_index[(a, b)] = eid

    triangle_edges = []
    for (i, j, k) in oriented:
        triangle_edges.append(tuple(
            edge_index[(min(a, b), max(a, b))] for a, b in ((i, j), (j, k), (k, i))
        ))

    return TriangulationMesh(
        vertices=[Vertex(i, pts[i].copy()) for i in range(n)],
        triangles=oriented,
        edges=edges,
        edge_index=edge_index,
        triangle_edges=triangle_edges,
    )


def parse_mesh(text: str) -> TriangulationMesh:
    """Parse the text format; see module docstring."""
    tokens = []
    for line in text.splitlines():
        body = line.split("#", 1)[0].strip()
        if body:
            tokens.extend(body.split())
    if len(tokens) < 2:
        raise MeshError("missing header 'nV nT'")
    try:
        n_v, n_t = int(tokens[0]), int(tokens[1])
    except ValueError as exc:
        raise MeshError(f"bad header: {exc}") from exc
    need = 2 + 2 * n_v + 3 * n_t
    if len(tokens) != need:
        raise MeshError(f"expected {need} numbers for nV={n_v}, nT={n_t}; "
                        f"found {len(tokens)}")
    try:
        coords = [float(x) for x in tokens[2:2 + 2 * n_v]]
        conn = [int(x) for x in tokens[2 + 2 * n_v:]]
    except ValueError as exc:
        raise MeshError(f"bad numeric field: {exc}") from exc
    pts = np.array(coords, dtype=float).reshape(n_v, 2)
    tris = np.array(conn, dtype=int).reshape(n_t, 3)
    return mesh_from_arrays(pts, tris)


def load_mesh(path) -> TriangulationMesh:
    """Load and validate a mesh file."""
    return parse_mesh(Path(path).read_text(encoding="utf-8"))


def edge_frame(mesh: TriangulationMesh, edge_id: int):
    """(unit_normal, unit_tangent) of an edge, identical for both adjacent
    triangles by construction."""
    e = mesh.edges[edge_id]
    return e.unit_normal.copy(), e.unit_tangent.copy()
