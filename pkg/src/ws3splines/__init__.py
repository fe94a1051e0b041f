"""C2 cubic spline spaces on triangulations refined by the order-3 Wang-Shi
split: local simplex spline bases, Hermite collocation, reduced subspaces and
globally smooth macro-element assembly."""

from .fields import PolynomialField, TrigField, franke_field
from .global_space import GlobalSpline, GlobalSplineSpace, build_space, c2_report
from .hermite import (CollocationMatrix, apply_functionals, collocation_matrix,
                      hermite_functionals, hermite_interpolate)
from .local_basis import BasisSet, build_basis, dual_polynomials
from .mesh import TriangulationMesh, edge_frame, load_mesh, mesh_from_arrays
from .reduction import (INTERIOR_PRESETS, ReductionMatrix, convert_bases,
                        family_point, interior_reduction, reduce_space,
                        verify_poly_reproduction)
from .simplex_spline import (KnotMultiset, SimplexSpline, SimplexSplineValue,
                             eval_simplex_spline, recurrence_weights)
from .ws3_geometry import MacroTriangleGeometry, build_ws3, locate_cell

__version__ = "0.1.0"

__all__ = [
    "BasisSet", "CollocationMatrix", "GlobalSpline", "GlobalSplineSpace",
    "INTERIOR_PRESETS", "KnotMultiset", "MacroTriangleGeometry",
    "PolynomialField", "ReductionMatrix", "SimplexSpline", "SimplexSplineValue",
    "TriangulationMesh", "TrigField", "apply_functionals", "build_basis",
    "build_space", "build_ws3", "c2_report", "collocation_matrix",
    "convert_bases", "dual_polynomials", "edge_frame", "eval_simplex_spline",
    "family_point", "franke_field", "hermite_functionals",
    "hermite_interpolate", "interior_reduction", "load_mesh", "locate_cell",
    "mesh_from_arrays", "recurrence_weights", "reduce_space",
    "verify_poly_reproduction",
]
