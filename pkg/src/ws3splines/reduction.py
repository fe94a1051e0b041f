"""Reduced subspaces of the 28-dimensional local spline space.

Three reductions are provided, all preserving cubic polynomials:

* m = 27 removes the barycenter value.  Redistributing the last basis
  function over the other 27 with one coefficient per symmetry group leaves a
  three-parameter family; the family is parameterized by the coefficients of
  groups 2, 3 and 5, with groups 1, 4 and 6 then forced.
* m = 21 additionally removes the six second-normal-derivative conditions by
  making the second normal derivative along each edge the straight line
  through its endpoint values.
* m = 18 also removes the three first-normal-derivative conditions using a
  midpoint rule built from endpoint data; two constructions of that rule are
  offered (interpolate-then-average with one-sided quadratics, or with C^1
  piecewise quadratics broken at the edge third-points).  Both are exact on
  cubics.

The same subspace can be spanned on the interpolation side (columns of
Hermite basis functions) or on the simplex side (columns of B functions);
``convert_bases`` moves between the two through the block structure of the
collocation matrix.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .local_basis import SYMMETRY_GROUPS, BasisSet, DualPolynomialTable
from .hermite import CollocationMatrix

__all__ = [
    "EDGE_STRATEGIES",
    "INTERIOR_PRESETS",
    "InteriorFamilyPoint",
    "ReductionMatrix",
    "ReducedSpace",
    "family_point",
    "interior_reduction",
    "verify_poly_reproduction",
    "convert_bases",
    "peel_edge_second_derivatives",
    "peel_edge_first_derivatives",
    "reduce_space",
]

EDGE_STRATEGIES = ("quad-average", "pw-quad-average")

# Named parameter choices (group-2, group-3, group-5 coefficients) for the
# interior reduction.  eq9 zeroes many coefficients; eq10 has the least
# negative ones; vertex12 uses only 12 vertex-attached functions;
# interior-only only touches functions vanishing on the boundary.
INTERIOR_PRESETS = {
    "eq9": (Fraction(0), Fraction(0), Fraction(-25, 54)),
    "eq10": (Fraction(-1, 29), Fraction(-1, 29), Fraction(-1, 29)),
    "vertex12": (Fraction(-5, 27), Fraction(0), Fraction(0)),
    "interior-only": (Fraction(0), Fraction(0), Fraction(-5, 18)),
}

DEFAULT_INTERIOR_PRESET = "eq10"
DEFAULT_EDGE_STRATEGY = "quad-average"


@dataclass(frozen=True)
class InteriorFamilyPoint:
    """One member of the interior-removal family, one coefficient per
    symmetry group."""

    r1: float
    r2: float
    r3: float
    r4: float
    r5: float
    r6: float

    def as_array(self) -> np.ndarray:
        return np.array([self.r1, self.r2, self.r3, self.r4, self.r5, self.r6],
                        dtype=float)

    def expand(self) -> np.ndarray:
        """The 27 per-function coefficients, groups expanded in order."""
        out = np.empty(27)
        values = self.as_array()
        for g, members in enumerate(SYMMETRY_GROUPS[:6]):
            out[list(members)] = values[g]
        return out


def family_point(r2, r3, r5) -> InteriorFamilyPoint:
    """Complete (r2, r3, r5) to a full family member.

    The closure relations are
        r1 = 4 r2 + 12 r3 + 12/5 r5 + 2/3,
        r4 = -15 r2 - 35 r3 - 7 r5  - 2,
        r6 = 9/2 r2 + 21/2 r3 + 9/5 r5 + 5/6.
    """
    r2, r3, r5 = float(r2), float(r3), float(r5)
    return InteriorFamilyPoint(
        r1=4 * r2 + 12 * r3 + 12 / 5 * r5 + 2 / 3,
        r2=r2,
        r3=r3,
        r4=-15 * r2 - 35 * r3 - 7 * r5 - 2,
        r5=r5,
        r6=9 / 2 * r2 + 21 / 2 * r3 + 9 / 5 * r5 + 5 / 6,
    )


@dataclass
class ReductionMatrix:
    """Subspace description [I_m ; R21] on one side of the basis pair.

    side == "simplex": the reduced functions are B_j + sum_i R21[i-m, j] B_i.
    side == "hermite": removed interpolation values are R21 times kept ones.
    """

    m: int
    r21: np.ndarray     # (28 - m, m)
    side: str

    def __post_init__(self):
        self.r21 = np.atleast_2d(np.asarray(self.r21, dtype=float))
        if self.r21.shape != (28 - self.m, self.m):
            raise ValueError(
                f"R21 shape {self.r21.shape} does not match m={self.m}")
        if self.side not in ("hermite", "simplex"):
            raise ValueError(f"unknown side {self.side!r}")

    def full(self) -> np.ndarray:
        return np.vstack([np.eye(self.m), self.r21])


def interior_reduction(r2, r3, r5) -> ReductionMatrix:
    """Simplex-side reduction removing the barycenter degree of freedom."""
    row = family_point(r2, r3, r5).expand()
    return ReductionMatrix(m=27, r21=row[None, :], side="simplex")


def verify_poly_reproduction(R: ReductionMatrix, duals: DualPolynomialTable,
                             extra_nodes=None) -> float:
    """Largest violation of the cubic-reproduction condition.

    For every removed index i the dual identity requires
    sum_j psi_j(y) R21[i-m, j] = psi_i(y) for all y; being an identity of
    cubics it is checked at the dual table's ten unisolvent nodes (plus any
    extra ones supplied).
    """
    if R.side != "simplex":
        raise ValueError("polynomial reproduction is a simplex-side condition")
    nodes = list(duals.nodes)
    if extra_nodes is not None:
        nodes.extend(np.atleast_2d(np.asarray(extra_nodes, dtype=float)))
    worst = 0.0
    for y in nodes:
        psi = duals.evaluate(y)
        resid = R.r21 @ psi[:R.m] - psi[R.m:]
        worst = max(worst, float(np.abs(resid).max()))
    return worst


def convert_bases(C: CollocationMatrix, m: int, known: ReductionMatrix) -> ReductionMatrix:
    """Solve the subspace-equality condition R_H21 C11 = C22 R_B21 + C21 for
    whichever side is not given.  Valid only at the block splits of C."""
    if m not in C.block_splits:
        raise ValueError(f"m={m} is not a valid block split {C.block_splits}")
    if known.m != m:
        raise ValueError(f"matrix has m={known.m}, expected {m}")
    C11, C21, C22 = C.blocks(m)
    if known.side == "simplex":
        rhs = C22 @ known.r21 + C21
        r_h = np.linalg.solve(C11.T, rhs.T).T
        return ReductionMatrix(m=m, r21=r_h, side="hermite")
    rhs = known.r21 @ C11 - C21
    r_b = np.linalg.solve(C22, rhs)
    return ReductionMatrix(m=m, r21=r_b, side="simplex")


# -- edge peeling -------------------------------------------------------------

# 0-based positions of the functionals in the length-28 ordering
def _ix_value(v): return v
def _ix_dx(v): return 3 + 2 * v
def _ix_dy(v): return 4 + 2 * v
def _ix_dxx(v): return 9 + 2 * v
def _ix_dyy(v): return 10 + 2 * v
def _ix_dxy(v): return 15 + v


# edge k joins corners (k+1)%3 and (k+2)%3; its first-normal functional and
# the two second-normal functionals (near each endpoint) sit at:
_EDGE_NORMAL_IX = {2: 18, 0: 19, 1: 20}
_EDGE_NORMAL2_IX = {(2, 0): 21, (1, 0): 22, (0, 1): 23,
                    (2, 1): 24, (1, 2): 25, (0, 2): 26}


def _edge_frame(corners, k):
    a, b = (k + 1) % 3, (k + 2) % 3
    pa, pb = corners[a], corners[b]
    length = float(np.linalg.norm(pb - pa))
    t = (pb - pa) / length
    n = np.array([-t[1], t[0]])
    if n @ (corners[k] - (pa + pb) / 2) > 0:
        n = -n
    return a, b, t, n, length


def _second_normal_row(corners, k, near, far, weight_near, weight_far):
    """Row over the 18 vertex functionals expressing a second normal
    derivative at an edge third-point by linear interpolation of the endpoint
    values D^2_n at near/far corners."""
    _, _, _, n, _ = _edge_frame(corners, k)
    row = np.zeros(18)
    for v, w in ((near, weight_near), (far, weight_far)):
        row[_ix_dxx(v)] += w * n[0] * n[0]
        row[_ix_dyy(v)] += w * n[1] * n[1]
        row[_ix_dxy(v)] += w * 2 * n[0] * n[1]
    return row


def peel_edge_second_derivatives(basis_or_corners) -> dict[int, np.ndarray]:
    """Rows over the kept vertex functionals for the removed second-normal
    conditions (0-based indices 21..26).

    Along an edge the second normal derivative of a cubic is linear, so the
    value at the third-point nearer an endpoint is 2/3 its value there plus
    1/3 the value at the other endpoint.
    """
    corners = np.asarray(getattr(basis_or_corners, "corners", basis_or_corners),
                         dtype=float)
    third, two_thirds = 1.0 / 3.0, 2.0 / 3.0
    rows = {}
    for (k, near), ix in _EDGE_NORMAL2_IX.items():
        a, b = (k + 1) % 3, (k + 2) % 3
        far = b if near == a else a
        rows[ix] = _second_normal_row(corners, k, near, far, two_thirds, third)
    return rows


@lru_cache(maxsize=None)
def _midpoint_rule(strategy: str):
    """Universal coefficients (alpha_a, alpha_b, beta_a, beta_b) of the edge
    midpoint rule  g(1/2) ~ alpha_a g(0) + alpha_b g(1) + beta_a g'(0) +
    beta_b g'(1)  on the unit interval, derived exactly per strategy."""
    F = Fraction
    if strategy == "quad-average":
        # average of the two quadratics interpolating both values and one
        # endpoint derivative each
        def quad_mid(use_left_derivative: bool):
            # q(u) = c0 + c1 u + c2 u^2 matching q(0)=g0, q(1)=g1 and the
            # chosen endpoint derivative; return coefficients of g0,g1,d0,d1
            # in q(1/2)
            if use_left_derivative:
                # c0=g0, c1=d0, c2=g1-g0-d0
                return (F(3, 4), F(1, 4), F(1, 4), F(0))
            # c0=g0, c2=g0-g1+d1, c1=g1-g0-c2
            return (F(1, 4), F(3, 4), F(0), F(-1, 4))

        left = quad_mid(True)
        right = quad_mid(False)
        coeffs = tuple((l + r) / 2 for l, r in zip(left, right))
    elif strategy == "pw-quad-average":
        # average over the two C^1 piecewise quadratics with a single break
        # at 1/3 resp. 2/3 interpolating all four data
        def pw_quad_mid(brk: Fraction):
            rows = []
            rhs_cols = []  # coefficients of (g0, g1, d0, d1) per equation
            # unknowns: left piece a0+a1 u+a2 u^2, right piece b0+b1 u+b2 u^2
            def eq(row, rhs):
                rows.append(row)
                rhs_cols.append(rhs)
            eq([1, 0, 0, 0, 0, 0], [1, 0, 0, 0])                      # left(0)=g0
            eq([0, 1, 0, 0, 0, 0], [0, 0, 1, 0])                      # left'(0)=d0
            eq([0, 0, 0, 1, 1, 1], [0, 1, 0, 0])                      # right(1)=g1
            eq([0, 0, 0, 0, 1, 2], [0, 0, 0, 1])                      # right'(1)=d1
            eq([1, brk, brk * brk, -1, -brk, -brk * brk], [0, 0, 0, 0])   # C0
            eq([0, 1, 2 * brk, 0, -1, -2 * brk], [0, 0, 0, 0])            # C1
            sol = _solve_fractions(rows, rhs_cols)
            # evaluate the piece containing u = 1/2
            u = F(1, 2)
            piece = 0 if u <= brk else 3
            return tuple(sol[piece][c] + sol[piece + 1][c] * u
                         + sol[piece + 2][c] * u * u for c in range(4))

        left = pw_quad_mid(F(1, 3))
        right = pw_quad_mid(F(2, 3))
        coeffs = tuple((l + r) / 2 for l, r in zip(left, right))
    else:
        raise ValueError(f"unknown edge strategy {strategy!r}; "
                         f"expected one of {EDGE_STRATEGIES}")
    return coeffs


def _solve_fractions(rows, rhs):
    """Gaussian elimination over Fractions; rhs columns solved simultaneously.
    Returns a list of rows of the solution (n x k)."""
    F = Fraction
    n = len(rows)
    A = [[F(x) for x in row] + [F(x) for x in r] for row, r in zip(rows, rhs)]
    k = len(rhs[0])
    for col in range(n):
        piv = next(r for r in range(col, n) if A[r][col] != 0)
        A[col], A[piv] = A[piv], A[col]
        pv = A[col][col]
        A[col] = [x / pv for x in A[col]]
        for r in range(n):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
    return [row[n:n + k] for row in A]


def peel_edge_first_derivatives(basis_or_corners, strategy: str = DEFAULT_EDGE_STRATEGY
                                ) -> dict[int, np.ndarray]:
    """Rows over the kept vertex functionals for the removed first-normal
    conditions (0-based indices 18..20), per the chosen midpoint rule."""
    corners = np.asarray(getattr(basis_or_corners, "corners", basis_or_corners),
                         dtype=float)
    alpha_a, alpha_b, beta_a, beta_b = (float(c) for c in _midpoint_rule(strategy))
    rows = {}
    for k in range(3):
        a, b, t, n, length = _edge_frame(corners, k)
        row = np.zeros(18)
        for v, alpha in ((a, alpha_a), (b, alpha_b)):
            row[_ix_dx(v)] += alpha * n[0]
            row[_ix_dy(v)] += alpha * n[1]
        # d/du D_n s along the edge = t . H . n, scaled by the edge length
        # because the rule is stated on the unit interval
        for v, beta in ((a, beta_a * length), (b, beta_b * length)):
            row[_ix_dxx(v)] += beta * t[0] * n[0]
            row[_ix_dyy(v)] += beta * t[1] * n[1]
            row[_ix_dxy(v)] += beta * (t[0] * n[1] + t[1] * n[0])
        rows[_EDGE_NORMAL_IX[k]] = row
    return rows


# -- assembled reduced spaces --------------------------------------------------

@dataclass
class ReducedSpace:
    """All reduction data of one triangle for a given m."""

    m: int
    hermite: ReductionMatrix
    simplex: ReductionMatrix
    interior: InteriorFamilyPoint
    edge_strategy: str


def reduce_space(basis: BasisSet, C: CollocationMatrix, m: int,
                 interior=DEFAULT_INTERIOR_PRESET,
                 edge_strategy: str = DEFAULT_EDGE_STRATEGY) -> ReducedSpace:
    """Build the m-dimensional reduced space of one triangle.

    ``interior`` is a preset name or an (r2, r3, r5) triple.  The barycenter
    value is removed first on the simplex side; for m < 27 the edge
    conditions are then expressed through vertex data and the accumulated
    relations composed into the interpolation-side matrix, which converts
    back to the simplex side.
    """
    if m not in (18, 21, 27):
        raise ValueError(f"m must be one of 18, 21, 27; got {m}")
    if isinstance(interior, str):
        try:
            params = INTERIOR_PRESETS[interior]
        except KeyError:
            raise ValueError(f"unknown interior preset {interior!r}") from None
    else:
        params = tuple(interior)
    point = family_point(*params)

    r_b27 = interior_reduction(*params)
    r_h27 = convert_bases(C, 27, r_b27)
    if m == 27:
        return ReducedSpace(27, r_h27, r_b27, point, edge_strategy)

    second = peel_edge_second_derivatives(basis)
    rows = {ix: np.concatenate([row, np.zeros(3)]) for ix, row in second.items()}
    if m == 18:
        first = peel_edge_first_derivatives(basis, edge_strategy)
    else:
        first = {}

    t27 = r_h27.r21[0]          # barycenter value over the leading 27
    kept = m
    n_removed = 28 - m
    r21 = np.zeros((n_removed, kept))
    for ix in range(m, 27):
        row21 = rows[ix] if ix >= 21 else np.concatenate([first[ix], np.zeros(3)])
        r21[ix - m] = row21[:kept]
    # barycenter row: substitute the peeled relations into the removed slots
    bary = t27[:kept].copy()
    for ix in range(m, 27):
        bary += t27[ix] * r21[ix - m]
    r21[-1] = bary

    r_h = ReductionMatrix(m=m, r21=r21, side="hermite")
    r_b = convert_bases(C, m, r_h)
    return ReducedSpace(m, r_h, r_b, point, edge_strategy)
