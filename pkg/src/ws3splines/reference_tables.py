"""Closed-form reference data for the right triangle family (0,0),(h,0),(0,h).

``reference_collocation_matrix`` returns the tabulated values of applying the
28 interpolation functionals to the 28 basis functions on that triangle.  The
entries are rational multiples of a power of h (a few carry a 1/sqrt(2) from
the unit normal of the hypotenuse).

One caveat, found mechanically and kept on record rather than patched away:
the tabulated row 27 is internally inconsistent with the rest of the table.
The swap of the two legs of the right triangle is an isometry that permutes
basis functions and functionals; it maps row 24 onto row 27 entry by entry,
and every other row pair it relates (19<->21, 22<->23, 25<->26, ...) agrees
exactly.  Row 27 as tabulated is exactly twice its forced value.  Computed
matrices therefore match row 27 only after multiplying the tabulated entries
by REFERENCE_ROW_SCALE[27] = 1/2; comparison code reports this discrepancy
explicitly instead of silently adopting either side.

``SPARSITY_COLUMNS`` lists, per functional, which basis functions may be
nonzero on a triangle of generic shape; all other entries vanish identically.
"""
from __future__ import annotations

import math
from fractions import Fraction as F

import numpy as np

__all__ = [
    "REFERENCE_ENTRIES",
    "REFERENCE_ROW_SCALE",
    "SPARSITY_COLUMNS",
    "BLOCK_SPLITS",
    "reference_collocation_matrix",
    "sparsity_mask",
]

# Valid block splits: for m in this set, rows 1..m of the collocation matrix
# are identically zero in columns m+1..28.
BLOCK_SPLITS = (3, 9, 18, 21, 27)

# Entry format: row -> list of (column, coefficient, h_power, over_sqrt2).
# Rows/columns are 1-based here to stay close to the tabulated layout.
REFERENCE_ENTRIES = {
    1: [(1, F(1), 0, False)],
    2: [(2, F(1), 0, False)],
    3: [(3, F(1), 0, False)],
    4: [(1, F(-9), -1, False), (4, F(9), -1, False)],
    5: [(1, F(-9), -1, False), (5, F(9), -1, False)],
    6: [(2, F(9), -1, False), (7, F(-9), -1, False)],
    7: [(6, F(9), -1, False), (7, F(-9), -1, False)],
    8: [(8, F(-9), -1, False), (9, F(9), -1, False)],
    9: [(3, F(9), -1, False), (8, F(-9), -1, False)],
    10: [(1, F(54), -2, False), (4, F(-81), -2, False), (10, F(27), -2, False)],
    11: [(1, F(54), -2, False), (5, F(-81), -2, False), (11, F(27), -2, False)],
    12: [(2, F(54), -2, False), (7, F(-81), -2, False), (13, F(27), -2, False)],
    13: [(6, F(27), -2, False), (7, F(27), -2, False), (12, F(27), -2, False),
         (13, F(27), -2, False), (17, F(-108), -2, False)],
    14: [(8, F(27), -2, False), (9, F(27), -2, False), (14, F(27), -2, False),
         (15, F(27), -2, False), (18, F(-108), -2, False)],
    15: [(3, F(54), -2, False), (8, F(-81), -2, False), (14, F(27), -2, False)],
    16: [(1, F(54), -2, False), (4, F(-54), -2, False), (5, F(-54), -2, False),
         (16, F(54), -2, False)],
    17: [(6, F(54), -2, False), (7, F(-27), -2, False), (13, F(27), -2, False),
         (17, F(-54), -2, False)],
    18: [(8, F(-27), -2, False), (9, F(54), -2, False), (14, F(27), -2, False),
         (18, F(-54), -2, False)],
    19: [(4, F(9, 8), -1, False), (7, F(9, 16), -1, False), (10, F(27, 4), -1, False),
         (13, F(81, 16), -1, False), (16, F(-9, 8), -1, False),
         (17, F(-9, 8), -1, False), (19, F(-45, 4), -1, False)],
    20: [(6, F(27, 16), -1, True), (9, F(27, 16), -1, True), (12, F(189, 16), -1, True),
         (15, F(189, 16), -1, True), (17, F(-9, 4), -1, True),
         (18, F(-9, 4), -1, True), (20, F(-45, 2), -1, True)],
    21: [(5, F(9, 8), -1, False), (8, F(9, 16), -1, False), (11, F(27, 4), -1, False),
         (14, F(81, 16), -1, False), (16, F(-9, 8), -1, False),
         (18, F(-9, 8), -1, False), (21, F(-45, 4), -1, False)],
    22: [(4, F(54), -2, False), (13, F(36), -2, False), (16, F(-81), -2, False),
         (19, F(-90), -2, False), (22, F(54), -2, False), (23, F(27), -2, False)],
    23: [(5, F(54), -2, False), (14, F(36), -2, False), (16, F(-81), -2, False),
         (21, F(-90), -2, False), (22, F(27), -2, False), (23, F(54), -2, False)],
    24: [(6, F(243, 4), -2, False), (12, F(171, 4), -2, False),
         (15, F(225, 2), -2, False), (17, F(-108), -2, False),
         (20, F(-270), -2, False), (24, F(108), -2, False), (25, F(54), -2, False)],
    25: [(7, F(27, 2), -2, False), (10, F(81), -2, False), (13, F(63, 2), -2, False),
         (17, F(-27), -2, False), (19, F(-180), -2, False), (24, F(27), -2, False),
         (25, F(54), -2, False)],
    26: [(8, F(27, 2), -2, False), (11, F(81), -2, False), (14, F(63, 2), -2, False),
         (18, F(-27), -2, False), (21, F(-180), -2, False), (26, F(54), -2, False),
         (27, F(27), -2, False)],
    27: [(9, F(243, 2), -2, False), (12, F(225), -2, False), (15, F(171, 2), -2, False),
         (18, F(-216), -2, False), (20, F(-540), -2, False), (26, F(108), -2, False),
         (27, F(216), -2, False)],
    28: [(22, F(1, 12), 0, False), (23, F(1, 12), 0, False), (24, F(1, 12), 0, False),
         (25, F(1, 12), 0, False), (26, F(1, 12), 0, False), (27, F(1, 12), 0, False),
         (28, F(1, 2), 0, False)],
}

# Rows whose tabulated values must be rescaled to agree with the rest of the
# table (see module docstring).
REFERENCE_ROW_SCALE = {27: F(1, 2)}

# Possibly-nonzero columns per functional on a triangle of generic shape.
SPARSITY_COLUMNS = {
    1: (1,), 2: (2,), 3: (3,),
    4: (1, 4, 5), 5: (1, 4, 5),
    6: (2, 6, 7), 7: (2, 6, 7),
    8: (3, 8, 9), 9: (3, 8, 9),
    10: (1, 4, 5, 10, 11, 16), 11: (1, 4, 5, 10, 11, 16),
    12: (2, 6, 7, 12, 13, 17), 13: (2, 6, 7, 12, 13, 17),
    14: (3, 8, 9, 14, 15, 18), 15: (3, 8, 9, 14, 15, 18),
    16: (1, 4, 5, 10, 11, 16),
    17: (2, 6, 7, 12, 13, 17),
    18: (3, 8, 9, 14, 15, 18),
    19: (4, 7, 10, 13, 16, 17, 19),
    20: (6, 9, 12, 15, 17, 18, 20),
    21: (5, 8, 11, 14, 16, 18, 21),
    22: (4, 10, 13, 16, 19, 22, 23),
    23: (5, 11, 14, 16, 21, 22, 23),
    24: (6, 12, 15, 17, 20, 24, 25),
    25: (7, 10, 13, 17, 19, 24, 25),
    26: (8, 11, 14, 18, 21, 26, 27),
    27: (9, 12, 15, 18, 20, 26, 27),
    28: (22, 23, 24, 25, 26, 27, 28),
}


def reference_collocation_matrix(h: float, *, apply_row_scale: bool = False) -> np.ndarray:
    """Tabulated 28x28 collocation matrix for the triangle (0,0),(h,0),(0,h).

    With ``apply_row_scale`` the known inconsistent rows are rescaled to the
    values forced by the triangle symmetry (what a correct computation must
    produce); without it the matrix is the verbatim tabulation.
    """
    M = np.zeros((28, 28))
    for i, entries in REFERENCE_ENTRIES.items():
        scale = float(REFERENCE_ROW_SCALE.get(i, 1)) if apply_row_scale else 1.0
        for (j, coef, hpow, over_rt2) in entries:
            v = float(coef) * float(h) ** hpow * scale
            if over_rt2:
                v /= math.sqrt(2.0)
            M[i - 1, j - 1] = v
    return M


def sparsity_mask() -> np.ndarray:
    """Boolean (28, 28) mask: True where an entry may be nonzero."""
    mask = np.zeros((28, 28), dtype=bool)
    for i, cols in SPARSITY_COLUMNS.items():
        for j in cols:
            mask[i - 1, j - 1] = True
    return mask
