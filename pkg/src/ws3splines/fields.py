"""Scalar fields with exact derivatives, for interpolation targets and tests.

Every field implements ``eval(x, order) -> (value, gradient, hessian)``; the
gradient/hessian entries are always filled (callers ignore what they do not
need).
"""
from __future__ import annotations

import numpy as np

__all__ = [
    "PolynomialField",
    "GaussianBumpsField",
    "TrigField",
    "LocalSplineField",
    "franke_field",
    "field_from_spec",
    "CUBIC_MONOMIAL_POWERS",
]

# graded monomial order used for "poly:" coefficient lists
CUBIC_MONOMIAL_POWERS = ((0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2),
                         (3, 0), (2, 1), (1, 2), (0, 3))


class PolynomialField:
    """Bivariate polynomial sum c_ij x^i y^j given as {(i, j): c}."""

    def __init__(self, coefficients: dict):
        self.coefficients = {(int(i), int(j)): float(c)
                             for (i, j), c in coefficients.items() if c != 0}

    @classmethod
    def cubic(cls, coeffs) -> "PolynomialField":
        """From 10 coefficients in the graded order of CUBIC_MONOMIAL_POWERS."""
        coeffs = list(coeffs)
        if len(coeffs) != 10:
            raise ValueError(f"need 10 cubic coefficients, got {len(coeffs)}")
        return cls(dict(zip(CUBIC_MONOMIAL_POWERS, coeffs)))

    @classmethod
    def random_cubic(cls, rng) -> "PolynomialField":
        return cls.cubic(rng.uniform(-1.0, 1.0, 10))

    def eval(self, x, order: int = 2):
        X, Y = float(x[0]), float(x[1])

        def term(i, j, c):
            return c * X ** i * Y ** j if i >= 0 and j >= 0 else 0.0

        v = g0 = g1 = h00 = h01 = h11 = 0.0
        for (i, j), c in self.coefficients.items():
            v += term(i, j, c)
            g0 += term(i - 1, j, c * i)
            g1 += term(i, j - 1, c * j)
            h00 += term(i - 2, j, c * i * (i - 1))
            h01 += term(i - 1, j - 1, c * i * j)
            h11 += term(i, j - 2, c * j * (j - 1))
        return v, np.array([g0, g1]), np.array([[h00, h01], [h01, h11]])


class GaussianBumpsField:
    """Sum of a * exp(q(x)) terms with quadratic exponents q."""

    def __init__(self, terms):
        # each term: (amplitude, qxx, qxy, qyy, qx, qy, q0) for
        # q = qxx x^2 + qxy x y + qyy y^2 + qx x + qy y + q0
        self.terms = [tuple(float(v) for v in t) for t in terms]

    def eval(self, x, order: int = 2):
        X, Y = float(x[0]), float(x[1])
        v = 0.0
        g = np.zeros(2)
        h = np.zeros((2, 2))
        for (a, qxx, qxy, qyy, qx, qy, q0) in self.terms:
            e = a * np.exp(qxx * X * X + qxy * X * Y + qyy * Y * Y + qx * X + qy * Y + q0)
            dq = np.array([2 * qxx * X + qxy * Y + qx, 2 * qyy * Y + qxy * X + qy])
            hq = np.array([[2 * qxx, qxy], [qxy, 2 * qyy]])
            v += e
            g += e * dq
            h += e * (np.outer(dq, dq) + hq)
        return v, g, h


def franke_field() -> GaussianBumpsField:
    """The classical four-bump test surface on the unit square."""
    terms = []
    # 0.75 exp(-((9x-2)^2 + (9y-2)^2)/4)
    terms.append((0.75, -81 / 4, 0, -81 / 4, 9, 9, -2))
    # 0.75 exp(-(9x+1)^2/49 - (9y+1)/10)
    terms.append((0.75, -81 / 49, 0, 0, -18 / 49, -9 / 10, -1 / 49 - 1 / 10))
    # 0.5 exp(-((9x-7)^2 + (9y-3)^2)/4)
    terms.append((0.5, -81 / 4, 0, -81 / 4, 63 / 2, 27 / 2, -49 / 4 - 9 / 4))
    # -0.2 exp(-(9x-4)^2 - (9y-7)^2)
    terms.append((-0.2, -81, 0, -81, 72, 126, -16 - 49))
    return GaussianBumpsField(terms)


class TrigField:
    """f(x, y) = sin(a x) cos(b y)."""

    def __init__(self, a: float = 1.0, b: float = 1.0):
        self.a, self.b = float(a), float(b)

    def eval(self, x, order: int = 2):
        a, b = self.a, self.b
        X, Y = float(x[0]), float(x[1])
        s, c = np.sin(a * X), np.cos(a * X)
        sy, cy = np.sin(b * Y), np.cos(b * Y)
        v = s * cy
        g = np.array([a * c * cy, -b * s * sy])
        h = np.array([[-a * a * s * cy, -a * b * c * sy],
                      [-a * b * c * sy, -b * b * s * cy]])
        return v, g, h


class LocalSplineField:
    """A spline on one split triangle, as a field: sum_j coeffs[j] B_j."""

    def __init__(self, basis, coefficients):
        self.basis = basis
        self.coefficients = np.asarray(coefficients, dtype=float)

    def eval(self, x, order: int = 2):
        val, grad, hess = self.basis.eval_all(np.asarray(x, dtype=float), order=2)
        c = self.coefficients
        return float(val @ c), grad.T @ c, np.tensordot(c, hess, axes=(0, 0))


def field_from_spec(spec: str):
    """Parse a field given as ``poly:c00,c10,...``, ``franke`` or ``sincos``."""
    if spec == "franke":
        return franke_field()
    if spec == "sincos":
        return TrigField(1.0, 1.0)
    if spec.startswith("poly:"):
        parts = spec[len("poly:"):].split(",")
        try:
            coeffs = [float(p) for p in parts]
        except ValueError as exc:
            raise ValueError(f"bad polynomial coefficient in {spec!r}") from exc
        if len(coeffs) > 10:
            raise ValueError("at most 10 cubic coefficients are supported")
        coeffs += [0.0] * (10 - len(coeffs))
        return PolynomialField.cubic(coeffs)
    raise ValueError(f"unknown field spec {spec!r}; "
                     "use poly:c00,c10,c01,... , franke or sincos")
