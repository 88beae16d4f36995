"""Shadow moments nu_jk = E[z^j conj(z)^k] from the power series of 1/xi_A.

All moments are read off the expansion

    nu_jk(A) = j! k! / (N)_{j+k} * [s^j t^k] xi_A(s, t)^(-1),

so no eigenvalue of a non-normal matrix is ever computed.  The same
polynomial gives the shadow-equality and rotation-invariance predicates.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError
from .matrix import _row_sum_norm, as_matrix, xi_poly, xi_shifted

__all__ = [
    "MAX_ORDER",
    "rising",
    "moment_weight",
    "series_inverse",
    "MomentTable",
    "moment_table",
    "moment",
    "central_moment",
    "central_moment_table",
    "EqualityReport",
    "shadows_equal",
    "trace_criterion_equal",
    "rotation_invariant",
]

MAX_ORDER = 60


def rising(x, n):
    """Pochhammer symbol (x)_n = x (x+1) ... (x+n-1) as an exact integer or Fraction."""
    out = 1
    for i in range(n):
        out *= x + i
    return out


def moment_weight(j, k, n):
    """j! k! / (N)_{j+k}, evaluated exactly and rounded once to float."""
    return float(Fraction(math.factorial(j) * math.factorial(k), rising(n, j + k)))


def series_inverse(xi, max_order):
    """Taylor coefficients of 1/xi(s, t) about the origin.

    Returns an (M+1) x (M+1) complex array ``c`` with ``c[j, k]`` the
    coefficient of s^j t^k for j + k <= M and zeros elsewhere.
    """
    M = int(max_order)
    if M < 0:
        raise InvalidInputError("max_order must be non-negative")
    x = xi.coeffs
    if abs(x[0, 0] - 1) > 1e-12:
        raise InvalidInputError("series_inverse needs xi(0, 0) == 1")
    d = x.shape[0] - 1
    c = np.zeros((M + 1, M + 1), dtype=np.complex128)
    c[0, 0] = 1.0
    for order in range(1, M + 1):
        for j in range(order + 1):
            k = order - j
            ja = min(j, d)
            kb = min(k, d)
            # c[j, k] is still zero, so the (0, 0) term drops out of the sum
            xs = x[:ja + 1, :kb + 1]
            cs = c[j - ja:j + 1, k - kb:k + 1][::-1, ::-1]
            c[j, k] = -np.sum(xs * cs)
    return c


@dataclass(frozen=True)
class MomentTable:
    """Moments nu_jk for j + k <= max_order.

    ``values[j, k]`` holds nu_jk; entries with j + k > max_order are zero.
    Index the table directly with ``table[j, k]``.
    """

    max_order: int
    n: int
    values: np.ndarray

    def __post_init__(self):
        v = np.array(self.values, dtype=np.complex128)
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    def __getitem__(self, jk):
        j, k = jk
        if j < 0 or k < 0 or j + k > self.max_order:
            raise KeyError(jk)
        return complex(self.values[j, k])

    def items(self):
        for order in range(self.max_order + 1):
            for j in range(order, -1, -1):
                yield (j, order - j), complex(self.values[j, order - j])


def _table_from_xi(xi, max_order):
    if max_order > MAX_ORDER:
        raise InvalidInputError(f"moment order above {MAX_ORDER} is not supported")
    c = series_inverse(xi, max_order)
    n = xi.n
    vals = np.zeros_like(c)
    for j in range(max_order + 1):
        for k in range(max_order + 1 - j):
            vals[j, k] = moment_weight(j, k, n) * c[j, k]
    vals = 0.5 * (vals + vals.conj().T)
    vals[0, 0] = 1.0
    return MomentTable(max_order, n, vals)


def moment_table(A, max_order):
    """All moments nu_jk(A) with j + k <= max_order."""
    return _table_from_xi(xi_poly(A), int(max_order))


def moment(A, j, k):
    """Single moment nu_jk(A) = E[z^j conj(z)^k] under the shadow of A."""
    if j < 0 or k < 0:
        raise InvalidInputError("moment indices must be non-negative")
    return moment_table(A, j + k)[j, k]


def central_moment_table(A, max_order):
    """Moments of the shadow recentred at its mean tr(A)/N."""
    A = as_matrix(A)
    m = np.trace(A) / A.shape[0]
    return _table_from_xi(xi_shifted(xi_poly(A), m), int(max_order))


def central_moment(A, j, k):
    if j < 0 or k < 0:
        raise InvalidInputError("moment indices must be non-negative")
    return central_moment_table(A, j + k)[j, k]


@dataclass(frozen=True)
class EqualityReport:
    """Outcome of a shadow comparison; truthy when the shadows agree.

    Attributes
    ----------
    equal : bool
    witness : tuple or None
        Exponents (j, k) of s^j t^k of the first coefficient that differs,
        scanning by total degree and then by decreasing j.
    max_difference : float
        Largest coefficient difference after common scaling.
    """

    equal: bool
    witness: tuple = None
    max_difference: float = 0.0

    def __bool__(self):
        return self.equal


def _common_scale(A, B):
    r = max(_row_sum_norm(A), _row_sum_norm(B))
    return 1.0 / r if r > 0 else 1.0


def _pair(A, B):
    A = as_matrix(A)
    B = as_matrix(B)
    if A.shape != B.shape:
        raise InvalidInputError(f"dimension mismatch: {A.shape[0]} vs {B.shape[0]}")
    return A, B


def _first_difference(diff, tol):
    """First (j, k) with diff[j, k] > tol, by total degree then decreasing j."""
    rows, cols = diff.shape
    for order in range(rows + cols - 1):
        for j in range(min(order, rows - 1), -1, -1):
            k = order - j
            if k < cols and diff[j, k] > tol:
                return (j, k)
    return None


def shadows_equal(A, B, tol=1e-9):
    """Decide P_A == P_B by comparing xi_A and xi_B coefficientwise.

    Both matrices are scaled by the same factor (inverse of the larger
    row-sum norm) before comparison, so the tolerance is scale aware.
    """
    A, B = _pair(A, B)
    c = _common_scale(A, B)
    diff = np.abs(xi_poly(c * A).coeffs - xi_poly(c * B).coeffs)
    mx = float(diff.max())
    if mx <= tol:
        return EqualityReport(True, None, mx)
    return EqualityReport(False, _first_difference(diff, tol), mx)


def trace_criterion_equal(A, B, tol=1e-9):
    """Decide P_A == P_B by comparing tr (sA + tA*)^k for k = 1..N.

    Each trace is a homogeneous polynomial of degree k; with t = 1 its
    coefficients in s are recovered from k+1 samples on the unit circle.
    The witness is reported as the exponent pair (j, k-j) of s^j t^(k-j).
    """
    A, B = _pair(A, B)
    c = _common_scale(A, B)
    A = c * A
    B = c * B
    n = A.shape[0]
    diff = np.zeros((n + 1, n + 1))
    for k in range(1, n + 1):
        w = np.exp(2j * np.pi * np.arange(k + 1) / (k + 1))
        ta = np.empty(k + 1, dtype=np.complex128)
        tb = np.empty(k + 1, dtype=np.complex128)
        for i, s in enumerate(w):
            ta[i] = np.trace(np.linalg.matrix_power(s * A + A.conj().T, k))
            tb[i] = np.trace(np.linalg.matrix_power(s * B + B.conj().T, k))
        d = np.abs(np.fft.fft(ta - tb)) / (k + 1)
        for j in range(k + 1):
            diff[j, k - j] = d[j]
    mx = float(diff.max())
    if mx <= tol:
        return EqualityReport(True, None, mx)
    return EqualityReport(False, _first_difference(diff, tol), mx)


def rotation_invariant(A, tol=1e-9):
    """True when P_A is invariant under rotations about the origin.

    This holds exactly when xi_A depends on s and t only through st, i.e.
    every coefficient with j != k vanishes (checked after scaling A to unit
    row-sum norm).
    """
    A = as_matrix(A)
    r = _row_sum_norm(A)
    if r == 0:
        return True
    c = xi_poly(A / r).coeffs
    off = c - np.diag(np.diag(c))
    return bool(np.abs(off).max() <= tol)
