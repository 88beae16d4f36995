"""Complex Zernike expansions of shadow densities.

For a density p on the unit disc with coefficients

    p^_mn = int p(z) conj(Z_mn(z)) dm2(z),

the truncated sum (1/pi) sum_{m+n<=M} (m+n+1) p^_mn Z_mn converges to p.
The coefficients of a shadow density are finite combinations of moments,
so they come straight out of the series expansion of 1/xi.  Matrices are
first mapped to B = c1 A + c0 I with trace zero and numerical radius 0.95.
"""

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError
from .matrix import as_matrix, xi_poly
from .moments import MAX_ORDER, rising, series_inverse
from .sampler import Grid2D

__all__ = [
    "DEFAULT_ORDER",
    "zernike_weight",
    "zernike_poly",
    "zernike_q",
    "ZernikeExpansion",
    "zernike_coeffs",
    "zernike_eval",
    "zernike_density",
]

DEFAULT_ORDER = 14
TARGET_RADIUS = 0.95


def zernike_weight(m, n, j):
    """(m+n-j)! / ((m-j)! (n-j)! j!) as an exact integer."""
    return math.factorial(m + n - j) // (
        math.factorial(m - j) * math.factorial(n - j) * math.factorial(j))


def zernike_q(m, n, u):
    """Radial factor Q_mn(u) = sum_j weight_j (-1)^j u^(min(m,n)-j)."""
    k = min(m, n)
    u = np.asarray(u, dtype=float)
    out = np.zeros(u.shape)
    for j in range(k + 1):
        out = out + (-1) ** j * zernike_weight(m, n, j) * u ** (k - j)
    return out


def zernike_poly(m, n, z):
    """Complex Zernike polynomial Z_mn(z, conj(z)).

    Z_mn = z^(m-n) Q_mn(|z|^2) for m >= n and conj(z)^(n-m) Q_mn(|z|^2)
    for m < n.
    """
    if m < 0 or n < 0:
        raise InvalidInputError("Zernike indices must be non-negative")
    z = np.asarray(z, dtype=complex)
    q = zernike_q(m, n, (z * np.conj(z)).real)
    ang = z ** (m - n) if m >= n else np.conj(z) ** (n - m)
    out = ang * q
    return out if out.ndim else complex(out)


@dataclass(frozen=True)
class ZernikeExpansion:
    """Coefficients p^_mn, m + n <= M, of the shadow of B = c1 A + c0 I.

    Attributes
    ----------
    max_order : int
    n : int
        Matrix dimension.
    coeffs : ndarray, shape (M+1, M+1)
        ``coeffs[m, n]``; zero where m + n > M.
    c1 : float
    c0 : complex
    """

    max_order: int
    n: int
    coeffs: np.ndarray
    c1: float = 1.0
    c0: complex = 0.0

    def __getitem__(self, mn):
        m, n = mn
        if m < 0 or n < 0 or m + n > self.max_order:
            raise KeyError(mn)
        return complex(self.coeffs[m, n])

    def items(self):
        for order in range(self.max_order + 1):
            for m in range(order, -1, -1):
                yield (m, order - m), complex(self.coeffs[m, order - m])

    def partial_sum(self, w):
        """Degree-M sum (1/pi) sum (m+n+1) p^_mn Z_mn(w) in the rescaled plane."""
        w = np.asarray(w, dtype=complex)
        total = np.zeros(w.shape, dtype=complex)
        for (m, n), c in self.items():
            if c != 0:
                total = total + (m + n + 1) * c * zernike_poly(m, n, w)
        out = total.real / np.pi
        return out if out.ndim else float(out)

    def partial_sum_real(self, x, y):
        """The same partial sum written with Q_mn and Re/Im of (x + iy)^j."""
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        u = x * x + y * y
        M = self.max_order
        total = np.zeros(np.broadcast(x, y).shape)
        for j in range(M // 2 + 1):
            total = total + (2 * j + 1) * self.coeffs[j, j].real * zernike_q(j, j, u)
        zp = np.ones_like(total, dtype=complex)
        for j in range(1, M + 1):
            zp = zp * (x + 1j * y)
            re = np.zeros_like(total)
            im = np.zeros_like(total)
            for n in range((M - j) // 2 + 1):
                q = zernike_q(n + j, n, u)
                c = self.coeffs[n + j, n]
                re = re + (2 * n + j + 1) * c.real * q
                im = im + (2 * n + j + 1) * c.imag * q
            total = total + 2 * zp.real * re - 2 * zp.imag * im
        return total / np.pi

    def density(self, z):
        """Partial sum mapped back to the original plane, zero off the disc."""
        z = np.asarray(z, dtype=complex)
        w = self.c1 * z + self.c0
        out = np.where(np.abs(w) <= 1, self.c1 ** 2 * self.partial_sum(w), 0.0)
        return out if out.ndim else float(out)

    @property
    def disc(self):
        """Centre and radius of the preimage of the unit disc."""
        return -self.c0 / self.c1, 1.0 / self.c1


def _weights(N, M):
    """Exact (m+n-j)! / (j! (N)_{m+n-2j}) for m >= n, j <= n, m+n <= M."""
    out = {}
    for m in range(M + 1):
        for n in range(min(m, M - m) + 1):
            out[m, n] = [float(Fraction(math.factorial(m + n - j),
                                        math.factorial(j) * rising(N, m + n - 2 * j)))
                         * (-1) ** j for j in range(n + 1)]
    return out


def zernike_coeffs(A, M=DEFAULT_ORDER, rescale=True):
    """Zernike coefficients of the shadow density of A up to total order M.

    Parameters
    ----------
    A : (N, N) array_like
    M : int
    rescale : bool
        Map A to c1 (A - tr(A)/N) with numerical radius 0.95 first.
        Without rescaling W(A) must lie in the closed unit disc.

    Returns
    -------
    ZernikeExpansion
    """
    from .geometry import numerical_radius

    A = as_matrix(A)
    M = int(M)
    if M < 0 or M > MAX_ORDER:
        raise InvalidInputError(f"order must lie in 0..{MAX_ORDER}")
    N = A.shape[0]
    if rescale:
        mean = np.trace(A) / N
        r = numerical_radius(A - mean * np.eye(N))
        c1 = TARGET_RADIUS / r if r > 0 else 1.0
        c0 = -c1 * mean
    else:
        if numerical_radius(A) > 1 + 1e-9:
            raise InvalidInputError("numerical range leaves the unit disc; use rescale=True")
        c1, c0 = 1.0, 0.0
    B = c1 * A + c0 * np.eye(N)
    c = series_inverse(xi_poly(B), M)
    coeffs = np.zeros((M + 1, M + 1), dtype=complex)
    for (m, n), w in _weights(N, M).items():
        val = sum(w[j] * c[n - j, m - j] for j in range(n + 1))
        coeffs[m, n] = val
        coeffs[n, m] = np.conj(val)
    coeffs[0, 0] = 1.0
    return ZernikeExpansion(M, N, coeffs, float(c1), complex(c0))


def zernike_eval(expansion, box=None, nx=101, ny=101, form="complex"):
    """Raster of the partial sum in the original coordinates.

    Parameters
    ----------
    expansion : ZernikeExpansion
    box : (xmin, xmax, ymin, ymax), optional
        Defaults to the square around the preimage of the unit disc.
    form : {"complex", "real"}
        Summation route; both give the same values.

    Returns
    -------
    Grid2D
        Signed values (``normalization="partial_sum"``); cells whose
        centres map outside the unit disc are zero.
    """
    if box is None:
        c, r = expansion.disc
        box = (c.real - r, c.real + r, c.imag - r, c.imag + r)
    x0, x1, y0, y1 = (float(b) for b in box)
    if not (x1 > x0 and y1 > y0):
        raise InvalidInputError("box has zero area")
    dx, dy = (x1 - x0) / nx, (y1 - y0) / ny
    g = Grid2D(complex(x0, y0), dx, dy, np.zeros((nx, ny)), "partial_sum")
    z = g.centers()
    w = expansion.c1 * z + expansion.c0
    if form == "complex":
        v = expansion.partial_sum(w)
    elif form == "real":
        v = expansion.partial_sum_real(w.real, w.imag)
    else:
        raise InvalidInputError(f"unknown form {form!r}")
    v = np.where(np.abs(w) <= 1, expansion.c1 ** 2 * v, 0.0)
    return Grid2D(g.origin, dx, dy, v, "partial_sum")


def zernike_density(A, z, M=DEFAULT_ORDER):
    """Pointwise degree-M approximation of the shadow density of A."""
    return zernike_coeffs(A, M).density(z)
