"""Closed-form shadow densities.

Covers the elliptical law of 2 x 2 matrices, the radial building blocks
F_N and R_{N,k}, the radial densities of nilpotent Jordan blocks and the
radial density of any matrix whose shadow is rotation invariant.

For a rotation-invariant A let lambda_1..lambda_p be the positive
eigenvalues of Re A.  The radial density is a finite combination

    f(r) = sum_i w_i R_{N, k_i}(r^2 / s_i^2)

with R_{N,1} = F_N.  Three assembly routes are provided: distinct
eigenvalues, grouped eigenvalues through partial fractions, and a
divided-difference route evaluated in extended precision that serves as
an independent check.
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import Polynomial

from .errors import InvalidInputError
from .matrix import as_matrix, coincidence_tol, hermitian_eigenvalues, hermitian_part
from .moments import rotation_invariant
from .special import gauss_sum, hyp2f1_series, pole_expansion

__all__ = [
    "EllipseShadow",
    "ellipse_of_2x2",
    "density_2x2",
    "F_N",
    "R_Nk",
    "F_N_derivative",
    "jordan_radial_density",
    "RadialTerm",
    "RadialDensity",
    "partial_fraction_alpha",
    "rotation_invariant_density",
    "rotation_invariant_model",
    "divided_difference_density",
]

# ---------------------------------------------------------------------------
# 2 x 2 matrices


@dataclass(frozen=True)
class EllipseShadow:
    """Elliptical support of the shadow of a 2 x 2 matrix.

    Attributes
    ----------
    center : complex
    axis_angle : float
        Direction of the major axis (radians).
    a, b : float
        Semi-major and semi-minor lengths, a >= b >= 0.
    foci : tuple of complex
        The two eigenvalues.
    """

    center: complex
    axis_angle: float
    a: float
    b: float
    foci: tuple

    @property
    def degenerate(self):
        """True for normal matrices, whose shadow is uniform on a segment."""
        return self.b == 0.0


def ellipse_of_2x2(M):
    """Ellipse carrying the shadow of a 2 x 2 matrix.

    The foci are the eigenvalues.  In a triangular form [[l1, s], [0, l2]]
    the minor axis has length |s| with |s|^2 = tr(MM*) - |l1|^2 - |l2|^2,
    so b = |s| / 2 and a = sqrt(b^2 + |l1 - l2|^2 / 4).
    """
    M = as_matrix(M)
    if M.shape != (2, 2):
        raise InvalidInputError("ellipse_of_2x2 needs a 2 x 2 matrix")
    tr = M[0, 0] + M[1, 1]
    det = M[0, 0] * M[1, 1] - M[0, 1] * M[1, 0]
    center = tr / 2
    d = np.sqrt(center * center - det)
    l1, l2 = center + d, center - d
    s2 = np.sum(np.abs(M) ** 2) - abs(l1) ** 2 - abs(l2) ** 2
    s2 = max(float(s2), 0.0)
    scale = max(1.0, float(np.max(np.abs(M)))) ** 2
    if s2 <= 1e-24 * scale:
        s2 = 0.0
    b = 0.5 * math.sqrt(s2)
    a = math.sqrt(b * b + abs(d) ** 2)
    angle = float(np.angle(d)) if abs(d) > 0 else 0.0
    return EllipseShadow(complex(center), angle, a, b, (complex(l1), complex(l2)))


def density_2x2(E, z):
    """Shadow density 1 / (2 pi a b sqrt(1 - r^2)) of a 2 x 2 matrix.

    r is the elliptical radius of z.  Points outside the ellipse give 0 and
    points on the boundary give +inf.
    """
    if E.degenerate:
        raise InvalidInputError("normal 2 x 2 matrix: the shadow has no planar density")
    z = np.asarray(z, dtype=np.complex128)
    w = (z - E.center) * np.exp(-1j * E.axis_angle)
    r2 = (w.real / E.a) ** 2 + (w.imag / E.b) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        out = np.where(r2 < 1, 1.0 / (2 * np.pi * E.a * E.b * np.sqrt(np.abs(1 - r2))), 0.0)
    out = np.where(r2 == 1, np.inf, out)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# F_N and R_{N,k}

def _check_N(N):
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise InvalidInputError("N must be an integer >= 2")
    return int(N)


def _f2(x):
    return 0.5 / np.sqrt(1.0 - x)


def _f3(x):
    out = np.empty_like(x)
    lo = x < 0.5
    xl = x[lo]
    out[lo] = np.log((1.0 + np.sqrt(1.0 - xl)) / np.sqrt(xl))
    out[~lo] = np.arctanh(np.sqrt(1.0 - x[~lo]))
    return out


def _f_steps(N, f_prev, f_cur, t):
    """Run the recurrence in N from (F_2, F_3) to F_N; t = 1 - x.

    Works for floats, arrays and mpmath numbers alike; with mpmath input
    the coefficients are formed at the working precision.
    """
    if N == 2:
        return f_prev
    one = mpmath.mpf(1) if isinstance(t, mpmath.mpf) else 1.0
    for n in range(2, N - 1):
        f_prev, f_cur = f_cur, one * (n + 1) / (n - 1) ** 2 * ((2 * n - 3) * f_cur - t * n * f_prev)
    return f_cur


def _f_magnitude(N, s_prev, s_cur, t):
    """Companion of the recurrence with every term taken in absolute value."""
    if N == 2:
        return s_prev
    for n in range(2, N - 1):
        s_prev, s_cur = s_cur, (n + 1) / (n - 1) ** 2 * ((2 * n - 3) * s_cur + t * n * s_prev)
    return s_cur


# tolerated ratio between the largest partial term and the result before a
# point is recomputed in extended precision
_MAX_LOSS = 1e4


def _loss_digits(loss):
    return 20 + int(math.log10(min(max(loss, 1.0), 1e300)))


def _extended(fn, bound, loss):
    """Evaluate fn() in mpmath, raising the precision until the cancellation
    measured against the extended result leaves at least 16 digits.

    The first guess for the loss comes from the inaccurate double value,
    which can understate it by many orders of magnitude.
    """
    digits = _loss_digits(loss)
    for _ in range(8):
        with mpmath.workdps(digits):
            v = fn()
        if v == 0:
            return 0.0
        need = _loss_digits(bound / abs(float(v)) if float(v) != 0 else 1e300)
        if need <= digits:
            return float(v)
        digits = need + 5
    return float(v)


def _f_recurrence(N, x):
    """F_N on 0 < x < 1 from F_2, F_3 and the three-term recurrence.

    F_N is the recessive solution as x -> 1, so the forward recurrence
    cancels there; points whose terms exceed the result by more than four
    digits are rerun with mpmath at a precision matched to the loss.
    """
    t = 1.0 - x
    f2, f3 = _f2(x), _f3(x)
    vals = np.asarray(_f_steps(N, f2, f3, t), dtype=float)
    bound = _f_magnitude(N, np.abs(f2), np.abs(f3), t)
    with np.errstate(divide="ignore", invalid="ignore"):
        loss = bound / np.abs(vals)
    for i in np.flatnonzero(~(loss <= _MAX_LOSS)):
        xv = float(x.flat[i])

        def fn():
            tm = 1 - mpmath.mpf(xv)
            return _f_steps(N, 1 / (2 * mpmath.sqrt(tm)), mpmath.atanh(mpmath.sqrt(tm)), tm)

        vals.flat[i] = _extended(fn, float(bound.flat[i]), loss.flat[i])
    return vals


def _r_prefactor(N, k):
    return math.exp(math.lgamma(N / 2) + math.lgamma((N + 1) / 2)
                    - math.lgamma(N - 0.5 - k) - math.lgamma(k))


def _r_series(N, k, x):
    """R_{N,k} on 0 < x < 1 from its hypergeometric representation."""
    t = 1.0 - x
    h = hyp2f1_series((N + 1) / 2 - k, N / 2 - k, N - 0.5 - k, t)
    return _r_prefactor(N, k) * t ** (N - 1.5 - k) * h


@lru_cache(maxsize=None)
def _f_poly_rep(N):
    """Polynomials a_N, b_N with F_N = a_N F_2 + b_N F_3."""
    a, b = _f_poly_rep_exact(N)
    return (Polynomial([float(c) for c in a]), Polynomial([float(c) for c in b]))


@lru_cache(maxsize=None)
def _f_poly_rep_exact(N):
    """Coefficient lists of a_N, b_N as exact rationals."""
    reps = {2: ([Fraction(1)], [Fraction(0)]), 3: ([Fraction(0)], [Fraction(1)])}

    def mul_one_minus_x(p):
        out = [Fraction(0)] * (len(p) + 1)
        for i, c in enumerate(p):
            out[i] += c
            out[i + 1] -= c
        return out

    def combine(c1, p, c2, q):
        size = max(len(p), len(q))
        p = p + [Fraction(0)] * (size - len(p))
        q = q + [Fraction(0)] * (size - len(q))
        return [c1 * u + c2 * v for u, v in zip(p, q)]

    for n in range(2, N - 1):
        f = Fraction(n + 1, (n - 1) ** 2)
        a1, b1 = reps[n + 1]
        a0, b0 = reps[n]
        reps[n + 2] = (combine(f * (2 * n - 3), a1, -f * n, mul_one_minus_x(a0)),
                       combine(f * (2 * n - 3), b1, -f * n, mul_one_minus_x(b0)))
    return reps[N]


def _f2_deriv(i, x):
    return 0.5 * float(_rising_half(i)) * (1.0 - x) ** (-0.5 - i)


def _rising_half(i):
    out = Fraction(1)
    for q in range(i):
        out *= Fraction(1, 2) + q
    return out


def _f3_deriv(i, x, absolute=False):
    """i-th derivative of F_3; ``absolute`` sums the magnitudes of the terms instead."""
    if i == 0:
        return np.abs(_f3(x)) if absolute else _f3(x)
    # F_3' = -F_2 / x, differentiated i - 1 more times by Leibniz
    total = np.zeros_like(x)
    for l in range(i):
        m = i - 1 - l
        inv = (1 if absolute else (-1) ** m) * math.factorial(m) * x ** (-(m + 1))
        total = total + math.comb(i - 1, l) * inv * _f2_deriv(l, x)
    return total if absolute else -total


def _f_deriv_exact(N, j, x, absolute=False):
    """j-th derivative of F_N on 0 < x < 1 from its F_2, F_3 representation.

    With ``absolute`` every product is replaced by its magnitude, which
    bounds the cancellation in the signed sum.
    """
    a, b = _f_poly_rep(N)
    if absolute:
        a, b = Polynomial(np.abs(a.coef)), Polynomial(np.abs(b.coef))
    total = np.zeros_like(x)
    for i in range(j + 1):
        c = math.comb(j, i)
        da, db = a.deriv(j - i), b.deriv(j - i)
        if absolute:
            da, db = Polynomial(np.abs(da.coef)), Polynomial(np.abs(db.coef))
        total = total + c * (da(x) * _f2_deriv(i, x) + db(x) * _f3_deriv(i, x, absolute))
    return total


def _f_deriv_rep_mp(N, j, x):
    """j-th derivative of F_N at an mpmath point from the exact F_2, F_3 representation."""
    a, b = _f_poly_rep_exact(N)
    t = 1 - x

    def poly_deriv(coef, d):
        return sum(mpmath.mpf(c.numerator) / c.denominator * math.perm(p, d) * x ** (p - d)
                   for p, c in enumerate(coef) if p >= d and c != 0)

    def f2d(i):
        h = _rising_half(i)
        return mpmath.mpf(h.numerator) / h.denominator / 2 * t ** (-mpmath.mpf(1) / 2 - i)

    def f3d(i):
        if i == 0:
            return mpmath.atanh(mpmath.sqrt(t))
        return -sum(math.comb(i - 1, l) * (-1) ** (i - 1 - l) * math.factorial(i - 1 - l)
                    * x ** (-(i - l)) * f2d(l) for l in range(i))

    return sum(math.comb(j, i) * (poly_deriv(a, j - i) * f2d(i) + poly_deriv(b, j - i) * f3d(i))
               for i in range(j + 1))


def _r_steps(N, k, r_prev, r_cur, t, absolute=False):
    """Recurrence in N for R_{N,k} from R_{2k,k} and R_{2k+1,k}; t = 1 - x."""
    if N == 2 * k:
        return r_prev
    one = mpmath.mpf(1) if isinstance(t, mpmath.mpf) else 1.0
    sgn = 1 if absolute else -1
    for n in range(2 * k + 1, N):
        r_prev, r_cur = r_cur, one * n / ((n - 2) * (n - 2 * k)) * (
            (2 * n - 2 * k - 3) * r_cur + sgn * (n - 1) * t * r_prev)
    return r_cur


def _r_recurrence(N, k, x):
    """R_{N,k} on 0 < x < 1 by the recurrence in N, k >= 2.

    As for F_N, points where the recurrence cancels are redone with mpmath.
    """
    t = 1.0 - x
    r0 = (k - 0.5) * t ** (k - 1.5)
    pre = x ** (k - 1) / math.factorial(k - 1)
    r1 = (-1) ** (k - 1) * pre * _f_deriv_exact(2 * k + 1, k - 1, x)
    vals = np.asarray(_r_steps(N, k, r0, r1, t), dtype=float)
    bound = _r_steps(N, k, np.abs(r0), pre * _f_deriv_exact(2 * k + 1, k - 1, x, absolute=True),
                     t, absolute=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        loss = bound / np.abs(vals)
    for i in np.flatnonzero(~(loss <= _MAX_LOSS)):
        xv = float(x.flat[i])

        def fn():
            xm = mpmath.mpf(xv)
            tm = 1 - xm
            s0 = (k - mpmath.mpf(1) / 2) * tm ** (k - mpmath.mpf(3) / 2)
            s1 = ((-1) ** (k - 1) * xm ** (k - 1) / math.factorial(k - 1)
                  * _f_deriv_rep_mp(2 * k + 1, k - 1, xm))
            return _r_steps(N, k, s0, s1, tm)

        vals.flat[i] = _extended(fn, float(bound.flat[i]), loss.flat[i])
    return vals


def _switch(N):
    # the recurrence loses about one digit per step near x = 1, so it is
    # only used close to the origin where the series converges slowly
    return min(0.05, 1.0 / N)


def F_N(N, x, method="auto"):
    """Radial building block F_N(x) for the shadow of J_N.

    F_2 = 1 / (2 sqrt(1-x)), F_3 = log((1 + sqrt(1-x)) / sqrt(x)) and the
    higher F_N follow from a three-term recurrence.  F_N vanishes for
    x >= 1.  At x <= 0 the value is 1/2 for N = 2 and +inf otherwise.

    Parameters
    ----------
    N : int, N >= 2
    x : float or array_like
    method : {"auto", "recurrence", "series"}
        "series" uses the 2F1 representation at argument 1 - x; "auto"
        uses the recurrence for x < min(0.05, 1/N) and the series above,
        where the recurrence loses relative accuracy.
    """
    N = _check_N(N)
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    inside = (x > 0) & (x < 1)
    out[x <= 0] = 0.5 if N == 2 else np.inf
    xi = x[inside]
    if N <= 3 or method == "recurrence":
        out[inside] = _f_recurrence(N, xi)
    elif method == "series":
        out[inside] = _r_series(N, 1, xi)
    elif method == "auto":
        vals = np.empty_like(xi)
        lo = xi < _switch(N)
        vals[lo] = _f_recurrence(N, xi[lo])
        vals[~lo] = _r_series(N, 1, xi[~lo])
        out[inside] = vals
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    return out if out.ndim else float(out)


def R_Nk(N, k, x, method="auto"):
    """Radial building block R_{N,k}(x), with R_{N,1} = F_N.

    Defined for k >= 1 and N >= 2k.  R_{2k,k}(x) = (k - 1/2)(1-x)^(k-3/2);
    otherwise the value comes from the hypergeometric series or, close to
    the origin, from the recurrence in N seeded by R_{2k,k} and R_{2k+1,k}.
    Zero for x >= 1.
    """
    N = _check_N(N)
    if not isinstance(k, (int, np.integer)) or k < 1 or N < 2 * k:
        raise InvalidInputError(f"R_(N,k) needs k >= 1 and N >= 2k, got N={N}, k={k}")
    k = int(k)
    if k == 1:
        return F_N(N, x, method=method)
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    inside = (x > 0) & (x < 1)
    if N == 2 * k:
        at0 = k - 0.5
    else:
        a, b, c = (N + 1) / 2 - k, N / 2 - k, N - 0.5 - k
        at0 = _r_prefactor(N, k) * gauss_sum(a, b, c)
    out[x <= 0] = at0
    xi = x[inside]
    if method == "series":
        out[inside] = _r_series(N, k, xi)
    elif method == "recurrence":
        out[inside] = _r_recurrence(N, k, xi)
    elif method == "auto":
        vals = np.empty_like(xi)
        lo = xi < _switch(N)
        vals[lo] = _r_recurrence(N, k, xi[lo])
        vals[~lo] = _r_series(N, k, xi[~lo])
        out[inside] = vals
    else:
        raise InvalidInputError(f"unknown method {method!r}")
    return out if out.ndim else float(out)


def F_N_derivative(N, j, x):
    """j-th derivative of F_N, read off R_{N,j+1}.

    F_N^(j)(x) = (-1)^j j! x^(-j) R_{N,j+1}(x); requires N >= 2(j+1).
    """
    if j == 0:
        return F_N(N, x)
    x = np.asarray(x, dtype=float)
    with np.errstate(divide="ignore"):
        out = (-1) ** j * math.factorial(j) * x ** (-float(j)) * R_Nk(N, j + 1, x)
    out = np.where(x >= 1, 0.0, out)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# Jordan blocks

def jordan_radial_density(N, r):
    """Radial density f_N(r) of the shadow of the N x N Jordan block.

    f_N(r) = (1/pi) sum_{k=1}^{N//2} (-1)^(k-1) 2^(N+1)/(N+1)
             sin^2(k pi/(N+1)) cos^(N-3)(k pi/(N+1)) F_N(r^2 / cos^2(k pi/(N+1))).

    Integrates to one against 2 pi r dr and vanishes for r >= cos(pi/(N+1)).
    """
    N = _check_N(N)
    terms = []
    for k in range(1, N // 2 + 1):
        ang = k * np.pi / (N + 1)
        c = np.cos(ang)
        w = (-1) ** (k - 1) * 2.0 ** (N + 1) / (N + 1) * np.sin(ang) ** 2 * c ** (N - 3)
        terms.append(RadialTerm(float(w / np.pi), float(c), 1))
    dens = RadialDensity(N, tuple(terms), float(np.cos(np.pi / (N + 1))), "jordan")
    return dens(r)


# ---------------------------------------------------------------------------
# rotation-invariant shadows

@dataclass(frozen=True)
class RadialTerm:
    """One summand weight * R_{N,k}(r^2 / scale^2)."""

    weight: float
    scale: float
    k: int


@dataclass(frozen=True)
class RadialDensity:
    """Radial profile f(r) of a rotation-invariant shadow.

    The planar density at z is f(|z|).  ``atomic`` marks the zero matrix,
    whose shadow is a point mass at the origin; its profile is identically
    zero.
    """

    n: int
    terms: tuple
    support_radius: float
    route: str
    atomic: bool = False

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        total = np.zeros(r.shape)
        pos = r > 0
        rp = r[pos]
        for t in self.terms:
            total[pos] += t.weight * R_Nk(self.n, t.k, (rp / t.scale) ** 2)
        if not pos.all():
            total[~pos] = self._at_origin()
        total = np.where(r >= self.support_radius, 0.0, total)
        return total if total.ndim else float(total)

    def _at_origin(self):
        """Limit r -> 0 of the sum; the logarithms of the F_N terms may cancel.

        Near 0, F_N(x) = -b_N(0) log(x) / 2 + a_N(0) / 2 + b_N(0) log 2 + o(1)
        with F_N = a_N F_2 + b_N F_3, and x = r^2 / scale^2.
        """
        if self.atomic:
            return 0.0
        log_coef = 0.0
        finite = 0.0
        size = 0.0
        for t in self.terms:
            if t.k > 1 or self.n == 2:
                finite += t.weight * R_Nk(self.n, t.k, 0.0)
                continue
            a, b = _f_poly_rep(self.n)
            a0, b0 = a(0.0), b(0.0)
            log_coef -= t.weight * b0
            size += abs(t.weight * b0)
            finite += t.weight * (b0 * math.log(t.scale) + a0 / 2 + b0 * math.log(2.0))
        if abs(log_coef) > 1e-9 * size:
            return math.inf if log_coef < 0 else -math.inf
        return finite

    def radial_moment(self, m):
        """2 pi int_0^R r^(2m+1) f(r) dr by adaptive quadrature."""
        from scipy.integrate import quad

        R = self.support_radius
        if self.atomic:
            return 1.0 if m == 0 else 0.0
        # substitute y = r^2: pi int_0^{R^2} y^m f(sqrt y) dy
        knots = sorted({(t.scale ** 2) for t in self.terms})
        edges = [0.0] + [k for k in knots if k < R * R] + [R * R]
        total = 0.0
        for lo, hi in zip(edges[:-1], edges[1:]):
            val, _ = quad(lambda y: y ** m * self(math.sqrt(y)), lo, hi,
                          limit=400, epsabs=0, epsrel=1e-12)
            total += val
        return math.pi * total


def partial_fraction_alpha(mu, k):
    """Constants alpha_ij of prod_i (1 - 4t^2 mu_i^2)^(-k_i).

    The product equals sum_i sum_{j=0}^{k_i-1} alpha_ij (1 - 4t^2 mu_i^2)^(j - k_i).

    Returns
    -------
    list of ndarray
        ``alpha[i][j]`` for j = 0..k_i-1.
    """
    mu = np.asarray(mu, dtype=float)
    k = [int(v) for v in k]
    if mu.ndim != 1 or len(mu) != len(k) or len(mu) == 0:
        raise InvalidInputError("mu and k must be equal-length non-empty sequences")
    if np.any(mu <= 0):
        raise InvalidInputError("mu must be positive")
    if len(np.unique(mu)) != len(mu):
        raise InvalidInputError("mu must be distinct; group coincident values first")
    poles = pole_expansion(mu ** 2, k)
    return [np.asarray(p[::-1], dtype=float) for p in poles]


def _positive_groups(A):
    """Grouped positive eigenvalues of Re A and the dimension N."""
    A = as_matrix(A)
    n = A.shape[0]
    eigs = hermitian_eigenvalues(hermitian_part(A))
    tol = coincidence_tol(eigs)
    pos = np.sort(eigs[eigs > tol])
    groups = []
    for v in pos:
        if groups and v - groups[-1][-1] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    mu = np.array([np.mean(g) for g in groups])
    mult = [len(g) for g in groups]
    return n, mu, mult


def _distinct_terms(n, lam):
    p = len(lam)
    terms = []
    for i, lk in enumerate(lam):
        denom = np.prod([lk * lk - lj * lj for j, lj in enumerate(lam) if j != i])
        w = lk ** (2 * (p - 2)) / denom / np.pi
        terms.append(RadialTerm(float(w), float(lk), 1))
    return terms


def _grouped_terms(n, mu, mult):
    alpha = partial_fraction_alpha(mu, mult)
    terms = []
    for m_i, k_i, a_i in zip(mu, mult, alpha):
        for j in range(k_i):
            terms.append(RadialTerm(float(a_i[j] / (np.pi * m_i * m_i)), float(m_i), k_i - j))
    return terms


def rotation_invariant_density(A, route="auto"):
    """Radial density of a matrix with a rotation-invariant shadow.

    Parameters
    ----------
    A : (N, N) array_like
        Must satisfy :func:`rotation_invariant`.
    route : {"auto", "distinct", "grouped"}
        "distinct" uses the closed sum over distinct positive eigenvalues of
        Re A; "grouped" uses partial fractions and R_{N,k} terms and
        handles repeated eigenvalues; "auto" picks "distinct" when possible.

    Returns
    -------
    RadialDensity
    """
    A = as_matrix(A)
    if not rotation_invariant(A):
        raise InvalidInputError("the shadow of this matrix is not rotation invariant")
    n, mu, mult = _positive_groups(A)
    if len(mu) == 0:
        return RadialDensity(n, (), 0.0, "atomic", atomic=True)
    distinct = all(m == 1 for m in mult)
    if route == "auto":
        route = "distinct" if distinct else "grouped"
    if route == "distinct":
        if not distinct:
            raise InvalidInputError("repeated eigenvalues: use the grouped route")
        terms = _distinct_terms(n, mu)
    elif route == "grouped":
        terms = _grouped_terms(n, mu, mult)
    else:
        raise InvalidInputError(f"unknown route {route!r}")
    return RadialDensity(n, tuple(terms), float(mu.max()), route)


def rotation_invariant_model(lams, n=None):
    """Block matrix (2 l_1 J_2) + ... + (2 l_p J_2) + 0 of dimension n.

    Its shadow is rotation invariant and Re of it has eigenvalues +-l_i.
    """
    lams = [float(v) for v in lams]
    size = 2 * len(lams)
    n = size if n is None else int(n)
    if n < size:
        raise InvalidInputError("dimension too small for the requested blocks")
    A = np.zeros((n, n), dtype=np.complex128)
    for i, v in enumerate(lams):
        A[2 * i, 2 * i + 1] = 2 * v
    return A


def _r_mp(N, k, x):
    a = mpmath.mpf(N + 1) / 2 - k
    b = mpmath.mpf(N) / 2 - k
    c = N - mpmath.mpf(1) / 2 - k
    pref = mpmath.gamma(mpmath.mpf(N) / 2) * mpmath.gamma(mpmath.mpf(N + 1) / 2) / (
        mpmath.gamma(c) * mpmath.factorial(k - 1))
    return pref * (1 - x) ** (N - mpmath.mpf(3) / 2 - k) * mpmath.hyp2f1(a, b, c, 1 - x)


def _f_deriv_mp(N, j, x):
    if x >= 1:
        return mpmath.mpf(0)
    return (-1) ** j * mpmath.factorial(j) * x ** (-j) * _r_mp(N, j + 1, x)


def divided_difference_density(A, r, dps=40):
    """Radial density through a divided difference, in extended precision.

    With y_j = 1/lambda_j^2 (repeated by multiplicity) and g(y) = F_N(r^2 y),

        f(r) = (1/pi) (-1)^(p-1) (prod_j y_j) g[y_1, ..., y_p],

    where coincident nodes use derivative limits g^(m)(y)/m!.  Every
    quantity is computed with mpmath at ``dps`` digits, independently of
    the double-precision routes.
    """
    n, mu, mult = _positive_groups(A)
    if len(mu) == 0:
        raise InvalidInputError("zero matrix: the shadow is a point mass")
    r = np.atleast_1d(np.asarray(r, dtype=float))
    out = np.zeros(r.shape)
    with mpmath.workdps(dps):
        nodes = []
        for m_i, k_i in zip(mu, mult):
            nodes += [mpmath.mpf(1) / mpmath.mpf(m_i) ** 2] * k_i
        nodes.sort()
        p = len(nodes)
        yprod = mpmath.fprod(nodes)
        for idx, rv in enumerate(r):
            r2 = mpmath.mpf(rv) ** 2
            if rv >= mu.max():
                continue

            def deriv(m, y):
                return r2 ** m * _f_deriv_mp(n, m, r2 * y)

            table = [deriv(0, y) for y in nodes]
            for level in range(1, p):
                new = []
                for i in range(level, p):
                    lo, hi = nodes[i - level], nodes[i]
                    if hi == lo:
                        new.append(deriv(level, hi) / mpmath.factorial(level))
                    else:
                        new.append((table[i - level + 1] - table[i - level]) / (hi - lo))
                table = new
            val = (-1) ** (p - 1) * yprod * table[0] / mpmath.pi
            out[idx] = float(val)
    return out
