"""Quantities derived from the Hermitian pencil Re(exp(-i theta) A).

The projection of the shadow of A onto the direction exp(i theta) is the
shadow of the Hermitian matrix Re(exp(-i theta) A).  That shadow has a
piecewise polynomial density (a B-spline with knots at the eigenvalues),
its moments follow from xi_A, and the eigenvalue branches lambda_j(theta)
trace the critical curves exp(i theta) (lambda_j + i lambda_j').
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq, linear_sum_assignment

from .errors import DegenerateBranchWarning, InvalidInputError
from .matrix import (as_hermitian, as_matrix, coincidence_tol, hermitian_eigenvalues,
                     hermitian_part, xi_poly)
from .moments import series_inverse
from .special import pole_expansion, reassemble_poles

__all__ = [
    "eig_sweep",
    "HermitianShadowDensity",
    "hermitian_density",
    "marginal_density",
    "marginal_moment",
    "marginal_mean",
    "marginal_variance",
    "lambda_prime",
    "CriticalCurve",
    "critical_curves",
]


def eig_sweep(A, thetas):
    """Ascending eigenvalues of Re(exp(-i theta) A) for every theta.

    Returns
    -------
    ndarray, shape (len(thetas), N)
    """
    A = as_matrix(A)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if thetas.size == 0:
        raise InvalidInputError("empty angle grid")
    return hermitian_eigenvalues(hermitian_part(A, thetas))


# ---------------------------------------------------------------------------
# Hermitian densities

def _tpow(x, e):
    """Truncated power x_+^e with x_+^0 = 1 for x >= 0 and 0 for x < 0."""
    x = np.asarray(x, dtype=float)
    if e == 0:
        return (x >= 0).astype(float)
    return np.where(x > 0, np.abs(x) ** e, 0.0)


@dataclass(frozen=True)
class HermitianShadowDensity:
    """Density of the shadow of a Hermitian matrix on the real line.

    With distinct non-zero eigenvalues mu_i of multiplicity m_i and

        1 / prod_i (1 - r mu_i)^(m_i) = sum_ij beta_ij (1 - r mu_i)^(-j),

    the density is a sum of truncated-power terms supported between 0
    and each mu_i.  An ``atomic`` density stands for a point mass at
    ``atom`` (scalar matrices) and evaluates to zero everywhere.

    Attributes
    ----------
    n : int
    mu : ndarray
    mults : tuple of int
    beta : tuple of ndarray
        ``beta[i][j - 1]`` is beta_ij.
    support : tuple of float
    atomic : bool
    atom : float or None
    residual : float
        Largest mismatch of the partial fractions against 1/xi on a grid.
    """

    n: int
    mu: np.ndarray
    mults: tuple
    beta: tuple
    support: tuple
    atomic: bool = False
    atom: float = None
    residual: float = 0.0

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        if self.atomic:
            return out if out.ndim else float(out)
        n = self.n
        for mu, m, b in zip(self.mu, self.mults, self.beta):
            for j in range(1, m + 1):
                c = b[j - 1] * j * math.comb(n - 1, j) * abs(mu) ** (1 - n)
                if mu > 0:
                    out = out + c * _tpow(x, j - 1) * _tpow(mu - x, n - j - 1)
                else:
                    out = out + c * _tpow(-x, j - 1) * _tpow(x - mu, n - j - 1)
        lo, hi = self.support
        out = np.where((x < lo) | (x > hi), 0.0, out)
        return out if out.ndim else float(out)

    @property
    def knots(self):
        """Sorted breakpoints of the piecewise polynomial (eigenvalues and 0)."""
        return np.unique(np.concatenate([self.mu, [0.0]]))

    def moment(self, k):
        """k-th moment sum_ij beta_ij (j)_k / (N)_k mu_i^k in closed form."""
        if self.atomic:
            return float(self.atom) ** k
        total = 0.0
        for mu, m, b in zip(self.mu, self.mults, self.beta):
            for j in range(1, m + 1):
                total += b[j - 1] * _ratio_rising(j, self.n, k) * mu ** k
        return total


def _ratio_rising(a, b, k):
    out = 1.0
    for i in range(k):
        out *= (a + i) / (b + i)
    return out


def _group(values, tol):
    groups = []
    for v in np.sort(values):
        if groups and v - groups[-1][-1] <= tol:
            groups[-1].append(v)
        else:
            groups.append([v])
    return groups


def hermitian_density(H):
    """Shadow density of a Hermitian matrix.

    The partial fraction constants beta_ij are taken from the local
    expansion of 1/xi_H at each pole; the assembled fractions are then
    checked against 1/xi_H at Chebyshev points inside the disc of
    convergence and the mismatch is stored in ``residual``.
    """
    H = as_hermitian(H)
    n = H.shape[0]
    eigs = hermitian_eigenvalues(H)
    tol = coincidence_tol(eigs)
    lo, hi = float(eigs[0]), float(eigs[-1])
    if hi - lo <= tol:
        return HermitianShadowDensity(n, np.zeros(0), (), (), (lo, hi), True, 0.5 * (lo + hi))
    groups = [g for g in _group(eigs, tol) if abs(np.mean(g)) > tol]
    mu = np.array([np.mean(g) for g in groups])
    mults = tuple(len(g) for g in groups)
    beta = pole_expansion(mu, mults)
    # check the decomposition against the product form
    rmax = 0.5 / np.max(np.abs(mu))
    r = rmax * np.cos(np.pi * (np.arange(16) + 0.5) / 16)
    exact = 1.0 / np.prod([(1 - r * m) ** k for m, k in zip(mu, mults)], axis=0)
    approx = reassemble_poles(mu, beta, r)
    resid = float(np.max(np.abs(approx - exact) / np.abs(exact)))
    return HermitianShadowDensity(n, mu, mults, tuple(np.asarray(b) for b in beta),
                                  (lo, hi), residual=resid)


def marginal_density(A, theta):
    """Density of Re(exp(-i theta) z) for z drawn from the shadow of A."""
    return hermitian_density(hermitian_part(as_matrix(A), float(theta)))


def _pencil_series(A, theta, order):
    """Coefficients of xi_A(r e^{-i theta} / 2, r e^{i theta} / 2) in r."""
    xi = xi_poly(A)
    c = xi.coeffs
    n = xi.n
    out = np.zeros(n + 1, dtype=np.complex128)
    for j in range(n + 1):
        for k in range(n + 1 - j):
            out[j + k] += c[j, k] * 0.5 ** (j + k) * np.exp(-1j * (j - k) * theta)
    return out.real, n


def marginal_moment(A, theta, n):
    """n-th moment of the shadow of Re(exp(-i theta) A).

    Equal to n! / (N)_n [r^n] 1 / xi_A(r e^{-i theta} / 2, r e^{i theta} / 2).
    """
    if n < 0:
        raise InvalidInputError("moment order must be non-negative")
    poly, N = _pencil_series(A, float(theta), n)
    inv = np.zeros(n + 1)
    inv[0] = 1.0
    for k in range(1, n + 1):
        top = min(k, N)
        inv[k] = -np.dot(poly[1:top + 1], inv[k - 1::-1][:top])
    w = 1.0
    for i in range(n):
        w *= (i + 1) / (N + i)
    return float(w * inv[n])


def marginal_mean(A, theta):
    """Mean Re(exp(-i theta) tr(A) / N) of the marginal."""
    return marginal_moment(A, theta, 1)


def marginal_variance(A, theta):
    m1 = marginal_moment(A, theta, 1)
    return marginal_moment(A, theta, 2) - m1 * m1


# ---------------------------------------------------------------------------
# eigenvalue branches and critical curves

class _Pencil:
    """p(theta, lam) = det(lam I - Re(e^{-i theta} A)) and its derivatives.

    Expanding through xi_A,

        p = sum_jk xi_jk 2^(-j-k) lam^(N-j-k) exp(-i (j-k) theta).
    """

    def __init__(self, A):
        xi = xi_poly(A)
        n = xi.n
        jj, kk = np.indices(xi.coeffs.shape)
        keep = (jj + kk <= n) & (xi.coeffs != 0)
        self.n = n
        self.c = (xi.coeffs * 0.5 ** (jj + kk))[keep]
        self.e = (n - jj - kk)[keep]
        self.q = (jj - kk)[keep]

    def derivs(self, theta, lam):
        """p_t, p_l, p_tt, p_tl, p_ll at matching arrays theta (T,) and lam (T, M)."""
        th = np.asarray(theta, dtype=float)[:, None, None]
        lam = np.asarray(lam, dtype=float)[..., None]
        e, q, c = self.e, self.q, self.c
        ph = c * np.exp(-1j * q * th)

        def lpow(k):
            # lam^(e - k) times the falling factorial e (e-1) ... (e-k+1)
            ff = np.ones_like(e, dtype=float)
            for i in range(k):
                ff = ff * (e - i)
            ex = np.maximum(e - k, 0)
            return np.where(ff != 0, ff * lam ** ex, 0.0)

        l0, l1, l2 = lpow(0), lpow(1), lpow(2)
        iq = -1j * q
        p_t = np.sum(ph * iq * l0, axis=-1).real
        p_l = np.sum(ph * l1, axis=-1).real
        p_tt = np.sum(ph * iq * iq * l0, axis=-1).real
        p_tl = np.sum(ph * iq * l1, axis=-1).real
        p_ll = np.sum(ph * l2, axis=-1).real
        return p_t, p_l, p_tt, p_tl, p_ll

    def slopes(self, theta, lam):
        """lam' and lam'' of the branches through (theta, lam)."""
        p_t, p_l, p_tt, p_tl, p_ll = self.derivs(theta, lam)
        with np.errstate(divide="ignore", invalid="ignore"):
            d1 = -p_t / p_l
            d2 = -(p_tt + 2 * d1 * p_tl + d1 * d1 * p_ll) / p_l
        return d1, d2


def _gaps(vals):
    """Distance of every eigenvalue to its nearest neighbour, shape like vals."""
    vals = np.asarray(vals, dtype=float)
    g = np.full(vals.shape, np.inf)
    if vals.shape[-1] > 1:
        d = np.diff(vals, axis=-1)
        g[..., :-1] = d
        g[..., 1:] = np.minimum(g[..., 1:], d)
    return g


def _fd_slope(A, theta, j, h=1e-6):
    """One-sided difference of the j-th sorted eigenvalue."""
    v0 = hermitian_eigenvalues(hermitian_part(A, theta))[j]
    v1 = hermitian_eigenvalues(hermitian_part(A, theta + h))[j]
    return (v1 - v0) / h


def lambda_prime(A, theta, j):
    """Derivative of the j-th smallest eigenvalue of Re(exp(-i theta) A).

    Implicit differentiation of det(lam I - Re(exp(-i theta) A)) = 0.  At
    a near crossing (gap below 1e-7 max(1, rho)) the derivative is not
    defined by the implicit formula; a DegenerateBranchWarning is issued
    and a one-sided difference is returned.
    """
    A = as_matrix(A)
    n = A.shape[0]
    if not 0 <= j < n:
        raise InvalidInputError(f"branch index {j} out of range 0..{n - 1}")
    theta = float(theta)
    vals = hermitian_eigenvalues(hermitian_part(A, theta))
    gap = _gaps(vals)[j]
    if gap < 1e-7 * max(1.0, float(np.max(np.abs(vals)))):
        warnings.warn(f"eigenvalue {j} is not simple at theta={theta}",
                      DegenerateBranchWarning, stacklevel=2)
        return float(_fd_slope(A, theta, j))
    d1, _ = _Pencil(A).slopes(np.array([theta]), np.array([[vals[j]]]))
    return float(d1[0, 0])


@dataclass(frozen=True)
class CriticalCurve:
    """One closed critical curve z = exp(i theta) (lam + i lam').

    The curve is assembled from eigenvalue branches over consecutive
    half-turns; ``branches`` lists their 0-based indices in ascending
    order at the base angle, and ``theta`` runs over a range of length
    pi * len(branches).

    Attributes
    ----------
    branches : tuple of int
    theta, lam, dlam : ndarray
    z : ndarray of complex
    cusps : ndarray
        Angles where lam + lam'' changes sign.
    cusp_points : ndarray of complex
    degenerate : ndarray of bool
        Samples taken at near crossings (derivative by finite difference).
    """

    branches: tuple
    theta: np.ndarray
    lam: np.ndarray
    dlam: np.ndarray
    z: np.ndarray
    cusps: np.ndarray = field(default_factory=lambda: np.zeros(0))
    cusp_points: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    degenerate: np.ndarray = None

    @property
    def branch_index(self):
        return self.branches[0]

    @property
    def samples(self):
        return list(zip(self.theta, self.lam, self.dlam, self.z))


def _base_angle(A, coarse=64):
    """Angle of the coarse grid where the smallest eigenvalue gap is largest."""
    th = (np.arange(coarse) + 0.381966) * 2 * np.pi / coarse
    vals = eig_sweep(A, th)
    if vals.shape[1] == 1:
        return float(th[0])
    gaps = np.min(np.diff(vals, axis=1), axis=1)
    return float(th[np.argmax(gaps)])


def _track(pencil, thetas, vals, degen):
    """Follow branches through a sorted eigenvalue table by Taylor prediction."""
    T, n = vals.shape
    out = np.empty_like(vals)
    out[0] = vals[0]
    d1, d2 = pencil.slopes(thetas[:1], vals[:1])
    for i in range(1, T):
        h = thetas[i] - thetas[i - 1]
        prev = out[i - 1]
        a1 = np.where(np.isfinite(d1[0]), d1[0], 0.0)
        a2 = np.where(np.isfinite(d2[0]), d2[0], 0.0)
        pred = prev + a1 * h + 0.5 * a2 * h * h
        cost = np.abs(pred[:, None] - vals[i][None, :])
        _, col = linear_sum_assignment(cost)
        out[i] = vals[i][col]
        d1, d2 = pencil.slopes(thetas[i:i + 1], out[i:i + 1])
        bad = ~np.isfinite(d1[0]) | degen[i][col]
        if bad.any():
            # fall back to the secant slope through the last two samples
            d1 = np.where(bad, (out[i] - prev) / h, d1)
            d2 = np.where(bad, 0.0, d2)
    return out


def critical_curves(A, n_theta=1024, branch_tracking="taylor"):
    """Critical curves of A traced by the eigenvalue branches of Re(e^{-i theta} A).

    Parameters
    ----------
    A : (N, N) array_like
    n_theta : int
        Samples per full turn, at least 16.
    branch_tracking : {"taylor", "sorted"}
        "taylor" follows branches through crossings by a second-order
        prediction and optimal assignment; "sorted" keeps the ascending
        order (branches then bounce off each other at crossings).

    Returns
    -------
    list of CriticalCurve
        The curve carrying the largest eigenvalue comes first.
    """
    A = as_matrix(A)
    if n_theta < 16:
        raise InvalidInputError("n_theta must be at least 16")
    if branch_tracking not in ("taylor", "sorted"):
        raise InvalidInputError(f"unknown branch tracking {branch_tracking!r}")
    n = A.shape[0]
    pencil = _Pencil(A)
    theta0 = _base_angle(A)
    steps = max(8, n_theta // 2)
    thetas = theta0 + np.pi * np.arange(steps + 1) / steps
    vals = eig_sweep(A, thetas)
    rho = max(1.0, float(np.max(np.abs(vals))))
    degen = _gaps(vals) < 1e-7 * rho
    if branch_tracking == "taylor":
        br = _track(pencil, thetas, vals, degen)
    else:
        br = vals.copy()
    d1, d2 = pencil.slopes(thetas, br)
    bdeg = ~np.isfinite(d1) | (_gaps_tracked(br) < 1e-7 * rho)
    if bdeg.any():
        warnings.warn("critical curve passes through eigenvalue crossings; "
                      "derivatives there use finite differences",
                      DegenerateBranchWarning, stacklevel=2)
        d1, d2 = _fill_fd(thetas, br, d1, d2, bdeg)

    # branch b continues after a half-turn as branch sigma(b), negated
    tol = coincidence_tol(vals[0])
    sigma = []
    for b in range(n):
        i = int(np.argmin(np.abs(vals[0] + br[-1, b])))
        if abs(vals[0][i] + br[-1, b]) > max(tol, 1e-6 * rho):
            i = b
        sigma.append(i)
    seen = set()
    cycles = []
    for b in range(n - 1, -1, -1):
        if b in seen:
            continue
        cyc = [b]
        seen.add(b)
        nxt = sigma[b]
        while nxt not in seen:
            cyc.append(nxt)
            seen.add(nxt)
            nxt = sigma[nxt]
        cycles.append(cyc)

    curves = []
    for cyc in cycles:
        th_parts, lam_parts, d1_parts, deg_parts, cusp_th, cusp_z = [], [], [], [], [], []
        for p, b in enumerate(cyc):
            sl = slice(0, steps) if p < len(cyc) - 1 else slice(0, steps + 1)
            shift = p * np.pi
            th_parts.append(thetas[sl] + shift)
            # labels shift by pi; the z values are unchanged because both
            # exp(i theta) and the branch change sign
            lam_parts.append(br[sl, b] * (-1) ** p)
            d1_parts.append(d1[sl, b] * (-1) ** p)
            deg_parts.append(bdeg[sl, b])
            for t in _cusps(A, pencil, thetas, br[:, b], d1[:, b], d2[:, b], bdeg[:, b], rho):
                cusp_th.append(t[0] + shift)
                cusp_z.append(t[1])
        th = np.concatenate(th_parts)
        lam = np.concatenate(lam_parts)
        dl = np.concatenate(d1_parts)
        z = np.exp(1j * th) * (lam + 1j * dl)
        curves.append(CriticalCurve(tuple(cyc), th, lam, dl, z, np.array(cusp_th),
                                    np.array(cusp_z, dtype=complex),
                                    np.concatenate(deg_parts)))
    return curves


def _gaps_tracked(br):
    s = np.sort(br, axis=1)
    g = _gaps(s)
    idx = np.argsort(np.argsort(br, axis=1), axis=1)
    return np.take_along_axis(g, idx, axis=1)


def _fill_fd(thetas, br, d1, d2, bad):
    g1 = np.gradient(br, thetas, axis=0)
    g2 = np.gradient(g1, thetas, axis=0)
    return np.where(bad, g1, d1), np.where(bad, g2, d2)


def _cusps(A, pencil, thetas, lam, d1, d2, bad, rho):
    """Cusps of one branch: roots of lam + lam'' located by sign changes."""
    g = lam + d2
    ok = np.isfinite(g) & ~bad
    out = []

    def g_at(t, guess):
        v = hermitian_eigenvalues(hermitian_part(A, t))
        lv = v[np.argmin(np.abs(v - guess))]
        _, s2 = pencil.slopes(np.array([t]), np.array([[lv]]))
        return lv + s2[0, 0], lv

    for i in range(len(g) - 1):
        if not (ok[i] and ok[i + 1]) or np.sign(g[i]) == np.sign(g[i + 1]):
            continue
        a, b = thetas[i], thetas[i + 1]
        la, lb = lam[i], lam[i + 1]

        def f(t):
            guess = la + (lb - la) * (t - a) / (b - a)
            return g_at(t, guess)[0]

        try:
            t = brentq(f, a, b, xtol=1e-13)
        except ValueError:
            continue
        guess = la + (lb - la) * (t - a) / (b - a)
        val, lv = g_at(t, guess)
        if not abs(val) < 1e-6 * rho:
            continue  # a pole of lam'' at a crossing, not a cusp
        s1, _ = pencil.slopes(np.array([t]), np.array([[lv]]))
        out.append((t, complex(np.exp(1j * t) * (lv + 1j * s1[0, 0]))))
    return out
