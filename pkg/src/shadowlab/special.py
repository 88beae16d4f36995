"""Small numerical helpers: a 2F1 power series and pole expansions."""

import math

import numpy as np

from .errors import InvalidInputError

__all__ = ["hyp2f1_series", "gauss_sum", "pole_expansion", "reassemble_poles"]


def hyp2f1_series(a, b, c, z, rtol=1e-16, max_terms=100_000):
    """Gauss hypergeometric series sum (a)_j (b)_j / ((c)_j j!) z^j.

    Summation stops once every term falls below ``rtol`` times the partial
    sum, or after ``max_terms`` terms.  Intended for |z| < 1; convergence is
    slow as z -> 1 when c - a - b is small.
    """
    z = np.asarray(z, dtype=float)
    total = np.ones_like(z)
    term = np.ones_like(z)
    live = np.ones(z.shape, dtype=bool)
    for j in range(max_terms):
        term = term * ((a + j) * (b + j) / ((c + j) * (j + 1.0))) * z
        total = total + np.where(live, term, 0.0)
        live &= np.abs(term) >= rtol * np.abs(total)
        if not live.any():
            break
    return total


def gauss_sum(a, b, c):
    """2F1(a, b; c; 1) = G(c) G(c-a-b) / (G(c-a) G(c-b)) for c - a - b > 0."""
    if c - a - b <= 0:
        raise InvalidInputError("Gauss sum needs c - a - b > 0")
    return math.exp(math.lgamma(c) + math.lgamma(c - a - b)
                    - math.lgamma(c - a) - math.lgamma(c - b))


def pole_expansion(roots, mults):
    """Partial fractions of prod_i (1 - u r_i)^(-m_i) in the variable u.

    Parameters
    ----------
    roots : sequence of distinct non-zero numbers r_i
    mults : sequence of positive integers m_i

    Returns
    -------
    list of ndarray
        ``out[i][q - 1]`` is the coefficient of (1 - u r_i)^(-q),
        q = 1..m_i.

    Notes
    -----
    Near the pole of factor i put y = 1 - u r_i.  Every other factor is a
    power series in y,

        (1 - u r_l)^(-m) = (1 - rho)^(-m) (1 + rho / (1 - rho) y)^(-m),
        rho = r_l / r_i,

    and the coefficient of y^j in their product multiplies
    (1 - u r_i)^(j - m_i).
    """
    roots = [complex(r) for r in roots]
    mults = [int(m) for m in mults]
    if len(roots) != len(mults):
        raise InvalidInputError("roots and multiplicities differ in length")
    if any(m < 1 for m in mults):
        raise InvalidInputError("multiplicities must be positive")
    if any(r == 0 for r in roots):
        raise InvalidInputError("roots must be non-zero")
    for i in range(len(roots)):
        for j in range(i):
            if roots[i] == roots[j]:
                raise InvalidInputError("roots must be distinct")
    out = []
    for i, (ri, mi) in enumerate(zip(roots, mults)):
        series = np.zeros(mi, dtype=np.complex128)
        series[0] = 1.0
        for l, (rl, ml) in enumerate(zip(roots, mults)):
            if l == i:
                continue
            rho = rl / ri
            g = rho / (1 - rho)
            f = np.array([(-1) ** q * math.comb(ml + q - 1, q) * g ** q
                          for q in range(mi)], dtype=np.complex128)
            series = np.convolve(series, f)[:mi] * (1 - rho) ** (-ml)
        # coefficient of y^j sits on (1 - u r_i)^(-(m_i - j))
        out.append(series[::-1].copy())
    if all(r.imag == 0 for r in roots):
        out = [o.real.copy() for o in out]
    return out


def reassemble_poles(roots, coeffs, u):
    """Evaluate sum_i sum_q coeffs[i][q-1] (1 - u r_i)^(-q)."""
    u = np.asarray(u)
    total = np.zeros(u.shape, dtype=np.result_type(u, np.asarray(coeffs[0]), float))
    for r, cs in zip(roots, coeffs):
        base = 1.0 - u * r
        for q, cq in enumerate(cs, start=1):
            total = total + cq * base ** (-q)
    return total
