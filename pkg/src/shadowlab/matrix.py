"""Complex matrices, Hermitian eigenvalues and the polynomial det(I - sA - tA*).

Every matrix handled by the package is a dense ``complex128`` numpy array.
Hermitian eigenvalues are computed with a cyclic Jacobi iteration on the
real symmetric embedding, which also works on stacks of matrices so that
angular sweeps run as one batched computation.
"""

import json
import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError

__all__ = [
    "as_matrix",
    "as_hermitian",
    "adjoint",
    "hermitian_part",
    "jordan",
    "coincidence_tol",
    "hermitian_eigenvalues",
    "hermitian_eigh",
    "BivariatePoly",
    "xi_poly",
    "xi_shifted",
    "trace_word",
    "parse_matrix",
    "matrix_to_json",
    "read_matrix",
    "write_matrix",
]


def as_matrix(A):
    """Return `A` as a square, finite ``complex128`` array.

    Raises
    ------
    InvalidInputError
        If `A` is not a non-empty square 2-D array of finite numbers.
    """
    try:
        M = np.array(A, dtype=np.complex128)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"cannot interpret matrix: {exc}") from None
    if M.ndim == 0:
        M = M.reshape(1, 1)
    if M.ndim != 2 or M.shape[0] != M.shape[1] or M.shape[0] == 0:
        raise InvalidInputError(f"expected a non-empty square matrix, got shape {M.shape}")
    if not np.all(np.isfinite(M)):
        raise InvalidInputError("matrix has non-finite entries")
    return M


def adjoint(A):
    """Conjugate transpose."""
    return np.conj(np.swapaxes(A, -1, -2))


def as_hermitian(H, tol=1e-12):
    """Validate and exactly symmetrize a Hermitian matrix (or stack)."""
    H = np.asarray(H, dtype=np.complex128)
    if H.ndim < 2 or H.shape[-1] != H.shape[-2] or H.shape[-1] == 0:
        raise InvalidInputError(f"expected square matrices, got shape {H.shape}")
    if not np.all(np.isfinite(H)):
        raise InvalidInputError("matrix has non-finite entries")
    Hs = adjoint(H)
    scale = max(1.0, float(np.max(np.abs(H))))
    if np.max(np.abs(H - Hs)) > tol * scale:
        raise InvalidInputError("matrix is not Hermitian")
    return 0.5 * (H + Hs)


def hermitian_part(A, theta=0.0):
    """Re(exp(-i theta) A) = (exp(-i theta) A + exp(i theta) A*) / 2.

    `theta` may be an array, in which case a stack of matrices is returned
    with the angle axis first.
    """
    A = np.asarray(A, dtype=np.complex128)
    theta = np.asarray(theta, dtype=float)
    w = np.exp(-1j * theta)[..., None, None]
    B = w * A
    return 0.5 * (B + adjoint(B))


def jordan(n):
    """Nilpotent Jordan block with ones on the superdiagonal."""
    if n < 1:
        raise InvalidInputError("dimension must be positive")
    return np.eye(n, k=1, dtype=np.complex128)


def coincidence_tol(values):
    """Tolerance under which two eigenvalues are treated as equal."""
    rho = float(np.max(np.abs(values))) if np.size(values) else 0.0
    return 1e-8 * max(1.0, rho)


# ---------------------------------------------------------------------------
# Jacobi eigensolver

def _jacobi(S, want_vectors=False, max_sweeps=60):
    """Cyclic Jacobi on a stack of real symmetric matrices of shape (B, n, n)."""
    S = np.array(S, dtype=float)
    nb, n, _ = S.shape
    V = np.tile(np.eye(n), (nb, 1, 1)) if want_vectors else None
    total = np.sum(S * S, axis=(1, 2))
    thresh = (4 * np.finfo(float).eps) ** 2 * total
    tiny = np.finfo(float).tiny
    iu = np.triu_indices(n, 1)
    for _ in range(max_sweeps):
        upper = S[:, iu[0], iu[1]]
        off = 2.0 * np.sum(upper * upper, axis=1)
        if np.all(off <= thresh):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = S[:, p, q]
                active = np.abs(apq) > tiny
                if not np.any(active):
                    continue
                app = S[:, p, p]
                aqq = S[:, q, q]
                safe = np.where(active, apq, 1.0)
                theta = (aqq - app) / (2.0 * safe)
                big = np.abs(theta) > 1e150
                tb = np.where(big, 1.0, theta)
                t = np.sign(tb) / (np.abs(tb) + np.hypot(tb, 1.0))
                # t ~ 1 / (2 theta) once theta^2 would overflow
                t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
                t[theta == 0] = 1.0
                t = np.where(active, t, 0.0)
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                cc = c[:, None]
                ss = s[:, None]
                Sp = S[:, :, p].copy()
                Sq = S[:, :, q]
                S[:, :, p] = cc * Sp - ss * Sq
                S[:, :, q] = ss * Sp + cc * Sq
                Rp = S[:, p, :].copy()
                Rq = S[:, q, :]
                S[:, p, :] = cc * Rp - ss * Rq
                S[:, q, :] = ss * Rp + cc * Rq
                S[:, p, q] = 0.0
                S[:, q, p] = 0.0
                if want_vectors:
                    Vp = V[:, :, p].copy()
                    Vq = V[:, :, q]
                    V[:, :, p] = cc * Vp - ss * Vq
                    V[:, :, q] = ss * Vp + cc * Vq
    return np.diagonal(S, axis1=1, axis2=2).copy(), V


def _embed(H):
    P = H.real
    Q = H.imag
    top = np.concatenate([P, -Q], axis=-1)
    bottom = np.concatenate([Q, P], axis=-1)
    return np.concatenate([top, bottom], axis=-2)


def hermitian_eigenvalues(H):
    """Ascending eigenvalues of a Hermitian matrix or a stack of them.

    The N x N matrix P + iQ is embedded as the real symmetric matrix
    [[P, -Q], [Q, P]], whose spectrum is that of H with every value
    doubled.  Pairs of the sorted doubled spectrum are averaged.

    Parameters
    ----------
    H : array_like, shape (..., N, N)

    Returns
    -------
    ndarray, shape (..., N)
    """
    H = as_hermitian(H)
    shape = H.shape[:-2]
    n = H.shape[-1]
    S = _embed(H.reshape(-1, n, n))
    d, _ = _jacobi(S)
    d.sort(axis=1)
    vals = 0.5 * (d[:, 0::2] + d[:, 1::2])
    return vals.reshape(shape + (n,))


def hermitian_eigh(H):
    """Eigenvalues and orthonormal eigenvectors of a single Hermitian matrix.

    Returns
    -------
    values : ndarray, shape (N,)
    vectors : ndarray, shape (N, N)
        Column ``j`` is a unit eigenvector for ``values[j]``.
    """
    H = as_hermitian(H)
    if H.ndim != 2:
        raise InvalidInputError("hermitian_eigh takes a single matrix")
    n = H.shape[0]
    d, V = _jacobi(_embed(H)[None], want_vectors=True)
    d = d[0]
    V = V[0]
    order = np.argsort(d)
    d = d[order]
    V = V[:, order]
    vals = 0.5 * (d[0::2] + d[1::2])
    W = V[:n] + 1j * V[n:]
    vecs = np.empty((n, n), dtype=np.complex128)
    tol = coincidence_tol(vals)
    i = 0
    while i < n:
        j = i + 1
        while j < n and vals[j] - vals[i] <= tol:
            j += 1
        # the 2m real columns span an m-dimensional complex eigenspace
        block = W[:, 2 * i:2 * j]
        U, _, _ = np.linalg.svd(block, full_matrices=False)
        vecs[:, i:j] = U[:, :j - i]
        i = j
    return vals, vecs


# ---------------------------------------------------------------------------
# xi polynomial

@dataclass(frozen=True)
class BivariatePoly:
    """Polynomial sum_{j,k} coeffs[j, k] s**j t**k tied to an N x N matrix.

    Attributes
    ----------
    n : int
        Dimension N of the source matrix (the total degree is at most N).
    coeffs : ndarray, shape (N+1, N+1)
    """

    n: int
    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=np.complex128)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self):
        return self.n

    def __call__(self, s, t):
        s = np.asarray(s, dtype=np.complex128)
        t = np.asarray(t, dtype=np.complex128)
        return np.polynomial.polynomial.polyval2d(s, t, self.coeffs)

    def coefficient(self, j, k):
        if j < 0 or k < 0 or j > self.n or k > self.n:
            return 0j
        return complex(self.coeffs[j, k])


def _row_sum_norm(A):
    return float(np.max(np.sum(np.abs(A), axis=1)))


def xi_poly(A):
    """Coefficients of xi_A(s, t) = det(I - sA - tA*).

    The determinant is sampled on the (N+1) x (N+1) torus grid of roots of
    unity after scaling A to unit row-sum norm, and the coefficients are
    recovered with a 2-D FFT.  Coefficients of total degree above N are
    zeroed and conjugate symmetry is imposed exactly.
    """
    A = as_matrix(A)
    n = A.shape[0]
    coeffs = np.zeros((n + 1, n + 1), dtype=np.complex128)
    scale = _row_sum_norm(A)
    if scale == 0.0:
        coeffs[0, 0] = 1.0
        return BivariatePoly(n, coeffs)
    B = A / scale
    Bs = B.conj().T
    K = n + 1
    w = np.exp(2j * np.pi * np.arange(K) / K)
    eye = np.eye(n)
    vals = np.empty((K, K), dtype=np.complex128)
    for a in range(K):
        M = eye - w[a] * B - w[:, None, None] * Bs
        vals[a] = np.linalg.det(M)
    c = np.fft.fft2(vals) / (K * K)
    jj, kk = np.indices((K, K))
    c = np.where(jj + kk <= n, c, 0.0)
    c = c * scale ** (jj + kk)
    c = 0.5 * (c + c.conj().T)
    c[0, 0] = 1.0
    return BivariatePoly(n, c)


def _multinomial_table(m, c):
    """Coefficients of (1 + s c + t conj(c))**m as an (m+1) x (m+1) array."""
    out = np.zeros((m + 1, m + 1), dtype=np.complex128)
    cb = np.conj(c)
    for a in range(m + 1):
        for b in range(m + 1 - a):
            out[a, b] = math.comb(m, a) * math.comb(m - a, b) * c ** a * cb ** b
    return out


def xi_shifted(xi, c):
    """Polynomial of the shifted matrix A - cI computed from xi_A alone.

    Uses xi_{A-cI}(s,t) = sum_{jk} a_jk s^j t^k (1 + sc + t conj(c))^(N-j-k).
    """
    c = complex(c)
    n = xi.n
    if c == 0:
        return BivariatePoly(n, xi.coeffs.copy())
    tables = [_multinomial_table(m, c) for m in range(n + 1)]
    out = np.zeros((n + 1, n + 1), dtype=np.complex128)
    a = xi.coeffs
    for j in range(n + 1):
        for k in range(n + 1 - j):
            if a[j, k] == 0:
                continue
            m = n - j - k
            out[j:j + m + 1, k:k + m + 1] += a[j, k] * tables[m]
    out = 0.5 * (out + out.conj().T)
    out[0, 0] = 1.0
    return BivariatePoly(n, out)


_TOKEN = re.compile(r"\s*(X\*|Xstar|X)\s*,?")


def _parse_word(word):
    if isinstance(word, str):
        tokens = []
        pos = 0
        while pos < len(word):
            m = _TOKEN.match(word, pos)
            if m is None or m.end() == pos:
                raise InvalidInputError(f"bad word {word!r}")
            tokens.append(m.group(1))
            pos = m.end()
    else:
        tokens = list(word)
    out = []
    for tok in tokens:
        if tok in ("X", 0, False):
            out.append(False)
        elif tok in ("X*", "Xstar", 1, True):
            out.append(True)
        else:
            raise InvalidInputError(f"unknown letter {tok!r}")
    if not out:
        raise InvalidInputError("word must be non-empty")
    return out


def trace_word(A, word):
    """Trace of the product spelled by `word` in the letters X = A, X* = A*.

    `word` is either a string such as ``"XX*X"`` or a sequence of the
    tokens ``"X"`` and ``"X*"`` (``"Xstar"`` is accepted as well).
    """
    A = as_matrix(A)
    As = A.conj().T
    P = np.eye(A.shape[0], dtype=np.complex128)
    for star in _parse_word(word):
        P = P @ (As if star else A)
    return complex(np.trace(P))


# ---------------------------------------------------------------------------
# JSON matrix files

def parse_matrix(obj):
    """Build a matrix from ``{"n": N, "entries": [[re, im], ...]}``."""
    if not isinstance(obj, dict) or "n" not in obj or "entries" not in obj:
        raise InvalidInputError('matrix JSON must have keys "n" and "entries"')
    n = obj["n"]
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise InvalidInputError('"n" must be a positive integer')
    entries = obj["entries"]
    if not isinstance(entries, list) or len(entries) != n * n:
        raise InvalidInputError(f'"entries" must list exactly {n * n} [re, im] pairs')
    vals = []
    for e in entries:
        if (not isinstance(e, (list, tuple)) or len(e) != 2
                or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in e)):
            raise InvalidInputError("each entry must be a [re, im] pair of numbers")
        vals.append(complex(e[0], e[1]))
    return as_matrix(np.array(vals).reshape(n, n))


def matrix_to_json(A):
    A = as_matrix(A)
    return {"n": A.shape[0],
            "entries": [[float(z.real), float(z.imag)] for z in A.ravel()]}


def read_matrix(path):
    try:
        with open(path) as fh:
            obj = json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"malformed JSON in {path}: {exc}") from None
    return parse_matrix(obj)


def write_matrix(path, A):
    with open(path, "w") as fh:
        json.dump(matrix_to_json(A), fh)
        fh.write("\n")
