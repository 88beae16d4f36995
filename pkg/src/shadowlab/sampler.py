"""Monte Carlo samples of numerical shadows.

A shadow sample is z = (Mu, u) for a random unit vector u.  Uniform
complex unit vectors come from normalized complex Gaussians, real ones
from real Gaussians.  For normal matrices the squared moduli of the
coordinates are uniform on the simplex, so the shadow of diag(lambda) is
the image of the uniform simplex under r -> sum r_k lambda_k.

Samples are drawn in fixed-size chunks, each with its own Philox stream
keyed by (seed, chunk index), so results do not depend on the number of
threads.
"""

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import stats

from .errors import InvalidInputError
from .matrix import as_matrix

__all__ = [
    "VECTOR_KINDS",
    "DEFAULT_SEED",
    "ShadowSamples",
    "Grid2D",
    "matrix_hash",
    "chunk_rng",
    "random_unit_vector",
    "sample_shadow",
    "sample_normal_shadow",
    "histogram",
    "EnergyTest",
    "energy_test",
]

VECTOR_KINDS = ("complex_uniform", "real_uniform", "simplex")
DEFAULT_SEED = 20110101
CHUNK = 1 << 16


def matrix_hash(M):
    """SHA-256 digest of the shape and complex128 bytes of a matrix."""
    M = np.ascontiguousarray(np.asarray(M, dtype=np.complex128))
    h = hashlib.sha256()
    h.update(repr(M.shape).encode())
    h.update(M.tobytes())
    return h.hexdigest()


def chunk_rng(seed, chunk):
    """Independent Philox generator for one chunk of one run."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), int(chunk)])))


@dataclass(frozen=True)
class ShadowSamples:
    """Points z = (Mu, u) together with how they were drawn."""

    points: np.ndarray
    vector_kind: str
    seed: int
    matrix_hash: str

    def __len__(self):
        return len(self.points)


def random_unit_vector(n, kind="complex_uniform", rng=None):
    """One random unit vector in C^n.

    Parameters
    ----------
    n : int
    kind : {"complex_uniform", "real_uniform", "simplex"}
        "simplex" returns the non-negative vector sqrt(r) with r uniform
        on the probability simplex.
    rng : numpy Generator, optional
    """
    if n < 1:
        raise InvalidInputError("dimension must be at least 1")
    if kind not in VECTOR_KINDS:
        raise InvalidInputError(f"unknown vector kind {kind!r}")
    rng = np.random.default_rng() if rng is None else rng
    if kind == "complex_uniform":
        u = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    elif kind == "real_uniform":
        u = rng.standard_normal(n).astype(complex)
    else:
        e = rng.standard_exponential(n)
        u = np.sqrt(e / e.sum()).astype(complex)
    return u / np.linalg.norm(u)


def _chunk_points(M, kind, seed, idx, size):
    rng = chunk_rng(seed, idx)
    n = M.shape[0]
    if kind == "simplex":
        lam = np.diag(M)
        e = rng.standard_exponential((size, n))
        return np.sum(e * lam, axis=1) / np.sum(e, axis=1)
    if kind == "complex_uniform":
        u = rng.standard_normal((size, n)) + 1j * rng.standard_normal((size, n))
    else:
        u = rng.standard_normal((size, n)) + 0j
    # real arithmetic with separate products (no fused multiply-add), so
    # that M = I reproduces u bit for bit and the quotient is exactly 1
    ur, ui = u.real, u.imag
    vr = np.zeros_like(ur)
    vi = np.zeros_like(ur)
    for j in range(n):
        mr, mi = M[:, j].real, M[:, j].imag
        vr += ur[:, j:j + 1] * mr - ui[:, j:j + 1] * mi
        vi += ur[:, j:j + 1] * mi + ui[:, j:j + 1] * mr
    den = np.sum(ur * ur + ui * ui, axis=1)
    re = np.sum(ur * vr + ui * vi, axis=1)
    im = np.sum(ur * vi - ui * vr, axis=1)
    return (re / den) + 1j * (im / den)


def _run_chunks(fn, count, threads):
    sizes = [CHUNK] * (count // CHUNK)
    if count % CHUNK:
        sizes.append(count % CHUNK)
    jobs = list(enumerate(sizes))
    if threads is None or threads <= 1 or len(jobs) == 1:
        parts = [fn(i, s) for i, s in jobs]
    else:
        with ThreadPoolExecutor(max_workers=int(threads)) as ex:
            parts = list(ex.map(lambda js: fn(*js), jobs))
    return np.concatenate(parts)


def _check_count(count):
    count = int(count)
    if count < 1:
        raise InvalidInputError("count must be at least 1")
    return count


def sample_shadow(M, count, kind="complex_uniform", seed=DEFAULT_SEED, threads=None):
    """Draw ``count`` points of the shadow of M.

    Parameters
    ----------
    M : (N, N) array_like
    count : int
    kind : {"complex_uniform", "real_uniform", "simplex"}
        "simplex" is the exact shortcut for diagonal M.
    seed : int
    threads : int, optional
        Number of worker threads; the output does not depend on it.

    Returns
    -------
    ShadowSamples
    """
    M = as_matrix(M)
    count = _check_count(count)
    if kind not in VECTOR_KINDS:
        raise InvalidInputError(f"unknown vector kind {kind!r}")
    if kind == "simplex" and np.any(M != np.diag(np.diag(M))):
        raise InvalidInputError("simplex sampling needs a diagonal matrix")
    pts = _run_chunks(lambda i, s: _chunk_points(M, kind, seed, i, s), count, threads)
    return ShadowSamples(pts, kind, int(seed), matrix_hash(M))


def sample_normal_shadow(eigenvalues, count, seed=DEFAULT_SEED, threads=None):
    """Shadow of a normal matrix with the given eigenvalues.

    Draws r uniformly on the simplex and emits sum r_k lambda_k, written
    as lambda_1 + sum r_k (lambda_k - lambda_1) so that equal eigenvalues
    give exact points.
    """
    lam = np.atleast_1d(np.asarray(eigenvalues, dtype=np.complex128))
    if lam.ndim != 1 or lam.size == 0:
        raise InvalidInputError("need a non-empty list of eigenvalues")
    if not np.all(np.isfinite(lam)):
        raise InvalidInputError("eigenvalues must be finite")
    count = _check_count(count)
    c = lam[0]
    d = lam - c

    def chunk(i, s):
        e = chunk_rng(seed, i).standard_exponential((s, lam.size))
        return c + np.sum(e * d, axis=1) / np.sum(e, axis=1)

    pts = _run_chunks(chunk, count, threads)
    return ShadowSamples(pts, "simplex", int(seed), matrix_hash(np.diag(lam)))


# ---------------------------------------------------------------------------
# rasters

@dataclass(frozen=True)
class Grid2D:
    """Rectangular raster; ``values[i, j]`` belongs to the cell with centre
    origin + (i + 1/2) dx + 1j (j + 1/2) dy.

    Attributes
    ----------
    origin : complex
        Lower-left corner.
    dx, dy : float
    values : ndarray, shape (nx, ny)
    normalization : {"counts", "density", "partial_sum"}
        "partial_sum" marks signed rasters such as truncated expansions.
    overflow : int
        Points that fell outside the box (histograms only).
    """

    origin: complex
    dx: float
    dy: float
    values: np.ndarray
    normalization: str = "density"
    overflow: int = 0

    @property
    def nx(self):
        return self.values.shape[0]

    @property
    def ny(self):
        return self.values.shape[1]

    @property
    def box(self):
        x0, y0 = self.origin.real, self.origin.imag
        return (x0, x0 + self.nx * self.dx, y0, y0 + self.ny * self.dy)

    def centers(self):
        """Complex cell centres, shape (nx, ny)."""
        x = self.origin.real + (np.arange(self.nx) + 0.5) * self.dx
        y = self.origin.imag + (np.arange(self.ny) + 0.5) * self.dy
        return x[:, None] + 1j * y[None, :]

    def mass(self):
        """sum(values) dx dy."""
        return float(self.values.sum() * self.dx * self.dy)

    def same_geometry(self, other, rtol=1e-12):
        return (self.values.shape == other.values.shape
                and np.isclose(self.dx, other.dx, rtol=rtol, atol=0)
                and np.isclose(self.dy, other.dy, rtol=rtol, atol=0)
                and abs(self.origin - other.origin) <= rtol * max(1.0, abs(self.origin)))

    def as_density(self):
        """Counts divided by total count and cell area."""
        if self.normalization != "counts":
            return self
        total = self.values.sum() + self.overflow
        v = self.values / (total * self.dx * self.dy) if total else self.values * 0.0
        return Grid2D(self.origin, self.dx, self.dy, v, "density", self.overflow)


def _default_box(points, matrix=None, pad=0.02):
    if matrix is not None:
        from .geometry import numerical_range_boundary

        reg = numerical_range_boundary(matrix, 256)
        v = reg.vertices
    else:
        v = np.asarray(points)
    x0, x1 = float(v.real.min()), float(v.real.max())
    y0, y1 = float(v.imag.min()), float(v.imag.max())
    w = max(x1 - x0, y1 - y0, 1e-12)
    # degenerate extents (segments, points) get a band of the other width
    if x1 - x0 < 1e-9 * w or x1 == x0:
        x0, x1 = x0 - 0.5 * w, x1 + 0.5 * w
    if y1 - y0 < 1e-9 * w or y1 == y0:
        y0, y1 = y0 - 0.5 * w, y1 + 0.5 * w
    px, py = pad * (x1 - x0), pad * (y1 - y0)
    return (x0 - px, x1 + px, y0 - py, y1 + py)


def histogram(samples, box=None, nx=100, ny=100, normalization="counts", matrix=None):
    """Bin shadow samples into an nx x ny raster.

    Parameters
    ----------
    samples : ShadowSamples or array of complex
    box : (xmin, xmax, ymin, ymax), optional
        Defaults to the bounding box of W(matrix) (or of the points)
        padded by 2%.
    normalization : {"counts", "density"}

    Points outside the box are counted in ``overflow``; points on the
    upper edges go to the last cells.
    """
    pts = samples.points if isinstance(samples, ShadowSamples) else np.asarray(samples, complex)
    if normalization not in ("counts", "density"):
        raise InvalidInputError(f"unknown normalization {normalization!r}")
    nx, ny = int(nx), int(ny)
    if nx < 1 or ny < 1:
        raise InvalidInputError("nx and ny must be positive")
    if box is None:
        box = _default_box(pts, matrix)
    x0, x1, y0, y1 = (float(b) for b in box)
    if not (x1 > x0 and y1 > y0):
        raise InvalidInputError("histogram box has zero area")
    dx, dy = (x1 - x0) / nx, (y1 - y0) / ny
    x, y = pts.real, pts.imag
    inside = (x >= x0) & (x <= x1) & (y >= y0) & (y <= y1)
    ix = np.minimum(((x[inside] - x0) / dx).astype(np.int64), nx - 1)
    iy = np.minimum(((y[inside] - y0) / dy).astype(np.int64), ny - 1)
    counts = np.bincount(ix * ny + iy, minlength=nx * ny).reshape(nx, ny).astype(float)
    grid = Grid2D(complex(x0, y0), dx, dy, counts, "counts", int(pts.size - inside.sum()))
    return grid.as_density() if normalization == "density" else grid


# ---------------------------------------------------------------------------
# two-sample test

@dataclass(frozen=True)
class EnergyTest:
    """Two-sample energy statistic and its permutation p-value."""

    statistic: float
    p_value: float
    null_mean: float
    null_sd: float
    n_perm: int


def _energy_1d(order_labels, gaps, wx, wy):
    # F - G on every gap between consecutive pooled points
    diff = np.cumsum(np.where(order_labels, wx, -wy), axis=-1)[..., :-1]
    return 2.0 * np.sum(diff * diff * gaps, axis=-1)


def energy_test(X, Y, n_proj=16, n_perm=199, seed=0):
    """Two-sample test of equal distribution for planar point sets.

    The statistic averages the one-dimensional energy distance
    2 int (F - G)^2 over ``n_proj`` equally spaced projection directions.
    Its null distribution comes from ``n_perm`` label permutations; the
    p-value is the upper tail of a gamma law matched to the permutation
    mean and variance, which resolves p-values below 1 / n_perm.
    """
    X = np.asarray(X.points if isinstance(X, ShadowSamples) else X, dtype=complex)
    Y = np.asarray(Y.points if isinstance(Y, ShadowSamples) else Y, dtype=complex)
    if X.size < 2 or Y.size < 2:
        raise InvalidInputError("each sample needs at least two points")
    pooled = np.concatenate([X, Y])
    nx, ny = X.size, Y.size
    wx, wy = 1.0 / nx, 1.0 / ny
    rng = np.random.default_rng(seed)
    labels = np.zeros(nx + ny, dtype=bool)
    labels[:nx] = True
    dirs = np.exp(1j * np.pi * np.arange(n_proj) / n_proj)
    orders, gaps = [], []
    for d in dirs:
        proj = (np.conj(d) * pooled).real
        o = np.argsort(proj, kind="stable")
        orders.append(o)
        gaps.append(np.diff(proj[o]))
    orders = np.array(orders)
    gaps = np.array(gaps)

    def stat(lab):
        return float(np.mean(_energy_1d(lab[orders], gaps, wx, wy)))

    obs = stat(labels)
    null = np.array([stat(rng.permutation(labels)) for _ in range(n_perm)])
    mean, var = float(null.mean()), float(null.var(ddof=1))
    if var <= 0:
        p = 1.0 if obs <= mean else 0.0
    else:
        shape = mean * mean / var
        p = float(stats.gamma.sf(obs, shape, scale=var / mean))
    return EnergyTest(obs, p, mean, var ** 0.5, n_perm)
