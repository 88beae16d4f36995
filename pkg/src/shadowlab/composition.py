"""Shadows of block-diagonal matrices A + B (direct sums).

Split a uniform unit vector of C^(n+m) as v1 + v2 with v1 in C^n.  Then
t = |v1|^2 has the Beta(n, m) density

    q(t) = (n+m-1)! / ((n-1)! (m-1)!) t^(n-1) (1-t)^(m-1),

and given t the shadow point is t z_A + (1 - t) z_B with z_A, z_B
independent shadow points of A and B.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import roots_jacobi

from .errors import InvalidInputError
from .sampler import DEFAULT_SEED, Grid2D, ShadowSamples, chunk_rng

__all__ = ["DEFAULT_T_NODES", "BetaMixture", "direct_sum_sample", "direct_sum_density_grid"]


@dataclass(frozen=True)
class BetaMixture:
    """Mixing law of t = |v1|^2 for block sizes n and m."""

    n: int
    m: int

    def __post_init__(self):
        if int(self.n) != self.n or int(self.m) != self.m or self.n < 1 or self.m < 1:
            raise InvalidInputError("block sizes must be positive integers")

    @property
    def normalizer(self):
        return math.factorial(self.n + self.m - 1) // (
            math.factorial(self.n - 1) * math.factorial(self.m - 1))

    def pdf(self, t):
        t = np.asarray(t, dtype=float)
        out = self.normalizer * t ** (self.n - 1) * (1 - t) ** (self.m - 1)
        return np.where((t >= 0) & (t <= 1), out, 0.0)

    def nodes(self, k=32):
        """Gauss-Jacobi nodes t_i and weights w_i with sum w_i g(t_i) ~ E g(t)."""
        # weight (1-x)^(m-1) (1+x)^(n-1) on [-1, 1] with t = (1 + x) / 2
        x, w = roots_jacobi(int(k), self.m - 1, self.n - 1)
        return (1 + x) / 2, w / w.sum()

    def sample(self, size, rng):
        return rng.beta(self.n, self.m, size)


def direct_sum_sample(samples_a, samples_b, n, m, seed=DEFAULT_SEED, count=None):
    """Shadow samples of A + B (block diagonal) from samples of A and B.

    Each output point is t z_A + (1-t) z_B with t ~ Beta(n, m) and z_A, z_B
    drawn with replacement from the inputs.
    """
    za = samples_a.points if isinstance(samples_a, ShadowSamples) else np.asarray(samples_a, complex)
    zb = samples_b.points if isinstance(samples_b, ShadowSamples) else np.asarray(samples_b, complex)
    if za.size == 0 or zb.size == 0:
        raise InvalidInputError("both sample sets must be non-empty")
    mix = BetaMixture(n, m)
    count = za.size if count is None else int(count)
    rng = chunk_rng(seed, 0)
    t = mix.sample(count, rng)
    ia = rng.integers(0, za.size, count)
    ib = rng.integers(0, zb.size, count)
    pts = t * za[ia] + (1 - t) * zb[ib]
    tag = "+".join(getattr(s, "matrix_hash", "") for s in (samples_a, samples_b))
    kind = samples_a.vector_kind if isinstance(samples_a, ShadowSamples) else "complex_uniform"
    return ShadowSamples(pts, kind, int(seed), tag)


def _scale_matrix(size, t):
    """Mass-conserving remap of cells scaled by t onto the unit lattice.

    Source cell i covers [t (i - 1/2), t (i + 1/2)] (in cell units) and
    hands each target cell k the fraction of its length that falls inside
    [k - 1/2, k + 1/2].
    """
    i = np.arange(size)
    if t < 1e-12:
        S = np.zeros((size, size))
        S[0, :] = 1.0
        return S
    lo = t * (i - 0.5)
    hi = t * (i + 0.5)
    k = np.arange(size)[:, None]
    overlap = np.clip(np.minimum(hi[None, :], k + 0.5) - np.maximum(lo[None, :], k - 0.5), 0, None)
    return overlap / t


def _masses(grid):
    if grid.normalization == "counts":
        grid = grid.as_density()
    v = np.clip(grid.values, 0.0, None) * grid.dx * grid.dy
    total = v.sum()
    if total <= 0:
        raise InvalidInputError("grid carries no mass")
    return v / total


DEFAULT_T_NODES = 256


def direct_sum_density_grid(pa, pb, n, m, t_nodes=DEFAULT_T_NODES, threads=None):
    """Density raster of the shadow of A + B from rasters of A and B.

    Both rasters must share origin, cell size and shape.  Nodes are
    processed in parallel and summed in a fixed order.  For each
    Gauss-Jacobi node t the mass of p_A is moved from the cell centre c to
    t c (and that of p_B to (1-t) c) by an overlap-weighted remap onto
    shifted lattices whose sums fall back onto the input cell centres; the two are
    convolved by FFT and the results are combined with the node weights.

    Each node smears a raster feature onto one ring, so a coarse t rule
    leaves ripples of a few cells in width.  With 32 nodes they reach 30%
    of the cell value; the default of 256 keeps them below Monte Carlo
    noise at 10^6 samples on a 121 x 121 raster.

    Returns
    -------
    Grid2D
        Density on the common geometry, total mass one.
    """
    if not pa.same_geometry(pb):
        raise InvalidInputError("grids differ in origin, cell size or shape")
    mix = BetaMixture(n, m)
    ma = _masses(pa)
    mb = _masses(pb)
    nx, ny = ma.shape
    ts, ws = mix.nodes(t_nodes)

    def node(t):
        sa = _scale_matrix(nx, t) @ ma @ _scale_matrix(ny, t).T
        sb = _scale_matrix(nx, 1 - t) @ mb @ _scale_matrix(ny, 1 - t).T
        conv = np.clip(fftconvolve(sa, sb)[:nx, :ny], 0.0, None)
        s = conv.sum()
        return conv / s if s > 0 else conv

    with ThreadPoolExecutor(max_workers=threads) as pool:
        parts = list(pool.map(node, ts))
    out = np.zeros((nx, ny))
    for w, part in zip(ws, parts):
        out += w * part
    out /= out.sum()
    return Grid2D(pa.origin, pa.dx, pa.dy, out / (pa.dx * pa.dy), "density")
