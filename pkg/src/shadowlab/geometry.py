"""Numerical range, numerical radius and rank-k numerical ranges.

Each region is the intersection of the half-planes

    Re(exp(-i theta) z) <= k-th largest eigenvalue of Re(exp(-i theta) A)

over a uniform grid of angles, computed by clipping a large square.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError
from .matrix import as_matrix, hermitian_eigenvalues, hermitian_part

__all__ = [
    "HalfPlaneFan",
    "ConvexRegion",
    "half_plane_fan",
    "numerical_range_boundary",
    "rank_k_range",
    "numerical_radius",
    "support_function",
    "hausdorff",
]

DEFAULT_T = 720


@dataclass(frozen=True)
class HalfPlaneFan:
    """Angles theta_m = 2 pi m / T and offsets h(theta_m) of one rank k."""

    k: int
    angles: np.ndarray
    offsets: np.ndarray


@dataclass(frozen=True)
class ConvexRegion:
    """Convex polygon, segment, point or empty set.

    Attributes
    ----------
    vertices : ndarray of complex
        Counter-clockwise vertices without repetition.  A segment has its
        two endpoints, a point one vertex and the empty set none.
    kind : {"polygon", "segment", "point", "empty"}
    """

    vertices: np.ndarray
    kind: str

    @property
    def empty(self):
        return self.kind == "empty"

    @property
    def area(self):
        v = self.vertices
        if len(v) < 3:
            return 0.0
        x, y = v.real, v.imag
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(y, np.roll(x, -1)))

    def closed(self):
        """Vertices with the first repeated at the end."""
        v = self.vertices
        return np.concatenate([v, v[:1]]) if len(v) else v

    def contains(self, z, tol=1e-9):
        """Membership test for points (within ``tol``)."""
        z = np.asarray(z, dtype=complex)
        v = self.vertices
        if self.kind == "empty":
            return np.zeros(z.shape, dtype=bool)
        if self.kind == "point":
            return np.abs(z - v[0]) <= tol
        if self.kind == "segment":
            a, b = v
            d = b - a
            t = np.clip(((z - a) * np.conj(d)).real / abs(d) ** 2, 0, 1)
            return np.abs(z - (a + t * d)) <= tol
        inside = np.ones(z.shape, dtype=bool)
        for a, b in zip(v, np.roll(v, -1)):
            edge = b - a
            cross = (np.conj(edge) * (z - a)).imag / abs(edge)
            inside &= cross >= -tol
        return inside


def half_plane_fan(A, k=1, T=DEFAULT_T):
    """Offsets h_k(theta) on the grid theta_m = 2 pi m / T."""
    A = as_matrix(A)
    n = A.shape[0]
    if not 1 <= k <= n:
        raise InvalidInputError(f"k must lie in 1..{n}")
    if T < 16:
        raise InvalidInputError("T must be at least 16")
    th = 2 * np.pi * np.arange(T) / T
    vals = hermitian_eigenvalues(hermitian_part(A, th))
    return HalfPlaneFan(k, th, vals[:, n - k].copy())


def _clip(poly, nrm, c, tol):
    """Keep the part of a polygon where Re(conj(nrm) z) <= c + tol."""
    if poly.size == 0:
        return poly
    f = (np.conj(nrm) * poly).real - c
    keep = f <= tol
    if keep.all():
        return poly
    nxt = np.roll(poly, -1)
    fn = np.roll(f, -1)
    cross = keep != np.roll(keep, -1)
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(cross, f / (f - fn), 0.0)
    # each vertex is followed by the crossing on its outgoing edge, if any
    cand = np.stack([poly, poly + t * (nxt - poly)], axis=1).ravel()
    mask = np.stack([keep, cross], axis=1).ravel()
    return cand[mask]


def _classify(pts, scale, tol):
    if len(pts) == 0:
        return ConvexRegion(np.zeros(0, complex), "empty")
    pts = np.asarray(pts, dtype=complex)
    eps = tol * max(1.0, scale)
    keep = [pts[0]]
    for p in pts[1:]:
        if abs(p - keep[-1]) > eps:
            keep.append(p)
    if len(keep) > 1 and abs(keep[-1] - keep[0]) <= eps:
        keep.pop()
    pts = np.asarray(keep)
    diam = float(np.max(np.abs(pts[:, None] - pts[None, :]))) if len(pts) > 1 else 0.0
    if diam <= eps:
        return ConvexRegion(pts.mean(keepdims=True), "point")
    # distance of every vertex from the line through the two farthest points
    i, j = np.unravel_index(np.argmax(np.abs(pts[:, None] - pts[None, :])), (len(pts),) * 2)
    a, b = pts[i], pts[j]
    d = (b - a) / abs(b - a)
    off = np.abs((np.conj(d) * (pts - a)).imag)
    if off.max() <= eps:
        a, b = sorted((a, b), key=lambda w: (w.real, w.imag))
        return ConvexRegion(np.array([a, b]), "segment")
    # drop vertices lying on the edge between their neighbours
    out = []
    m = len(pts)
    for idx in range(m):
        p, q, r = pts[idx - 1], pts[idx], pts[(idx + 1) % m]
        cross = (np.conj(r - p) * (q - p)).imag / abs(r - p)
        if abs(cross) > eps:
            out.append(q)
    return ConvexRegion(np.asarray(out), "polygon")


def _region_from_fan(fan, tol=1e-9):
    scale = float(np.max(np.abs(fan.offsets))) if fan.offsets.size else 1.0
    R = 4.0 * max(1.0, scale)
    poly = np.array([complex(-R, -R), complex(R, -R), complex(R, R), complex(-R, R)])
    for th, c in zip(fan.angles, fan.offsets):
        poly = _clip(poly, np.exp(1j * th), c, tol * max(1.0, scale))
        if poly.size == 0:
            break
    return _classify(poly, scale, tol)


def numerical_range_boundary(A, T=DEFAULT_T):
    """Circumscribed polygon of the numerical range W(A)."""
    return _region_from_fan(half_plane_fan(A, 1, T))


def rank_k_range(A, k, T=DEFAULT_T):
    """Rank-k numerical range as an intersection of T half-planes.

    Returns an empty region (not an error) when the half-planes do not
    meet.
    """
    return _region_from_fan(half_plane_fan(A, k, T))


def numerical_radius(A, T=2048):
    """max |z| over the circumscribed polygon of W(A)."""
    reg = numerical_range_boundary(A, T)
    return float(np.max(np.abs(reg.vertices)))


def support_function(points, angles):
    """h(theta) = max over points of Re(exp(-i theta) z)."""
    pts = np.asarray(points, dtype=complex).ravel()
    angles = np.asarray(angles, dtype=float)
    return np.max((np.exp(-1j * angles)[:, None] * pts[None, :]).real, axis=1)


def _edge_normals(pts):
    pts = np.asarray(pts, dtype=complex).ravel()
    if len(pts) < 2:
        return np.zeros(0)
    d = np.roll(pts, -1) - pts
    d = d[np.abs(d) > 0]
    return np.angle(-1j * d)


def hausdorff(P, Q, n_dir=4096):
    """Hausdorff distance between the convex hulls of two point sets.

    For convex sets the distance equals the largest difference of the
    support functions; it is maximized over a uniform set of directions
    together with the edge normals of both inputs.

    ``P`` and ``Q`` may be ConvexRegion objects or arrays of points.
    """
    p = P.vertices if isinstance(P, ConvexRegion) else np.asarray(P, dtype=complex).ravel()
    q = Q.vertices if isinstance(Q, ConvexRegion) else np.asarray(Q, dtype=complex).ravel()
    if len(p) == 0 or len(q) == 0:
        raise InvalidInputError("Hausdorff distance of an empty set")
    ang = np.concatenate([2 * np.pi * np.arange(n_dir) / n_dir, _edge_normals(p), _edge_normals(q)])
    return float(np.max(np.abs(support_function(p, ang) - support_function(q, ang))))
