"""Plain-text writers: CSV with 17 significant digits and ASCII PGM."""

import csv
import sys
from contextlib import contextmanager

import numpy as np

__all__ = [
    "fmt",
    "write_csv",
    "write_samples_csv",
    "write_grid_csv",
    "write_grid_pgm",
    "write_region_csv",
    "read_grid_csv",
]


def fmt(x):
    """Round-trip representation of a float."""
    return format(float(x), ".17g")


@contextmanager
def _open(path):
    if path in (None, "-"):
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def write_csv(path, header, rows):
    """Write rows under a header line; floats use 17 significant digits."""
    with _open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) if isinstance(v, (float, np.floating)) else v for v in row])


def write_samples_csv(path, samples):
    pts = getattr(samples, "points", samples)
    write_csv(path, ["re", "im"], ((float(z.real), float(z.imag)) for z in pts))


def write_grid_csv(path, grid):
    """Cell centres and values as "x,y,value"."""
    c = grid.centers()
    rows = ((float(c[i, j].real), float(c[i, j].imag), float(grid.values[i, j]))
            for i in range(grid.nx) for j in range(grid.ny))
    write_csv(path, ["x", "y", "value"], rows)


def write_grid_pgm(path, grid):
    """ASCII PGM (P2) with values scaled linearly onto 0..65535.

    The first image row is the top of the box (largest y).
    """
    v = np.asarray(grid.values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    if hi > lo:
        s = np.rint((v - lo) / (hi - lo) * 65535).astype(np.int64)
    else:
        s = np.zeros(v.shape, dtype=np.int64)
    img = s.T[::-1]
    with _open(path) as fh:
        fh.write(f"P2\n{grid.nx} {grid.ny}\n65535\n")
        for row in img:
            fh.write(" ".join(str(int(x)) for x in row) + "\n")


def write_region_csv(path, region):
    """Vertices as "re,im" with the first vertex repeated at the end."""
    write_csv(path, ["re", "im"], ((float(z.real), float(z.imag)) for z in region.closed()))


def read_grid_csv(path):
    """Read an "x,y,value" raster written by :func:`write_grid_csv`."""
    from .sampler import Grid2D

    data = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
    xs = np.unique(data[:, 0])
    ys = np.unique(data[:, 1])
    nx, ny = len(xs), len(ys)
    if nx * ny != len(data):
        raise ValueError("raster is not a full rectangular grid")
    dx = (xs[-1] - xs[0]) / (nx - 1) if nx > 1 else 1.0
    dy = (ys[-1] - ys[0]) / (ny - 1) if ny > 1 else 1.0
    vals = data[:, 2].reshape(nx, ny)
    return Grid2D(complex(xs[0] - dx / 2, ys[0] - dy / 2), dx, dy, vals, "density")
