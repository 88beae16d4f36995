"""
Hermitian shadows and one-dimensional marginals
===============================================

A Hermitian matrix has a real shadow whose density is a B-spline with
knots at the eigenvalues.  For any matrix, the projection of the shadow
onto a line through the origin is the shadow of a Hermitian matrix.
"""

import numpy as np

import shadowlab as sl

H = np.diag([0.0, 1.0, 3.0, 5.0]).astype(complex)
dens = sl.hermitian_density(H)
x = np.linspace(0, 5, 11)
for xi, v in zip(x, dens(x)):
    print(f"{xi:4.1f}  {v:.5f}")

# %%
# The real part of the shadow of A3 is the shadow of its Hermitian part.
A3 = np.array([[0, 1, 1], [0, 1j, 1], [0, 0, -1]])
marg = sl.marginal_density(A3, 0.0)
u = np.linspace(-1.5, 1.5, 7)
print("marginal at theta = 0:", np.round(marg(u), 5))

pts = sl.sample_shadow(A3, 2 * 10 ** 5, seed=1).points.real
hist, edges = np.histogram(pts, bins=30, density=True)
mid = (edges[1:] + edges[:-1]) / 2
print("largest histogram deviation: %.3f" % np.max(np.abs(hist - marg(mid))))
