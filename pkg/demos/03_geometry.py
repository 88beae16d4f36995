"""
Numerical range, critical curves and rank-k ranges
==================================================

The shadow lives on the numerical range W(A).  Its boundary is the
outermost critical curve; the inner critical curves and the higher-rank
numerical ranges show up as creases and denser regions inside.
"""

import numpy as np

import shadowlab as sl

A3 = np.array([[0, 1, 1], [0, 1j, 1], [0, 0, -1]])
W = sl.numerical_range_boundary(A3)
print("W(A3): %d vertices, area %.4f, numerical radius %.4f"
      % (len(W.vertices), W.area, sl.numerical_radius(A3)))

curves = sl.critical_curves(A3)
for c in curves:
    print("critical curve from branches", c.branches, "cusp points:", np.round(c.cusp_points, 4))

# %%
# Rank-k numerical ranges of a normal matrix are nested polygons.
U5 = np.diag(np.exp(2j * np.pi * np.arange(5) / 5))
for k in (1, 2, 3):
    R = sl.rank_k_range(U5, k)
    print(f"rank-{k} range: {R.kind}, area {R.area:.4f}")
