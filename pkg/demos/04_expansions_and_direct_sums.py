"""
Zernike expansions and block-diagonal matrices
==============================================

Exact moments determine the Zernike coefficients of a shadow, which gives
a smooth approximation without any sampling.  Shadows of block-diagonal
matrices are beta mixtures of the shadows of the blocks.
"""

import numpy as np

import shadowlab as sl
from shadowlab.sampler import energy_test
from shadowlab.zernike import zernike_density

J3 = sl.jordan(3)
r = np.array([0.1, 0.3, 0.5, 0.65])
print("Zernike degree 12:    ", np.round(zernike_density(J3, r, 12), 4))
print("exact radial density: ", np.round(sl.jordan_radial_density(3, r), 4))

# %%
# [[-1, 0], [1, 0]] (+) [i] composed from its blocks versus direct sampling
A = np.array([[-1, 0], [1, 0]], dtype=complex)
B = np.array([[1j]])
C = np.zeros((3, 3), dtype=complex)
C[:2, :2], C[2:, 2:] = A, B
n = 20000
sa = sl.sample_shadow(A, n, seed=1)
sb = sl.sample_shadow(B, n, seed=2)
composed = sl.direct_sum_sample(sa, sb, 2, 1, seed=3)
direct = sl.sample_shadow(C, n, seed=4)
res = energy_test(composed.points, direct.points)
print("energy test p-value: %.3f" % res.p_value)
