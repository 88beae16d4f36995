"""
A first numerical shadow
========================

The shadow of a matrix M is the law of the complex number (Mu, u) when u
is drawn uniformly from the unit sphere.  For the 2 x 2 Jordan block it
is a disc of radius 1/2 whose density grows towards the rim.
"""

import numpy as np

import shadowlab as sl

J2 = sl.jordan(2)

# Monte Carlo: a million points is a few seconds of work
samples = sl.sample_shadow(J2, 10 ** 6, seed=7)
r = np.abs(samples.points)
print("largest |z| seen:", r.max())

# the exact law of |z|^2 gives P(|z|^2 <= 1/8) = 1 - sqrt(1/2)
print("P(|z|^2 <= 1/8): empirical %.4f  exact %.4f" % (np.mean(r ** 2 <= 1 / 8), 1 - np.sqrt(0.5)))

# closed form on a few radii
rad = np.array([0.0, 0.2, 0.4, 0.49])
print("density 2 / (pi sqrt(1 - 4 r^2)):", sl.jordan_radial_density(2, rad))

# %%
# The moments nu_jk = E[z^j conj(z)^k] come exactly from the matrix.
z = samples.points
for j, k in [(1, 1), (2, 2), (3, 1)]:
    mc = np.mean(z ** j * np.conj(z) ** k)
    print(f"nu_{j}{k}: exact {sl.moment(J2, j, k).real:.6f}  MC {mc.real:.6f}")
