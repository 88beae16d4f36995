"""Numerical shadows of complex square matrices.

The shadow of M is the law of (Mu, u) for u uniform on the unit sphere
of C^N.  The package samples it, computes its moments exactly, evaluates
closed-form densities, and works with marginals, critical curves,
Zernike expansions and rank-k numerical ranges.
"""

from .errors import DegenerateBranchWarning, InvalidInputError, NumericalFailure
from .matrix import (
    BivariatePoly, hermitian_eigenvalues, hermitian_part, jordan, read_matrix,
    trace_word, write_matrix, xi_poly,
)
from .sampler import (
    DEFAULT_SEED, Grid2D, ShadowSamples, energy_test, histogram, sample_normal_shadow,
    sample_shadow,
)
from .moments import (
    MomentTable, central_moment, moment, moment_table, rotation_invariant, shadows_equal,
    trace_criterion_equal,
)
from .radial import (
    F_N, R_Nk, RadialDensity, density_2x2, ellipse_of_2x2, jordan_radial_density,
    rotation_invariant_density, rotation_invariant_model,
)
from .cartesian import (
    CriticalCurve, critical_curves, hermitian_density, lambda_prime, marginal_density,
    marginal_variance,
)
from .zernike import ZernikeExpansion, zernike_coeffs, zernike_eval, zernike_poly
from .geometry import (
    ConvexRegion, hausdorff, numerical_radius, numerical_range_boundary, rank_k_range,
)
from .composition import BetaMixture, direct_sum_density_grid, direct_sum_sample

__version__ = "0.1.0"
