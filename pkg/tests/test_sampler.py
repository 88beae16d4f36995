import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

import oracles
from conftest import random_matrix, random_unitary
from shadowlab.errors import InvalidInputError
from shadowlab.geometry import numerical_range_boundary
from shadowlab.matrix import hermitian_eigenvalues, hermitian_part, jordan
from shadowlab.moments import moment_table
from shadowlab.sampler import (
    Grid2D, chunk_rng, energy_test, histogram, random_unit_vector, sample_normal_shadow,
    sample_shadow,
)

ALPHA = 1e-3


# ------------------------------------------------------------- unit vectors

@pytest.mark.parametrize("kind", ["complex_uniform", "real_uniform", "simplex"])
@pytest.mark.parametrize("n", [1, 2, 5])
def test_unit_norm(kind, n):
    rng = chunk_rng(1, 0)
    for _ in range(20):
        u = random_unit_vector(n, kind, rng)
        assert abs(np.linalg.norm(u) - 1) < 1e-12
        if kind == "real_uniform":
            assert np.all(u.imag == 0)


def test_n1_is_a_phase():
    u = random_unit_vector(1, "complex_uniform", chunk_rng(2, 0))
    assert abs(abs(u[0]) - 1) < 1e-15


def test_zero_dimension_rejected():
    with pytest.raises(InvalidInputError):
        random_unit_vector(0)


def test_two_dim_first_weight_uniform():
    rng = chunk_rng(3, 0)
    w = np.array([abs(random_unit_vector(2, rng=rng)[0]) ** 2 for _ in range(100000)])
    assert stats.kstest(w, "uniform").statistic < 0.01


def test_simplex_fourth_moment():
    N = 4
    rng = chunk_rng(4, 0)
    w = np.array([np.abs(random_unit_vector(N, rng=rng)) ** 4 for _ in range(40000)])
    target = 2 / (N * (N + 1))
    se = w.std(axis=0) / math.sqrt(len(w))
    assert np.all(np.abs(w.mean(axis=0) - target) <= 3 * se)


# ------------------------------------------------------------------ sampler

@pytest.mark.parametrize("kind", ["complex_uniform", "real_uniform"])
@pytest.mark.parametrize("n", [1, 3, 7])
def test_identity_gives_exactly_one(kind, n):
    s = sample_shadow(np.eye(n), 5000, kind, seed=11)
    assert np.all(s.points == 1 + 0j)


def test_determinism_and_threads():
    A = oracles.A3()
    a = sample_shadow(A, 200001, seed=5)
    b = sample_shadow(A, 200001, seed=5, threads=4)
    assert np.array_equal(a.points, b.points)
    c = sample_shadow(A, 200001, seed=6)
    assert not np.array_equal(a.points, c.points)
    assert a.matrix_hash == b.matrix_hash and a.seed == 5


def test_points_inside_numerical_range(rng):
    A = random_matrix(rng, 4)
    s = sample_shadow(A, 20000, seed=1)
    th = 2 * np.pi * np.arange(64) / 64
    lmax = hermitian_eigenvalues(hermitian_part(A, th))[:, -1]
    proj = (np.exp(-1j * th)[:, None] * s.points[None, :]).real
    assert np.all(proj <= lmax[:, None] + 1e-9)


def test_j2_first_moments():
    s = sample_shadow(jordan(2), 10 ** 6, seed=9)
    z = s.points
    se = np.abs(z).std() / math.sqrt(z.size)
    assert abs(z.mean()) <= 4 * se * math.sqrt(2)
    a2 = np.abs(z) ** 2
    assert abs(a2.mean() - 1 / 6) <= 4 * a2.std() / math.sqrt(z.size)


def test_moments_converge(rng):
    for n in (2, 5):
        A = random_matrix(rng, n)
        s = sample_shadow(A, 10 ** 6, seed=n)
        t = moment_table(A, 4)
        for jk, (m, se) in oracles.moments_monte_carlo(s.points, 4).items():
            if jk != (0, 0):
                assert abs(t[jk] - m) <= 4 * math.sqrt(2) * se


def test_bad_arguments():
    with pytest.raises(InvalidInputError):
        sample_shadow(jordan(2), 0)
    with pytest.raises(InvalidInputError):
        sample_shadow(jordan(2), 10, "bogus")
    with pytest.raises(InvalidInputError):
        sample_shadow(jordan(2), 10, "simplex")


def test_unitary_invariance(rng):
    A = random_matrix(rng, 3)
    U = random_unitary(rng, 3)
    a = sample_shadow(A, 10 ** 5, seed=21)
    b = sample_shadow(U.conj().T @ A @ U, 10 ** 5, seed=22)
    assert energy_test(a, b, n_perm=99, seed=1).p_value > ALPHA


def test_transpose_invariance():
    A = oracles.A3()
    a = sample_shadow(A, 10 ** 5, seed=23)
    b = sample_shadow(A.T, 10 ** 5, seed=24)
    assert energy_test(a, b, n_perm=99, seed=2).p_value > ALPHA


def test_energy_test_detects_scaling():
    A = oracles.A3()
    a = sample_shadow(A, 20000, seed=25)
    b = sample_shadow(1.1 * A, 20000, seed=26)
    assert energy_test(a, b, n_perm=99, seed=3).p_value < ALPHA


# ----------------------------------------------------------- normal matrices

def test_normal_constant_eigenvalues():
    s = sample_normal_shadow([0.3 - 2j] * 4, 1000, seed=1)
    assert np.all(s.points == 0.3 - 2j)


def test_normal_segment_uniform():
    s = sample_normal_shadow([0, 1], 10 ** 5, seed=2)
    assert np.all(s.points.imag == 0)
    assert stats.kstest(s.points.real, "uniform").pvalue > ALPHA


def test_normal_matches_diagonal_sampler():
    lam = [1, 1j, -1, -1j]
    a = sample_normal_shadow(lam, 10 ** 5, seed=3)
    b = sample_shadow(np.diag(lam), 10 ** 5, seed=4)
    c = sample_shadow(np.diag(lam), 10 ** 5, "simplex", seed=5)
    assert energy_test(a, b, n_perm=99, seed=4).p_value > ALPHA
    assert energy_test(a, c, n_perm=99, seed=5).p_value > ALPHA


def test_unitary_triangle_is_uniform():
    w = np.exp(2j * np.pi / 3)
    s = sample_normal_shadow([w, np.conj(w), 1], 10 ** 6, seed=6)
    # barycentric coordinates are uniform on the simplex; bin the interior
    g = histogram(s, (-0.5, 1.0, -0.87, 0.87), 15, 15)
    c = g.centers()
    tri = numerical_range_boundary(np.diag([w, np.conj(w), 1]))
    # interior cells: every corner inside the triangle
    corners = [c + complex(a * g.dx, b * g.dy) / 2 for a in (-1, 1) for b in (-1, 1)]
    inside = np.logical_and.reduce([tri.contains(k, -1e-9) for k in corners])
    counts = g.values[inside]
    assert inside.sum() >= 50
    chi2 = ((counts - counts.mean()) ** 2 / counts.mean()).sum()
    assert stats.chi2.sf(chi2, counts.size - 1) > ALPHA


def test_pyramid_is_radially_decreasing():
    s = sample_normal_shadow([1, 1j, -1, -1j], 10 ** 6, seed=7)
    r = np.abs(s.points)
    edges = np.linspace(0, 0.6, 7)
    dens = np.histogram(r, edges)[0] / np.diff(edges ** 2)
    assert np.all(np.diff(dens) < 0)


# ---------------------------------------------------------------- histogram

def test_histogram_single_cell():
    g = histogram(np.ones(10, complex), (0, 2, -1, 1), 2, 2)
    assert g.values.sum() == 10 and np.count_nonzero(g.values) == 1 and g.overflow == 0


def test_histogram_overflow_and_density():
    pts = np.array([0.5, 0.5, 5.0 + 0j])
    g = histogram(pts, (0, 1, -1, 1), 4, 4)
    assert g.overflow == 1 and g.values.sum() == 2
    d = histogram(pts[:2], (0, 1, -1, 1), 4, 4, "density")
    assert abs(d.mass() - 1) < 1e-12


def test_histogram_zero_area():
    with pytest.raises(InvalidInputError):
        histogram(np.zeros(3, complex), (0, 0, 0, 1))


def test_default_box_from_numerical_range():
    s = sample_shadow(jordan(2), 1000, seed=8)
    g = histogram(s, matrix=jordan(2))
    x0, x1, y0, y1 = g.box
    # W(J2) is the disc of radius 1/2; the box is padded by 2% of its width
    assert np.allclose([x0, x1, y0, y1], [-0.52, 0.52, -0.52, 0.52], atol=1e-3)
    assert g.overflow == 0


def test_j2_histogram_matches_density():
    s = sample_shadow(jordan(2), 10 ** 7, seed=12)
    g = histogram(s, (-0.5, 0.5, -0.5, 0.5), 25, 25, "density")
    truth = oracles.cell_average(lambda z: oracles.f2(np.minimum(np.abs(z), 0.49999)), g)
    corners = np.abs(g.centers()) + math.hypot(g.dx, g.dy) / 2
    away = corners < 0.4
    rel = np.abs(g.values[away] / truth[away] - 1)
    assert rel.max() < 0.05


@settings(max_examples=20, deadline=None)
@given(st.integers(1, 5000), st.integers(1, 12), st.integers(1, 12))
def test_histogram_counts_conserved(count, nx, ny):
    pts = chunk_rng(count, 0).normal(size=count) + 1j * chunk_rng(count, 1).normal(size=count)
    g = histogram(pts, (-1, 1, -1, 1), nx, ny)
    assert g.values.sum() + g.overflow == count


def test_grid_merge_is_cellwise_addition():
    a = sample_shadow(jordan(3), 5000, seed=1)
    b = sample_shadow(jordan(3), 5000, seed=2)
    box = (-1, 1, -1, 1)
    whole = histogram(np.concatenate([a.points, b.points]), box, 9, 9)
    assert np.array_equal(whole.values, histogram(a, box, 9, 9).values + histogram(b, box, 9, 9).values)
    assert isinstance(whole, Grid2D)
