import math
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad

import oracles
from conftest import random_matrix
from shadowlab.cartesian import (
    critical_curves, eig_sweep, hermitian_density, lambda_prime, marginal_density,
    marginal_mean, marginal_moment, marginal_variance,
)
from shadowlab.errors import DegenerateBranchWarning, InvalidInputError
from shadowlab.geometry import hausdorff, numerical_range_boundary
from shadowlab.matrix import hermitian_part, jordan
from shadowlab.sampler import sample_shadow

S5 = math.sqrt(5)
S17 = math.sqrt(17)


def re(A):
    return hermitian_part(A, 0.0)


# ------------------------------------------------------------- Hermitian

def test_P1_jordan4():
    x = np.linspace(-0.9, 0.9, 100)
    d = hermitian_density(re(oracles.A1()))
    assert np.allclose(d(x), oracles.P1(x), atol=1e-9)


def test_P2_corrected():
    x = np.linspace(-0.9, 1.6, 100)
    d = hermitian_density(re(oracles.A2()))
    assert np.allclose(d(x), oracles.P2(x), atol=1e-9)
    assert d(-0.5) == pytest.approx(1.5, abs=1e-12)
    assert d.residual < 1e-10


def test_P2_stated_form_has_wrong_mass():
    # the first term with exponent 1 on (1/2 + x) loses mass
    m = quad(lambda v: float(oracles.P2(np.array(v), stated=True)), -0.5, 1.5, points=[0])[0]
    assert m == pytest.approx(0.78125, abs=1e-10)
    assert quad(lambda v: float(oracles.P2(np.array(v))), -0.5, 1.5, points=[0])[0] == pytest.approx(1)


def test_P3_corrected():
    x = np.linspace(-1.5, 1.0, 100)
    d = hermitian_density(re(oracles.A3()))
    assert np.allclose(d(x), oracles.P3(x), atol=1e-9)
    mass = quad(lambda v: float(oracles.P3(np.array(v), stated=True)), -2, 2,
                points=[-(1 + S17) / 4, -0.5, 0, (S17 - 1) / 4])[0]
    assert mass == pytest.approx(0.8011, abs=1e-3)


def test_diag_marginal_mass_and_knots():
    d = marginal_density(np.diag([0.0, 1, 3, 5]), 0.0)
    assert quad(d, 0, 5, points=[1, 3])[0] == pytest.approx(1, abs=1e-10)
    assert np.allclose(d.knots, [0, 1, 3, 5])
    assert d(-0.1) == 0 and d(5.1) == 0


def test_diag_unit_roots_marginal():
    A = np.diag([1, 1j, -1, -1j])
    d = marginal_density(A, 0.0)
    assert quad(d, -1, 1, points=[0])[0] == pytest.approx(1, abs=1e-10)
    # knot at 0 has multiplicity two; the density is symmetric
    x = np.linspace(-0.99, 0.99, 21)
    assert np.allclose(d(x), d(-x), atol=1e-12)
    s = sample_shadow(A, 10 ** 6, seed=3)
    edges = np.linspace(-1, 1, 21)
    c = np.histogram(s.points.real, edges)[0]
    e = np.array([quad(d, a, b)[0] for a, b in zip(edges[:-1], edges[1:])]) * s.points.size
    assert np.all(np.abs(c - e) <= 5 * np.sqrt(e))


def test_scalar_is_atomic():
    d = hermitian_density(2.0 * np.eye(3))
    assert d.atomic and d.atom == 2.0 and d(2.0) == 0 and d.moment(2) == 4


def test_rejects_non_hermitian():
    with pytest.raises(InvalidInputError):
        hermitian_density(jordan(2))


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10 ** 6))
def test_hermitian_moments_against_newton(n, seed):
    rng = np.random.default_rng(seed)
    H = re(random_matrix(rng, n, 1.0))
    d = hermitian_density(H)
    for k in range(1, 5):
        assert d.moment(k) == pytest.approx(oracles.marginal_moment_newton(H, 0.0, k), rel=1e-7, abs=1e-9)
    knots = d.knots
    assert quad(d, knots[0], knots[-1], points=knots[1:-1], limit=200)[0] == pytest.approx(1, abs=1e-7)


# --------------------------------------------------------------- marginals

def test_A3_variance():
    th = 2 * np.pi * np.arange(32) / 32
    for t in th:
        assert marginal_variance(oracles.A3(), t) == pytest.approx((13 + 2 * math.sin(2 * t)) / 72, abs=1e-10)


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.floats(0, 2 * math.pi), st.integers(0, 10 ** 6))
def test_marginal_moments_vs_newton(n, theta, seed):
    A = random_matrix(np.random.default_rng(seed), n, 1.0)
    for k in range(5):
        assert marginal_moment(A, theta, k) == pytest.approx(
            oracles.marginal_moment_newton(A, theta, k), rel=1e-8, abs=1e-10)
    assert marginal_mean(A, theta) == pytest.approx((np.exp(-1j * theta) * np.trace(A) / n).real)


def test_marginal_moment_order_error():
    with pytest.raises(InvalidInputError):
        marginal_moment(jordan(2), 0.0, -1)


# ----------------------------------------------------------- lambda_prime

def test_lambda_prime_A2_top_branch():
    # top branch lam = 1/2 + cos(theta / 2)
    for t in (0.3, 1.0, 2.2):
        assert lambda_prime(oracles.A2(), t, 3) == pytest.approx(-0.5 * math.sin(t / 2), abs=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 5), st.floats(0, 2 * math.pi), st.integers(0, 10 ** 6))
def test_lambda_prime_vs_hellmann_feynman(n, theta, seed):
    A = random_matrix(np.random.default_rng(seed), n, 1.0)
    v = eig_sweep(A, theta)[0]
    if np.min(np.diff(v)) < 1e-4:
        return
    for j in range(n):
        assert lambda_prime(A, theta, j) == pytest.approx(oracles.hellmann_feynman(A, theta, j), abs=1e-8)


def test_lambda_prime_finite_difference():
    A = oracles.A3()
    h = 1e-5
    for j in range(3):
        fd = (eig_sweep(A, 0.7 + h)[0, j] - eig_sweep(A, 0.7 - h)[0, j]) / (2 * h)
        assert lambda_prime(A, 0.7, j) == pytest.approx(fd, abs=1e-8)


def test_lambda_prime_degenerate_warns():
    with pytest.warns(DegenerateBranchWarning):
        lambda_prime(np.eye(2), 0.0, 0)
    with pytest.raises(InvalidInputError):
        lambda_prime(jordan(2), 0.0, 2)


# ---------------------------------------------------------- critical curves

def test_A1_circles():
    cs = critical_curves(oracles.A1())
    radii = sorted(float(np.mean(np.abs(c.z))) for c in cs)
    assert len(cs) == 2
    assert np.allclose(radii, [(S5 - 1) / 4, (1 + S5) / 4], atol=1e-6)
    for c in cs:
        assert np.ptp(np.abs(c.z)) < 1e-6 and c.cusps.size == 0


def test_A2_single_curve_with_complex_cusps():
    cs = critical_curves(oracles.A2())
    assert len(cs) == 1 and len(cs[0].branches) == 4
    cusps = sorted(cs[0].cusp_points, key=lambda w: w.imag)
    ref = [(-19 - 5j * S5) / 54, (-19 + 5j * S5) / 54]
    assert np.allclose(cusps, ref, atol=1e-3)
    # the curve is the parametrized e^{it}(1/2 + cos(t/2) - (i/2) sin(t/2))
    t = cs[0].theta
    ref_z = np.exp(1j * t) * (0.5 + np.cos(t / 2) - 0.5j * np.sin(t / 2))
    assert hausdorff(cs[0].z, ref_z) < 1e-9


def test_A3_curves_and_cusps():
    cs = critical_curves(oracles.A3())
    assert len(cs) == 2
    assert sum(c.cusp_points.size for c in cs) == 3


@pytest.mark.parametrize("N", range(2, 8))
def test_jordan_curve_count(N):
    cs = critical_curves(jordan(N), 512)
    assert len(cs) == math.ceil(N / 2)
    outer = np.mean(np.abs(cs[0].z))
    assert outer == pytest.approx(math.cos(math.pi / (N + 1)), abs=1e-9)


@pytest.mark.parametrize("seed", range(6))
def test_outer_curve_hull_is_numerical_range(seed):
    A = random_matrix(np.random.default_rng(seed), 4, 1.0)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateBranchWarning)
        cs = critical_curves(A, 2048)
    assert hausdorff(cs[0].z, numerical_range_boundary(A)) < 1e-3
    assert max(cs[0].lam) == pytest.approx(max(eig_sweep(A, cs[0].theta)[:, -1]))


def test_sorted_tracking_and_errors():
    cs = critical_curves(oracles.A1(), 256, branch_tracking="sorted")
    assert len(cs) >= 1
    with pytest.raises(InvalidInputError):
        critical_curves(oracles.A1(), 8)
    with pytest.raises(InvalidInputError):
        critical_curves(oracles.A1(), 256, branch_tracking="spline")
