import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from sphquad.errors import DomainError, InvalidParameterError
from sphquad.quadrature import reference_rule
from sphquad.specfun import (Filter, bspline_eval, dim_harmonic, dim_polyspace,
                             gegenbauer_normalized_seq, harmonic_degrees,
                             harmonic_labels, harmonic_matrix, jacobi_orthonormal_seq,
                             sph_harm_basis, sphere_constant)


# ---------------------------------------------------------------- B-splines

@pytest.mark.parametrize("m, x, expected", [
    (1, 0.5, 1.0), (1, 0.0, 0.0), (1, 1.0, 1.0), (1, 1.5, 0.0),
    (2, 1.0, 1.0), (2, 0.5, 0.5), (2, 2.0, 0.0),
    (3, 1.5, 0.75), (4, 2.0, 2.0 / 3.0),
])
def test_bspline_values(m, x, expected):
    assert bspline_eval(m, x) == pytest.approx(expected, abs=1e-15)


def test_bspline_matches_cardinal_formula():
    # oracle: B_m(x) = 1/(m-1)! sum_j (-1)^j C(m, j) (x - j)_+^{m-1}
    x = np.linspace(-1, 7, 97)
    for m in range(2, 7):
        ref = sum((-1) ** j * math.comb(m, j) * np.maximum(x - j, 0.0) ** (m - 1)
                  for j in range(m + 1)) / math.factorial(m - 1)
        np.testing.assert_allclose(bspline_eval(m, x), ref, atol=1e-12)


# x on a grid: x - k must be exact, otherwise e.g. 5e-324 + 1 rounds onto a knot
@given(st.integers(1, 8), st.integers(-3000, 3000).map(lambda i: i / 997))
def test_bspline_partition_of_unity(m, x):
    total = sum(bspline_eval(m, x - k) for k in range(-m - 4, m + 5))
    assert total == pytest.approx(1.0, abs=1e-12)


# ---------------------------------------------------------------- filters

@pytest.mark.parametrize("m", [1, 2, 3, 5, 7])
def test_filter_shape(m):
    h = Filter(m)
    assert np.all(h(np.linspace(0, 0.5, 51)) == 1.0)
    assert np.all(h(np.linspace(1.0 + 1e-9, 3, 51)) == 0.0)
    vals = h(np.linspace(0, 1.2, 601))
    assert np.all(np.diff(vals) <= 1e-15)


@given(st.integers(1, 8), st.floats(0.0, 2.0), st.floats(0.0, 2.0))
def test_filter_non_increasing(m, a, b):
    lo, hi = min(a, b), max(a, b)
    assert Filter(m)(hi) <= Filter(m)(lo) + 1e-15


def test_filter_h1_is_indicator_and_keeps_degree_n():
    c = Filter(1).coefficients(10)
    np.testing.assert_array_equal(c, np.ones(11))


def test_filter_validation():
    with pytest.raises(InvalidParameterError):
        Filter(0)
    with pytest.raises(DomainError):
        Filter(3)(-0.1)
    assert Filter(5).smoothness == 4


# ---------------------------------------------------------------- dimensions

def test_dimensions():
    assert dim_harmonic(2, 5) == 11
    assert dim_harmonic(3, 2) == 9
    assert dim_polyspace(2, 63) == 4096
    assert dim_polyspace(2, 126) == 16129
    assert dim_harmonic(2, 0) == 1
    for q in (1, 2, 3, 4):
        for n in range(6):
            assert dim_polyspace(q, n) == sum(dim_harmonic(q, l) for l in range(n + 1))


# ---------------------------------------------------------------- Gegenbauer / Jacobi

@pytest.mark.parametrize("q", [1, 2, 3, 5])
def test_gegenbauer_against_scipy(q):
    t = np.linspace(-1, 1, 41)
    seq = gegenbauer_normalized_seq(q, 12, t)
    for ell in range(13):
        if q == 1:
            ref = special.eval_chebyt(ell, t)
        else:
            lam = (q - 1) / 2
            ref = special.eval_gegenbauer(ell, lam, t) / special.eval_gegenbauer(ell, lam, 1.0)
        np.testing.assert_allclose(seq[ell], ref, atol=1e-12)


def test_gegenbauer_q2_is_legendre():
    t = np.linspace(-1, 1, 11)
    seq = gegenbauer_normalized_seq(2, 30, t)
    for ell in (0, 1, 7, 30):
        np.testing.assert_allclose(seq[ell], special.eval_legendre(ell, t), atol=1e-12)


@pytest.mark.parametrize("q", [2, 3, 4])
def test_jacobi_orthonormal_and_identity(q):
    a = q / 2 - 1
    x, w = special.roots_jacobi(40, a, a)
    P = jacobi_orthonormal_seq(q, 20, x)
    np.testing.assert_allclose((P * w) @ P.T, np.eye(21), atol=1e-12)
    p1 = jacobi_orthonormal_seq(q, 20, np.array(1.0))
    for ell in range(21):
        assert sphere_constant(q) * p1[ell] ** 2 == pytest.approx(dim_harmonic(q, ell), rel=1e-12)


def test_sequences_reject_outside_interval():
    with pytest.raises(DomainError):
        gegenbauer_normalized_seq(2, 3, np.array([1.5]))
    with pytest.raises(DomainError):
        jacobi_orthonormal_seq(2, 3, np.array([-1.01]))


# ---------------------------------------------------------------- harmonics

def _scipy_real_harmonics(n, pts):
    theta = np.arccos(np.clip(pts[:, 2], -1, 1))
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    rows = []
    for ell, m, kind in harmonic_labels(n):
        Y = special.sph_harm_y(ell, m, theta, phi) * np.sqrt(4 * np.pi)
        if m == 0:
            rows.append(Y.real)
        else:
            part = Y.real if kind == "c" else Y.imag
            rows.append((-1) ** m * np.sqrt(2.0) * part)
    return np.array(rows)


def test_harmonics_against_scipy(rng):
    pts = rng.standard_normal((50, 3))
    pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    np.testing.assert_allclose(harmonic_matrix(20, pts), _scipy_real_harmonics(20, pts),
                               atol=1e-11)


def test_harmonics_orthonormal():
    rule = reference_rule(60)
    Y = harmonic_matrix(30, rule.nodes)
    G = (Y * rule.weights) @ Y.T
    np.testing.assert_allclose(G, np.eye(Y.shape[0]), atol=1e-12)


@pytest.mark.parametrize("ell", [0, 1, 5, 50, 200])
def test_addition_formula(rng, ell):
    x = rng.standard_normal((30, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    y = rng.standard_normal((30, 3))
    y /= np.linalg.norm(y, axis=1, keepdims=True)
    Yx = harmonic_matrix(ell, x)[ell * ell:]
    Yy = harmonic_matrix(ell, y)[ell * ell:]
    lhs = np.sum(Yx * Yy, axis=0)
    u = np.clip(np.sum(x * y, axis=1), -1, 1)
    rhs = (2 * ell + 1) * special.eval_legendre(ell, u)
    np.testing.assert_allclose(lhs, rhs, atol=1e-11 * (2 * ell + 1))


def test_sum_of_squares_equals_dimension(rng):
    x = rng.standard_normal((100, 3))
    x /= np.linalg.norm(x, axis=1, keepdims=True)
    Y = harmonic_matrix(150, x)
    np.testing.assert_allclose(np.sum(Y ** 2, axis=0), 151 ** 2, rtol=1e-11)


def test_sph_harm_basis_shapes_and_poles():
    assert sph_harm_basis(3, [0, 0, 1]).shape == (16,)
    assert sph_harm_basis(3, np.eye(3)).shape == (3, 16)
    north = sph_harm_basis(4, [0.0, 0.0, 1.0])
    # at the pole only m = 0 survives, with value sqrt(2l+1)
    deg = harmonic_degrees(4)
    zonal = [k for k, (l, m, _) in enumerate(harmonic_labels(4)) if m == 0]
    np.testing.assert_allclose(north[zonal], np.sqrt(2 * np.arange(5) + 1), atol=1e-14)
    mask = np.ones_like(north, dtype=bool)
    mask[zonal] = False
    assert np.all(np.abs(north[mask]) < 1e-15)
    assert len(deg) == 25


def test_sph_harm_basis_rejects_non_unit():
    with pytest.raises(DomainError):
        sph_harm_basis(2, [1.0, 1.0, 0.0])
    with pytest.raises(DomainError):
        sph_harm_basis(2, [1.0, 0.0])


@settings(max_examples=30)
@given(st.floats(-1, 1), st.floats(0, 2 * np.pi), st.integers(0, 40))
def test_harmonic_rotation_about_z_preserves_degree_energy(z, phi, n):
    s = math.sqrt(max(0.0, 1 - z * z))
    x = np.array([[s * math.cos(phi), s * math.sin(phi), z]])
    x /= np.linalg.norm(x)
    Y = harmonic_matrix(n, x)[:, 0]
    # energy in each degree is (2l+1) whatever the point
    energy = np.bincount(harmonic_degrees(n), weights=Y ** 2)
    np.testing.assert_allclose(energy, 2 * np.arange(n + 1) + 1, rtol=1e-11)
