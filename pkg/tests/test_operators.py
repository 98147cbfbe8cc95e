import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial.transform import Rotation

from sphquad.errors import InvalidParameterError
from sphquad.geometry import random_points
from sphquad.operators import (HarmonicCoeffs, OperatorSpec, approx_error, fourier_coeffs,
                               least_squares_coeffs, sigma_eval, sigma_star, synthesize)
from sphquad.quadrature import QuadratureRule, lsq_weights, reference_rule
from sphquad.specfun import Filter, harmonic_matrix


def poly(rng, degree):
    c = rng.standard_normal((degree + 1) ** 2)
    c /= np.linalg.norm(c)
    return c, (lambda x: harmonic_matrix(degree, np.atleast_2d(x)).T @ c)


def test_harmonic_coeffs_indexing():
    a = HarmonicCoeffs(2, np.arange(9.0))
    assert a[0, 1] == 0 and a[1, 3] == 3 and a[2, 5] == 8
    with pytest.raises(IndexError):
        a[1, 4]
    with pytest.raises(InvalidParameterError):
        HarmonicCoeffs(2, np.arange(8.0))
    f = a.filtered(Filter(1), 1)
    assert f.degree == 1 and f.values.tolist() == [0, 1, 2, 3]


def test_fourier_coeffs_constant():
    rule = reference_rule(20)
    a = fourier_coeffs(rule, np.ones(len(rule)), 10)
    assert a[0, 1] == pytest.approx(1.0, abs=1e-13)
    assert np.max(np.abs(a.values[1:])) < 1e-12


def test_fourier_coeffs_single_harmonic():
    n, ell0, k0 = 8, 5, 4
    rule = reference_rule(ell0 + n)
    idx = ell0 * ell0 + k0 - 1
    Z = harmonic_matrix(n, rule.nodes)[idx]
    a = fourier_coeffs(rule, Z, n)
    target = np.zeros((n + 1) ** 2)
    target[idx] = 1
    np.testing.assert_allclose(a.values, target, atol=1e-10)
    with pytest.raises(InvalidParameterError):
        fourier_coeffs(rule, Z[:-1], n)


def test_sigma_zero_data():
    rule = reference_rule(16)
    spec = OperatorSpec(rule, Filter(3), 8)
    X = random_points(1, 30).points
    for path in ("kernel", "coefficient"):
        assert np.all(sigma_eval(spec, np.zeros(len(rule)), X, path) == 0)


@pytest.mark.parametrize("path", ["kernel", "coefficient"])
def test_reproduction_with_three_halves_rule(rng, path):
    n = 20
    rule = reference_rule(3 * n // 2)
    _, P = poly(rng, n // 2)
    X = random_points(2, 200).points
    out = sigma_eval(OperatorSpec(rule, Filter(5), n), P(rule.nodes), X, path)
    np.testing.assert_allclose(out, P(X), atol=1e-9)


def test_reproduction_on_scattered_rule(rng):
    n = 16
    C = random_points(3, 4000)
    rule = lsq_weights(C, 3 * n // 2)
    X = random_points(4, 300).points
    worst = 0.0
    for _ in range(100):
        _, P = poly(rng, n // 2)
        err = approx_error(OperatorSpec(rule, Filter(5), n), P, X, path="coefficient")
        worst = max(worst, err.sup_err)
    assert worst < 1e-8


def test_h1_is_hyperinterpolation():
    n = 10
    rule = reference_rule(2 * n)
    f = lambda x: np.exp(x[:, 0] - x[:, 2])  # noqa: E731
    X = random_points(5, 50).points
    Y = harmonic_matrix(n, rule.nodes)
    proj = harmonic_matrix(n, X).T @ (Y @ (rule.weights * f(rule.nodes)))
    out = sigma_eval(OperatorSpec(rule, Filter(1), n), f(rule.nodes), X, "kernel")
    np.testing.assert_allclose(out, proj, atol=1e-12)


def test_path_equivalence_multiple_rhs(rng):
    rule = lsq_weights(random_points(6, 3000), 24)
    spec = OperatorSpec(rule, Filter(4), 12)
    Z = rng.standard_normal((len(rule), 3))
    X = random_points(7, 100).points
    a = sigma_eval(spec, Z, X, "kernel")
    b = sigma_eval(spec, Z, X, "coefficient")
    assert a.shape == b.shape == (100, 3)
    np.testing.assert_allclose(a, b, atol=1e-11 * np.abs(a).max())
    assert np.allclose(sigma_eval(spec, Z, X, "auto"), a, atol=1e-11 * np.abs(a).max())
    with pytest.raises(InvalidParameterError):
        sigma_eval(spec, Z, X, "fast")


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2 ** 31), st.floats(-5, 5))
def test_linearity(seed, alpha):
    rng = np.random.default_rng(seed)
    rule = reference_rule(12)
    spec = OperatorSpec(rule, Filter(3), 6)
    Z1, Z2 = rng.standard_normal((2, len(rule)))
    X = random_points(seed % 1000, 20).points
    lhs = sigma_eval(spec, Z1 + alpha * Z2, X, "coefficient")
    rhs = sigma_eval(spec, Z1, X, "coefficient") + alpha * sigma_eval(spec, Z2, X, "coefficient")
    np.testing.assert_allclose(lhs, rhs, atol=1e-12 * (1 + abs(alpha)) * 10)


def test_rotation_equivariance():
    C = random_points(8, 2000)
    R = Rotation.from_euler("zyx", [0.3, -1.1, 2.0]).as_matrix()
    f = lambda x: np.exp(x @ np.array([0.4, -0.2, 0.9]))  # noqa: E731
    X = random_points(9, 100).points
    n = 10
    rule = lsq_weights(C, 2 * n)
    rot_rule = QuadratureRule(C.points @ R.T, rule.weights, rule.exactness_degree)
    g = lambda x: f(x @ R)  # f composed with the inverse rotation  # noqa: E731
    a = sigma_eval(OperatorSpec(rule, Filter(5), n), f(C.points), X, "kernel")
    b = sigma_eval(OperatorSpec(rot_rule, Filter(5), n), g(rot_rule.nodes), X @ R.T, "kernel")
    np.testing.assert_allclose(a, b, atol=1e-9)


def test_sigma_star_cases():
    n = 12
    X = random_points(10, 40).points
    np.testing.assert_allclose(sigma_star(Filter(5), n, lambda x: np.ones(len(x)), X), 1.0,
                               atol=1e-12)
    low = lambda x: harmonic_matrix(5, x)[30]  # degree 5 <= n/2  # noqa: E731
    np.testing.assert_allclose(sigma_star(Filter(5), n, low, X), low(X), atol=1e-11)
    high = lambda x: harmonic_matrix(14, x)[14 ** 2 + 3]  # noqa: E731
    np.testing.assert_allclose(sigma_star(Filter(5), n, high, X, quad_degree=28), 0.0, atol=1e-11)
    with pytest.raises(InvalidParameterError):
        sigma_star(Filter(5), n, high, X, quad_degree=2 * n - 1)


def test_smooth_error_decreases_with_n():
    f = lambda x: np.exp(x.sum(axis=-1))  # noqa: E731
    X = random_points(11, 500).points
    errs = []
    for n in (4, 8, 16):
        spec = OperatorSpec(reference_rule(4 * n), Filter(5), n)
        errs.append(approx_error(spec, f, X).sup_err)
    assert errs[0] > 10 * errs[1] > 100 * errs[2]


def test_least_squares_recovers_polynomial(rng):
    C = random_points(12, 1500)
    c, P = poly(rng, 8)
    a = least_squares_coeffs(C, P(C.points), 8)
    np.testing.assert_allclose(a.values, c, atol=1e-11)
    X = random_points(13, 30).points
    np.testing.assert_allclose(synthesize(a, X), P(X), atol=1e-11)


def test_coefficient_path_requires_s2():
    nodes = np.array([[1.0, 0, 0, 0], [0, 1.0, 0, 0]])
    rule = QuadratureRule(nodes, np.array([0.5, 0.5]), 1)
    with pytest.raises(InvalidParameterError):
        sigma_eval(OperatorSpec(rule, Filter(1), 1), np.ones(2), nodes, "coefficient")
    # kernel path works for q = 3
    out = sigma_eval(OperatorSpec(rule, Filter(1), 1), np.ones(2), nodes, "kernel")
    assert out.shape == (2,)
