import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import special

from sphquad.errors import DomainError, InvalidParameterError
from sphquad.kernel import (KernelSpec, clenshaw_gegenbauer, kernel_diagnostics,
                            kernel_eval, kernel_eval_forward, kernel_eval_jacobi,
                            kernel_matrix, kernel_profile, kernel_row)
from sphquad.quadrature import reference_rule
from sphquad.specfun import Filter, harmonic_matrix


def test_small_cases():
    assert kernel_eval(KernelSpec(2, 4, Filter(1)), 1.0) == pytest.approx(25.0)
    u = np.linspace(-1, 1, 9)
    np.testing.assert_allclose(kernel_eval(KernelSpec(2, 1, Filter(1)), u), 1 + 3 * u, atol=1e-15)
    # q = 1: 1 + 2 sum cos(l t), the Dirichlet kernel
    t = np.linspace(0.1, 3.0, 7)
    dirichlet = np.sin(5.5 * t) / np.sin(t / 2)
    np.testing.assert_allclose(kernel_eval(KernelSpec(1, 5, Filter(1)), np.cos(t)), dirichlet,
                               rtol=1e-12)


@pytest.mark.parametrize("q, n, m", [(2, 16, 1), (2, 64, 5), (3, 40, 3), (5, 30, 4)])
def test_three_forms_agree(q, n, m):
    spec = KernelSpec(q, n, Filter(m))
    u = np.cos(np.linspace(0, np.pi, 301))
    a = kernel_eval(spec, u)
    scale = np.max(np.abs(a))
    np.testing.assert_allclose(kernel_eval_forward(spec, u), a, atol=1e-12 * scale)
    np.testing.assert_allclose(kernel_eval_jacobi(spec, u), a, atol=1e-11 * scale)


def test_clenshaw_against_legendre_sum(rng):
    coef = rng.standard_normal(20)
    u = np.linspace(-1, 1, 13)
    ref = special.eval_legendre(np.arange(20)[:, None], u) .T @ coef
    np.testing.assert_allclose(clenshaw_gegenbauer(coef, 2, u), ref, atol=1e-12)


def test_kernel_equals_filtered_harmonic_sum(unit_points):
    n = 12
    spec = KernelSpec(2, n, Filter(3))
    x, y = unit_points(5), unit_points(7)
    h = Filter(3).coefficients(n)
    Yx, Yy = harmonic_matrix(n, x), harmonic_matrix(n, y)
    deg = np.repeat(np.arange(n + 1), 2 * np.arange(n + 1) + 1)
    ref = (Yx * h[deg][:, None]).T @ Yy
    np.testing.assert_allclose(kernel_matrix(spec, x, y), ref, atol=1e-12)
    np.testing.assert_allclose(kernel_row(spec, x[0], y), ref[0], atol=1e-12)


@pytest.mark.parametrize("n", [16, 64])
def test_reproduction_of_low_degree_polynomials(rng, unit_points, n):
    rule = reference_rule(2 * n)
    spec = KernelSpec(2, n, Filter(5))
    half = n // 2
    x = unit_points(20)
    c = rng.standard_normal((half + 1) ** 2)
    P = lambda pts: harmonic_matrix(half, pts).T @ c  # noqa: E731
    out = kernel_matrix(spec, x, rule.nodes) @ (rule.weights * P(rule.nodes))
    np.testing.assert_allclose(out, P(x), atol=1e-9 * np.linalg.norm(c))


def test_decay_and_norms():
    d = kernel_diagnostics(KernelSpec(2, 64, Filter(5)))
    assert d.decay_slope <= -3.5
    assert d.decay_theory == -4.5
    assert d.peak == pytest.approx(kernel_eval(KernelSpec(2, 64, Filter(5)), 1.0))
    # L2^2 of Phi_n equals sum h^2 d_l (Parseval)
    h = Filter(5).coefficients(64)
    assert d.l2_norm_sq == pytest.approx(np.sum(h ** 2 * (2 * np.arange(65) + 1)), rel=1e-10)
    # smoother filters localize better
    d1 = kernel_diagnostics(KernelSpec(2, 64, Filter(1)))
    assert d.decay_slope < d1.decay_slope
    assert d.l1_norm < d1.l1_norm


def test_l1_norm_bounded_in_n():
    vals = [kernel_diagnostics(KernelSpec(2, n, Filter(5))).l1_norm for n in (16, 32, 64, 128)]
    assert max(vals) < 1.6 * min(vals)


def test_profile_and_errors():
    theta, vals = kernel_profile(KernelSpec(2, 8, Filter(2)), count=5, theta_max=1.0)
    assert theta.shape == vals.shape == (5,)
    with pytest.raises(DomainError):
        kernel_eval(KernelSpec(2, 8, Filter(2)), 1.5)
    with pytest.raises(InvalidParameterError):
        KernelSpec(2, 0, Filter(2))
    with pytest.raises(InvalidParameterError):
        KernelSpec(0, 4, Filter(2))


@settings(max_examples=25, deadline=None)
@given(st.integers(1, 5), st.integers(1, 80), st.integers(1, 6))
def test_peak_is_filtered_dimension_sum(q, n, m):
    spec = KernelSpec(q, n, Filter(m))
    assert kernel_eval(spec, 1.0) == pytest.approx(spec.coefficients().sum(), rel=1e-12)
