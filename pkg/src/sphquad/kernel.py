"""The localized filtered kernel

    Phi_n(h; u) = sum_{l=0}^{n} h(l/n) d_l^q P_l(u),

with P_l the Gegenbauer polynomial normalized by P_l(1) = 1.  This is the
same function as c_q sum_l h(l/n) p_l(1) p_l(u) written with orthonormal
Jacobi polynomials, but it avoids large normalization constants.
"""
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InvalidParameterError
from .specfun import (Filter, dim_harmonic, gegenbauer_normalized_seq,
                      jacobi_orthonormal_seq, sphere_constant)


@dataclass(frozen=True)
class KernelSpec:
    q: int
    n: int
    filter: Filter

    def __post_init__(self):
        if self.q < 1:
            raise InvalidParameterError("q must be >= 1")
        if self.n < 1:
            raise InvalidParameterError("kernel degree n must be >= 1")

    def coefficients(self):
        """c_l = h(l/n) d_l^q, l = 0..n."""
        h = self.filter.coefficients(self.n)
        d = np.array([dim_harmonic(self.q, ell) for ell in range(self.n + 1)], dtype=float)
        return h * d


def _check_u(u):
    u = np.asarray(u, dtype=float)
    if np.any(np.abs(u) > 1.0):
        raise DomainError("kernel argument must lie in [-1, 1]")
    return u


def clenshaw_gegenbauer(coef, q, u):
    """sum_l coef[l] P_l(u) by backward (Clenshaw) summation."""
    lam = (q - 1) / 2.0
    n = len(coef) - 1
    b1 = np.zeros_like(u)
    b2 = np.zeros_like(u)
    # P_{l+1} = alpha_l P_l + beta_l P_{l-1}
    for ell in range(n, 0, -1):
        alpha = 2.0 * (ell + lam) / (ell + 2.0 * lam) * u
        beta_next = -(ell + 1.0) / (ell + 1.0 + 2.0 * lam)
        b1, b2 = coef[ell] + alpha * b1 + beta_next * b2, b1
    beta1 = -1.0 / (1.0 + 2.0 * lam)
    return coef[0] + u * b1 + beta1 * b2


def kernel_eval(spec, u):
    """Phi_n(h; u) for |u| <= 1 (scalar or array)."""
    u = _check_u(u)
    out = clenshaw_gegenbauer(spec.coefficients(), spec.q, u)
    return float(out) if out.ndim == 0 else out


def kernel_eval_forward(spec, u):
    """Forward-recurrence sum; cross-check for :func:`kernel_eval`."""
    u = _check_u(u)
    P = gegenbauer_normalized_seq(spec.q, spec.n, u)
    c = spec.coefficients()
    return np.tensordot(c, P, axes=(0, 0))


def kernel_eval_jacobi(spec, u):
    """Literal form c_q sum_l h(l/n) p_l(1) p_l(u) with orthonormal Jacobi p_l."""
    u = _check_u(u)
    h = spec.filter.coefficients(spec.n)
    p1 = jacobi_orthonormal_seq(spec.q, spec.n, 1.0)
    pu = jacobi_orthonormal_seq(spec.q, spec.n, u)
    return sphere_constant(spec.q) * np.tensordot(h * p1, pu, axes=(0, 0))


def kernel_row(spec, x, nodes, chunk=1 << 16):
    """[Phi_n(h; x . xi) for xi in nodes]."""
    x = np.asarray(x, dtype=float)
    nodes = np.asarray(nodes, dtype=float).reshape(-1, x.shape[-1])
    out = np.empty(nodes.shape[0])
    for s in range(0, nodes.shape[0], chunk):
        u = np.clip(nodes[s:s + chunk] @ x, -1.0, 1.0)
        out[s:s + chunk] = kernel_eval(spec, u)
    return out


def kernel_matrix(spec, X, nodes):
    """Phi_n(h; x_i . xi_j) for test points X (P, q+1) and nodes (M, q+1)."""
    u = np.clip(np.asarray(X, dtype=float) @ np.asarray(nodes, dtype=float).T, -1.0, 1.0)
    return clenshaw_gegenbauer(spec.coefficients(), spec.q, u)


def _surface_factor(q):
    """Ratio |S^{q-1}| / |S^q|: density of u = x . xi under the normalized measure."""
    from scipy.special import gammaln
    return np.exp(gammaln((q + 1) / 2.0) - gammaln(q / 2.0) - 0.5 * np.log(np.pi))


@dataclass
class KernelDiagnostics:
    l1_norm: float
    l2_norm_sq: float
    peak: float
    decay_slope: float
    decay_slope_envelope: float
    decay_theory: float


def kernel_diagnostics(spec):
    """L1 and L2 norms, peak value and fitted off-diagonal decay of Phi_n.

    Norms are integrals against the normalized surface measure, taken in
    the variable u = x . xi with Gauss-Jacobi quadrature of ample degree
    (exact for the squared kernel).  ``decay_slope`` is the least-squares
    slope of log|Phi_n(cos t)| against log(n t) for t in [4/n, 1.5],
    skipping points where |Phi_n| < 1e-13 * peak; ``decay_slope_envelope``
    fits only the local maxima of |Phi_n|.  The theoretical exponent is
    1/2 - q/2 - S with S the filter smoothness.
    """
    from scipy.special import roots_jacobi

    q, n = spec.q, spec.n
    a = q / 2.0 - 1.0
    # degree 2n integrand for L2, |Phi| for L1 needs many more nodes
    k = max(4 * n + 64, 2 * n + 2)
    t, w = roots_jacobi(k, a, a)
    vals = kernel_eval(spec, t)
    dens = _surface_factor(q)
    l1 = float(dens * np.sum(w * np.abs(vals)))
    l2 = float(dens * np.sum(w * vals ** 2))
    peak = float(kernel_eval(spec, 1.0))

    theta = np.linspace(4.0 / n, 1.5, 400)
    phi = np.abs(kernel_eval(spec, np.cos(theta)))
    keep = phi > 1e-13 * peak
    logx = np.log(n * theta)
    logy = np.log(np.where(keep, phi, 1.0))
    slope = float(np.polyfit(logx[keep], logy[keep], 1)[0])
    # envelope variant: local maxima of |Phi| between oscillation zeros
    env = keep.copy()
    env[1:-1] &= (phi[1:-1] >= phi[:-2]) & (phi[1:-1] >= phi[2:])
    env_slope = float(np.polyfit(logx[env], logy[env], 1)[0]) if env.sum() >= 3 else slope
    theory = 0.5 - q / 2.0 - spec.filter.smoothness
    return KernelDiagnostics(l1, l2, peak, slope, env_slope, theory)


def kernel_profile(spec, count=512, theta_max=np.pi):
    """(theta, Phi_n(h; cos theta)) samples for plotting."""
    theta = np.linspace(0.0, theta_max, count)
    return theta, kernel_eval(spec, np.cos(theta))
