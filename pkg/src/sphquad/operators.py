"""Filtered polynomial approximation from scattered data.

    sigma_n(C, W; h; Z, x) = sum_xi w_xi z_xi Phi_n(h; x . xi)

is evaluated either as that double sum ("kernel" path, any q) or, on S^2,
through the discrete harmonic coefficients

    a(l, k) = sum_xi w_xi z_xi Y_{l,k}(xi),   sigma_n(x) = sum h(l/n) a(l,k) Y_{l,k}(x)

("coefficient" path).  The two agree by the addition formula.
"""
from dataclasses import dataclass
import logging

import numpy as np

from .errors import InvalidParameterError
from .kernel import KernelSpec, kernel_matrix
from .quadrature.design import HarmonicDesign
from .quadrature.lsq import SolverOptions, solve_gram
from .quadrature.rules import QuadratureRule, reference_rule
from .specfun import Filter, harmonic_degrees

log = logging.getLogger(__name__)

PATHS = ("auto", "kernel", "coefficient")
KERNEL_BLOCK_BYTES = 64 << 20


@dataclass(frozen=True, eq=False)
class HarmonicCoeffs:
    """Coefficients a(l, k), l <= degree, stored flat in basis order.

    ``values`` has shape (N,) or (N, r) for r data vectors at once.
    """

    degree: int
    values: np.ndarray

    def __post_init__(self):
        if self.values.shape[0] != (self.degree + 1) ** 2:
            raise InvalidParameterError("coefficient count must be (degree+1)^2")

    def __getitem__(self, lk):
        """a(l, k) with 1 <= k <= 2l + 1."""
        ell, k = lk
        if not (0 <= ell <= self.degree and 1 <= k <= 2 * ell + 1):
            raise IndexError(f"no coefficient ({ell}, {k})")
        return self.values[ell * ell + k - 1]

    def filtered(self, filt, n=None):
        """Multiply degree-l coefficients by h(l/n); drops degrees above n."""
        n = self.degree if n is None else n
        h = filt.coefficients(n)
        keep = (min(n, self.degree) + 1) ** 2
        scale = h[harmonic_degrees(min(n, self.degree))]
        vals = self.values[:keep]
        vals = vals * (scale if vals.ndim == 1 else scale[:, None])
        return HarmonicCoeffs(min(n, self.degree), vals)


@dataclass(frozen=True, eq=False)
class OperatorSpec:
    """Rule (nodes, weights), filter and operator degree n."""

    rule: QuadratureRule
    filter: Filter
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise InvalidParameterError("operator degree must be >= 1")
        if 2 * self.n > self.rule.exactness_degree:
            log.debug("rule degree %d < 2n = %d: sigma_n is a discretized operator only",
                      self.rule.exactness_degree, 2 * self.n)

    @property
    def kernel(self):
        return KernelSpec(self.rule.nodes.shape[1] - 1, self.n, self.filter)


def _check_data(rule, Z):
    Z = np.asarray(Z, dtype=float)
    if Z.shape[0] != len(rule):
        raise InvalidParameterError(f"{Z.shape[0]} data values for {len(rule)} nodes")
    return Z


def fourier_coeffs(rule, Z, n, design=None):
    """a(l, k) = sum_xi w_xi z_xi Y_{l,k}(xi) for l <= n.

    ``Z`` may be (M,) or (M, r); ``design`` may supply a cached design
    matrix for the rule's nodes at degree n.
    """
    Z = _check_data(rule, Z)
    design = design or HarmonicDesign(rule.nodes, n)
    wz = rule.weights * Z if Z.ndim == 1 else rule.weights[:, None] * Z
    return HarmonicCoeffs(n, design.matvec(wz))


def synthesize(coeffs, X, filt=None, n=None):
    """sum_l h(l/n) sum_k a(l,k) Y_{l,k}(x) at test points X (P, 3)."""
    c = coeffs.filtered(filt, n) if filt is not None else coeffs
    X = np.asarray(X, dtype=float).reshape(-1, 3)
    return HarmonicDesign(X, c.degree).rmatvec(c.values)


def _kernel_sum(spec, Z, X):
    rule = spec.rule
    X = np.asarray(X, dtype=float).reshape(-1, rule.nodes.shape[1])
    wz = rule.weights * Z if Z.ndim == 1 else rule.weights[:, None] * Z
    out = np.empty((X.shape[0],) + Z.shape[1:])
    block = max(1, KERNEL_BLOCK_BYTES // (8 * len(rule)))
    kspec = spec.kernel
    for s in range(0, X.shape[0], block):
        K = kernel_matrix(kspec, X[s:s + block], rule.nodes)
        out[s:s + block] = K @ wz
    return out


def sigma_eval(spec, Z, X, path="auto"):
    """sigma_n(C, W; h; Z, x) at each test point x in X.

    ``path='kernel'`` sums kernel values directly (cost O(|X| M n));
    ``'coefficient'`` goes through harmonic coefficients (cost
    O((M + |X|) n^2), S^2 only); ``'auto'`` picks the coefficient path on
    S^2 unless the problem is tiny.
    """
    if path not in PATHS:
        raise InvalidParameterError(f"path must be one of {PATHS}")
    Z = _check_data(spec.rule, Z)
    q = spec.rule.nodes.shape[1] - 1
    X = np.asarray(X, dtype=float)
    if path == "auto":
        cheap_kernel = X.reshape(-1, q + 1).shape[0] * spec.n < 4 * (spec.n + 1) ** 2
        path = "kernel" if q != 2 or cheap_kernel else "coefficient"
    if path == "kernel":
        return _kernel_sum(spec, Z, X)
    if q != 2:
        raise InvalidParameterError("the coefficient path is implemented on S^2 only")
    coeffs = fourier_coeffs(spec.rule, Z, spec.n)
    return synthesize(coeffs, X, spec.filter, spec.n)


def sigma_star(filt, n, f, X, quad_degree=None, path="coefficient"):
    """The continuous operator sigma*_n(h; f) approximated with the
    reference rule of degree ``quad_degree`` (default 2n)."""
    quad_degree = 2 * n if quad_degree is None else quad_degree
    if quad_degree < 2 * n:
        raise InvalidParameterError("quad_degree must be >= 2n")
    rule = reference_rule(quad_degree)
    return sigma_eval(OperatorSpec(rule, filt, n), f(rule.nodes), X, path)


@dataclass
class ApproxError:
    sup_err: float
    errors: np.ndarray


def approx_error(spec, f, X, path="auto", Z=None):
    """Pointwise |f(x) - sigma_n(f)(x)| over the test points and its maximum.

    ``Z`` overrides the node data f(xi) (e.g. noisy samples).
    """
    X = np.asarray(X, dtype=float)
    Z = f(spec.rule.nodes) if Z is None else Z
    err = np.abs(f(X) - sigma_eval(spec, Z, X, path))
    return ApproxError(float(err.max()), err)


def least_squares_coeffs(C, Z, n, opts=None, design=None):
    """Coefficients of the discrete least-squares fit from degree <= n.

    Minimizes sum_xi v_xi (z_xi - P(xi))^2 over P of degree <= n by solving
    the Gram system G_N a = Y diag(v) Z.  ``Z`` may hold several data
    vectors as columns; they share one factorization in explicit mode.
    """
    opts = opts or SolverOptions(mode="explicit-gram", method="cholesky")
    Z = np.asarray(Z, dtype=float)
    design = design or HarmonicDesign(C.points, n, cache_bytes=opts.cache_bytes)
    vz = C.measure * Z if Z.ndim == 1 else C.measure[:, None] * Z
    a, _ = solve_gram(design, C.measure, design.matvec(vz), opts)
    return HarmonicCoeffs(n, a)
