"""Checks on constructed rules: computed Gram matrix, weight statistics,
Gram spectrum and Marcinkiewicz-Zygmund ratios."""
from dataclasses import dataclass, asdict
import math

import numpy as np

from ..errors import InvalidParameterError
from ..geometry import PointSet, dyadic_triangulation
from ..specfun import harmonic_matrix
from .design import HarmonicDesign
from .rules import QuadratureRule, reference_rule
from .solvers import inverse_iteration, lanczos_extremes, power_iteration


@dataclass
class VerificationReport:
    gcom_max_err: float
    moment_max_err: float
    weight_sum: float
    weight_abs_sum: float
    min_w: float
    max_w: float
    positive_count: int
    lambda_min: float = math.nan
    lambda_max: float = math.nan
    condition: float = math.nan

    def set_spectrum(self, lmin, lmax):
        self.lambda_min, self.lambda_max = float(lmin), float(lmax)
        self.condition = self.lambda_max / self.lambda_min if lmin > 0 else math.inf

    def as_dict(self):
        return asdict(self)


def moment_errors(rule, n):
    """|sum_xi w_xi Y_j(xi) - delta_{j,1}| for all harmonics of degree <= n."""
    design = HarmonicDesign(rule.nodes, n)
    m = design.matvec(rule.weights)
    m[0] -= 1.0
    return np.abs(m)


def computed_gram(rule, n_check):
    """G^COM over the basis of degree <= floor(n_check / 2)."""
    half = n_check // 2
    G = HarmonicDesign(rule.nodes, half).gram(rule.weights)
    return G


def verify_exactness(rule, n_check):
    """Report the entrywise error of G^COM against the identity.

    G^COM_{jk} = sum_xi w_xi Y_j(xi) Y_k(xi) over harmonics of degree at most
    floor(n_check/2), so every product has degree <= n_check.  The largest
    moment error up to degree n_check is reported as well.
    """
    if rule.nodes.shape[1] != 3:
        raise InvalidParameterError("verification is implemented on S^2")
    G = computed_gram(rule, n_check)
    G[np.diag_indices_from(G)] -= 1.0
    w = rule.weights
    return VerificationReport(
        gcom_max_err=float(np.max(np.abs(G))),
        moment_max_err=float(np.max(moment_errors(rule, n_check))),
        weight_sum=float(w.sum()),
        weight_abs_sum=float(np.abs(w).sum()),
        min_w=float(w.min()),
        max_w=float(w.max()),
        positive_count=int(np.count_nonzero(w > 0)),
    )


def certified_degree(rule, max_degree, tol=1e-8):
    """Largest n <= max_degree whose G^COM check passes at ``tol``.

    The moment vector is computed once at ``max_degree`` and G^COM only for
    the candidates that pass the cheaper moment test.
    """
    mom = moment_errors(rule, max_degree)
    for n in range(max_degree, -1, -1):
        if np.max(mom[: (n + 1) ** 2]) > tol:
            continue
        if verify_exactness(rule, n).gcom_max_err <= tol:
            return n
    return -1


def gram_spectrum(C, n, tol=1e-6, method="lanczos", design=None):
    """(lambda_min, lambda_max, condition) of G_N for the point set C.

    ``method='lanczos'`` uses ARPACK; ``method='power'`` runs power
    iteration for the top and CG-based inverse iteration for the bottom.
    """
    design = design or HarmonicDesign(C.points, n)
    v = C.measure if isinstance(C, PointSet) else np.asarray(C.weights)
    mv = lambda r: design.gram_matvec(v, r)  # noqa: E731
    if method == "lanczos":
        lmin, lmax = lanczos_extremes(mv, design.N, tol=tol)
    elif method == "power":
        lmax = power_iteration(mv, design.N, tol=tol)[0]
        lmin = inverse_iteration(mv, design.N, tol=tol)[0]
    else:
        raise InvalidParameterError(f"unknown spectrum method {method!r}")
    cond = lmax / lmin if lmin > 0 else math.inf
    return lmin, lmax, cond


@dataclass
class MZStats:
    p_norm: float
    ratio_min: float
    ratio_max: float
    ratios: np.ndarray

    @property
    def inverse_max(self):
        """max continuous/discrete norm; infinite when some P vanishes on C."""
        return math.inf if self.ratio_min <= 0 else 1.0 / self.ratio_min

    def within(self, lo, hi):
        return self.ratio_min >= lo and self.ratio_max <= hi


def _discrete_masses(C):
    if isinstance(C, QuadratureRule):
        return C.nodes, np.abs(C.weights)
    return C.points, C.measure


def mz_check(C, n, p_norm=2, trials=100, seed=0, coeffs=None, probe_level=7):
    """Ratios of discrete to continuous L^p norms of random polynomials.

    Polynomials have i.i.d. standard normal coefficients in the harmonic
    basis of degree <= n (``coeffs`` (N, k) adds explicit ones).  The
    discrete norm uses the measure of a PointSet or |w| of a rule; the
    continuous norm uses the reference rule of degree 2n for p in {1, 2} and
    the maximum over dyadic centers at ``probe_level`` for p = inf.
    """
    nodes, mass = _discrete_masses(C)
    N = (n + 1) ** 2
    rng = np.random.default_rng(seed)
    A = rng.standard_normal((N, trials))
    if coeffs is not None:
        A = np.column_stack([A, np.asarray(coeffs, dtype=float).reshape(N, -1)])
    vals = HarmonicDesign(nodes, n).rmatvec(A)
    if p_norm == math.inf:
        disc = np.max(np.abs(vals), axis=0)
        probes = dyadic_triangulation(probe_level).centers
        cont = np.max(np.abs(HarmonicDesign(probes, n).rmatvec(A)), axis=0)
    elif p_norm in (1, 2):
        disc = (mass @ np.abs(vals) ** p_norm) ** (1.0 / p_norm)
        ref = reference_rule(2 * n)
        rvals = HarmonicDesign(ref.nodes, n).rmatvec(A)
        cont = (ref.weights @ np.abs(rvals) ** p_norm) ** (1.0 / p_norm)
    else:
        raise InvalidParameterError("p_norm must be 1, 2 or inf")
    ratios = disc / cont
    return MZStats(float(p_norm), float(ratios.min()), float(ratios.max()), ratios)
