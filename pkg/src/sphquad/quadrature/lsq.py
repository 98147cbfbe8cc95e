"""Least-squares quadrature weights from a node measure.

With Y the harmonic design matrix at the nodes and v the node masses,
solve Y diag(v) Y^T b = e_1 and return w = v * (Y^T b).  The rule is exact
for every polynomial in the span of the first N harmonics whenever the
Gram matrix is positive definite, and among all such rules on the same
nodes it minimizes sum w^2 / v.
"""
from dataclasses import dataclass
import logging
import time

import numpy as np
from scipy.linalg import cho_factor, cho_solve, LinAlgError

from ..errors import ConstructionError, InvalidParameterError
from .design import DEFAULT_CACHE_BYTES, HarmonicDesign
from .rules import QuadratureRule
from .solvers import conjugate_gradient

log = logging.getLogger(__name__)

MODES = ("matrix-free", "explicit-gram")
METHODS = ("cg", "cholesky")


@dataclass(frozen=True)
class SolverOptions:
    """Settings for the Gram solve.

    ``mode`` picks between products through the design matrix and an
    explicitly assembled Gram matrix.  ``method='cholesky'`` (explicit mode
    only) factors the Gram matrix instead of iterating.
    """

    rel_tol: float = 1e-14
    max_iter: int | None = None
    mode: str = "matrix-free"
    method: str = "cg"
    cache_bytes: int = DEFAULT_CACHE_BYTES

    def __post_init__(self):
        if not self.rel_tol > 0:
            raise InvalidParameterError("rel_tol must be positive")
        if self.mode not in MODES:
            raise InvalidParameterError(f"mode must be one of {MODES}")
        if self.method not in METHODS:
            raise InvalidParameterError(f"method must be one of {METHODS}")
        if self.method == "cholesky" and self.mode != "explicit-gram":
            raise InvalidParameterError("cholesky needs mode='explicit-gram'")


def solve_gram(design, v, rhs, opts):
    """Solve G_N x = rhs; returns (x, stats dict).

    ``rhs`` may be a vector or an (N, k) block (explicit-gram mode only for
    blocks).  Raises ConstructionError when the solve breaks down.
    """
    N = design.N
    t0 = time.perf_counter()
    if opts.mode == "explicit-gram":
        G = design.gram(v)
        if opts.method == "cholesky":
            try:
                factor = cho_factor(G, lower=False, overwrite_a=True, check_finite=False)
            except LinAlgError as exc:
                raise ConstructionError(f"Gram matrix is not positive definite: {exc}") from exc
            x = cho_solve(factor, rhs, check_finite=False)
            stats = {"solver": "cholesky", "iterations": 0}
            if np.ndim(rhs) == 1:
                # G was overwritten by its factor; residual via the design
                r = design.gram_matvec(v, x) - rhs
                stats["rel_residual"] = float(np.linalg.norm(r) / np.linalg.norm(rhs))
            stats["seconds"] = time.perf_counter() - t0
            return x, stats
        matvec = G.__matmul__
    else:
        matvec = lambda r: design.gram_matvec(v, r)  # noqa: E731

    if np.ndim(rhs) > 1:
        cols = [solve_gram(design, v, rhs[:, j], opts)[0] for j in range(rhs.shape[1])]
        return np.column_stack(cols), {"solver": "cg"}
    res = conjugate_gradient(matvec, rhs, rel_tol=opts.rel_tol,
                             max_iter=opts.max_iter if opts.max_iter else 10 * N)
    stats = {"solver": "cg", "iterations": res.iterations,
             "rel_residual": float(res.rel_residual),
             "seconds": time.perf_counter() - t0}
    if not res.converged:
        why = "breakdown (p^T G p <= 0)" if res.breakdown else "stagnation"
        raise ConstructionError(
            f"Gram solve failed by {why} after {res.iterations} iterations; "
            f"relative residual {res.rel_residual:.3e}. Some polynomial of the "
            f"target degree (nearly) vanishes on the nodes.",
            residual=res.rel_residual, history=res.history)
    log.debug("CG converged in %d iterations (residual %.2e)", res.iterations, res.rel_residual)
    return res.x, stats


def lsq_weights(C, n, opts=None, design=None):
    """Quadrature weights exact for degree ``n`` on the point set ``C``.

    Parameters
    ----------
    C : PointSet
        Nodes on S^2 and their measure v.
    n : int
        Target exactness degree; the Gram matrix has size N = (n+1)^2.
    opts : SolverOptions, optional
    design : HarmonicDesign, optional
        Reuse a precomputed design matrix for the same nodes and degree.

    Returns
    -------
    QuadratureRule
        ``info`` holds the solver statistics and the coefficient vector b.
    """
    opts = opts or SolverOptions()
    if C.dim != 2:
        raise InvalidParameterError("least-squares weights are implemented on S^2")
    if n < 0:
        raise InvalidParameterError("degree must be >= 0")
    design = design or HarmonicDesign(C.points, n, cache_bytes=opts.cache_bytes)
    if design.n != n:
        raise InvalidParameterError("design degree does not match n")
    N = design.N
    if len(C) < N:
        log.warning("only %d nodes for N = %d basis functions; the Gram matrix is singular",
                    len(C), N)
    e1 = np.zeros(N)
    e1[0] = 1.0
    b, stats = solve_gram(design, C.measure, e1, opts)
    w = C.measure * design.rmatvec(b)
    stats.update(construction="lsq", N=N, M=len(C))
    return QuadratureRule(C.points, w, n, {**stats, "b": b})
