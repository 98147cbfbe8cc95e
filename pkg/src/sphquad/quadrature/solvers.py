"""Conjugate gradients and extremal-eigenvalue iterations for SPD operators
given only through a matrix-vector product."""
from dataclasses import dataclass, field

import numpy as np

from ..errors import ConvergenceError


@dataclass
class CGResult:
    x: np.ndarray
    iterations: int
    rel_residual: float
    converged: bool
    breakdown: bool = False
    history: list = field(default_factory=list)


def conjugate_gradient(matvec, b, rel_tol=1e-14, max_iter=None, stall_window=500):
    """Solve A x = b for symmetric positive (semi)definite A.

    Stops when ||r|| <= rel_tol ||b|| (recursively updated residual), after
    ``max_iter`` steps, when p^T A p <= 0 (``breakdown``: A is singular or
    indefinite on the Krylov space), or when the best residual has not
    halved for ``stall_window`` consecutive steps.
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    max_iter = 10 * n if max_iter is None else max_iter
    bnorm = np.linalg.norm(b)
    x = np.zeros_like(b)
    if bnorm == 0.0:
        return CGResult(x, 0, 0.0, True)
    r = b.copy()
    p = r.copy()
    rr = r @ r
    history = [1.0]
    best, best_it = 1.0, 0
    for it in range(1, max_iter + 1):
        Ap = matvec(p)
        pAp = p @ Ap
        if not pAp > 1e-300 * (p @ p):
            return CGResult(x, it, history[-1], False, True, history)
        alpha = rr / pAp
        x += alpha * p
        r -= alpha * Ap
        rr_new = r @ r
        rel = np.sqrt(rr_new) / bnorm
        history.append(rel)
        if rel <= rel_tol:
            return CGResult(x, it, rel, True, False, history)
        if rel < 0.5 * best:
            best, best_it = rel, it
        elif it - best_it > stall_window:
            break
        p = r + (rr_new / rr) * p
        rr = rr_new
    return CGResult(x, it, history[-1], False, False, history)


def power_iteration(matvec, n, tol=1e-6, max_iter=20000, seed=0):
    """Largest eigenvalue of an SPD operator by power iteration.

    Converged when the Rayleigh quotient changes by less than
    ``tol * 1e-2`` relative over one step.  Raises ConvergenceError with the
    iterate history otherwise.
    """
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    history = []
    rho_old = None
    for _ in range(max_iter):
        y = matvec(x)
        rho = float(x @ y)
        history.append(rho)
        x = y / np.linalg.norm(y)
        if rho_old is not None and abs(rho - rho_old) <= 1e-2 * tol * abs(rho):
            return rho, x, history
        rho_old = rho
    raise ConvergenceError("power iteration did not converge", history)


def inverse_iteration(matvec, n, tol=1e-6, max_iter=500, seed=1, inner_tol=1e-12):
    """Smallest eigenvalue of an SPD operator; each step solves by CG."""
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(n)
    x /= np.linalg.norm(x)
    history = []
    rho_old = None
    for _ in range(max_iter):
        res = conjugate_gradient(matvec, x, rel_tol=inner_tol)
        y = res.x
        # Rayleigh quotient of A at the new iterate: x^T y / y^T y
        rho = float(x @ y) / float(y @ y)
        history.append(rho)
        x = y / np.linalg.norm(y)
        if rho_old is not None and abs(rho - rho_old) <= 1e-2 * tol * abs(rho):
            return rho, x, history
        rho_old = rho
    raise ConvergenceError("inverse iteration did not converge", history)


def lanczos_extremes(matvec, n, tol=1e-6):
    """(lambda_min, lambda_max) with ARPACK's restarted Lanczos."""
    from scipy.sparse.linalg import LinearOperator, eigsh

    op = LinearOperator((n, n), matvec=matvec, dtype=float)
    if n <= 2:
        A = np.column_stack([matvec(e) for e in np.eye(n)])
        ev = np.linalg.eigvalsh(0.5 * (A + A.T))
        return float(ev[0]), float(ev[-1])
    v0 = np.ones(n) / np.sqrt(n)
    lmax = eigsh(op, k=1, which="LA", tol=tol * 1e-2, v0=v0, return_eigenvectors=False)[0]
    lmin = eigsh(op, k=1, which="SA", tol=tol * 1e-2, v0=v0, return_eigenvectors=False)[0]
    return float(lmin), float(lmax)
