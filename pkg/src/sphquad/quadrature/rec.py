"""Quadrature weights by a Stieltjes-type recurrence for polynomials
orthonormal with respect to the node measure.

Monomials in the q+1 coordinates are enumerated degree by degree in
lexicographic order.  On the sphere x_{q+1}^2 = 1 - (x_1^2 + ... + x_q^2), so
only monomials with last exponent 0 or 1 are kept; their restrictions are
linearly independent and there are exactly dim(Pi_n) of degree <= n.  Each
monomial u_{k+1} equals a coordinate times an earlier monomial u_{p(k)},
and the orthonormal t_{k+1} is obtained from coordinate * t_{p(k)} by
orthogonalizing only against t_j whose degree lies in
[deg u_{k+1} - 2, deg u_k].
"""
from dataclasses import dataclass
import itertools
import logging
import time

import numpy as np

from ..errors import ConstructionError, InvalidParameterError
from ..specfun import dim_polyspace
from .rules import QuadratureRule, reference_rule
from .verify import certified_degree

log = logging.getLogger(__name__)


def reduced_monomials(q, max_degree):
    """Exponent tuples of the reduced monomials of degree <= max_degree.

    Graded, and lexicographically descending within a degree, so the first
    coordinate varies slowest.  The last exponent is 0 or 1.
    """
    out = []
    for d in range(max_degree + 1):
        level = [e for e in itertools.product(range(d + 1), repeat=q + 1)
                 if sum(e) == d and e[-1] <= 1]
        out.extend(sorted(level, reverse=True))
    return out


@dataclass(frozen=True)
class LadderStep:
    """u_{k+1} = x_axis * u_p; ``k`` and ``p`` are 1-based as in the recurrence."""

    k: int
    p: int
    axis: int


def monomial_ladder(q, count):
    """Minimal index p(k) and coordinate axis with x_axis u_{p(k)} = u_{k+1},
    for k = 1..count."""
    if q < 1:
        raise InvalidParameterError("q must be >= 1")
    # enough degrees for count + 1 monomials
    deg = 0
    while dim_polyspace(q, deg) < count + 1:
        deg += 1
    mons = reduced_monomials(q, deg)
    index = {e: i for i, e in enumerate(mons)}
    steps = []
    for k in range(1, count + 1):
        target = mons[k]  # u_{k+1}, 0-based position k
        best = None
        for axis in range(q + 1):
            if target[axis] == 0:
                continue
            parent = list(target)
            parent[axis] -= 1
            j = index[tuple(parent)]
            if best is None or j < best[0]:
                best = (j, axis)
        steps.append(LadderStep(k, best[0] + 1, best[1]))
    return steps


def _monomial_degrees(q, count):
    deg = 0
    while dim_polyspace(q, deg) < count:
        deg += 1
    return np.array([sum(e) for e in reduced_monomials(q, deg)[:count]])


def rec_weights(C, L_degree, seed=None, breakdown_tol=1e-24, cert_tol=1e-8,
                reorthogonalize=False):
    """Weights for the point set C from the orthonormal recurrence.

    Parameters
    ----------
    C : PointSet
        Nodes and the measure nu used for the inner product.
    L_degree : int
        Largest target degree; at most N = dim(Pi_L) polynomials are built.
    seed : QuadratureRule, optional
        Rule exact for degree ``L_degree`` used to integrate each t_k;
        defaults to :func:`reference_rule`.
    breakdown_tol : float
        Stop when the squared norm of the new polynomial falls below
        ``breakdown_tol`` times the squared norm before orthogonalization.
    reorthogonalize : bool
        Repeat the windowed orthogonalization once (same window).  Off by
        default.

    Returns
    -------
    (QuadratureRule, int)
        The rule and the certified exactness degree: the largest n whose
        computed-Gram check passes at ``cert_tol``.
    """
    if C.dim != 2:
        raise InvalidParameterError("the recurrence is implemented on S^2")
    if L_degree < 1:
        raise InvalidParameterError("L_degree must be >= 1")
    seed = seed or reference_rule(L_degree)
    if seed.exactness_degree < L_degree:
        raise InvalidParameterError(
            f"seed rule is exact to degree {seed.exactness_degree} < {L_degree}")
    t0 = time.perf_counter()
    q = C.dim
    N_target = dim_polyspace(q, L_degree)
    degs = _monomial_degrees(q, N_target)
    ladder = monomial_ladder(q, N_target - 1)

    # values on the data nodes and the seed nodes side by side
    M = len(C)
    X = np.vstack([C.points, seed.nodes]).T
    v = C.measure
    lam = seed.weights

    def ip(a, b):
        return float(v @ (a[:M] * b[:M]))

    # Gram-Schmidt on 1, x_1, ..., x_{q+1}
    t = {}
    raw = [np.ones(X.shape[1])] + [X[i].copy() for i in range(q + 1)]
    for k, T in enumerate(raw):
        for j in range(k):
            T -= ip(T, t[j]) * t[j]
        I = ip(T, T)
        if I <= 0.0:
            raise ConstructionError("initial Gram-Schmidt broke down", residual=I)
        t[k] = T / np.sqrt(I)
    gammas = [float(lam @ t[k][M:]) for k in range(q + 2)]
    W = sum(g * t[k][:M] for k, g in enumerate(gammas))

    N = q + 2
    broke = False
    for k in range(q + 1, N_target - 1):
        step = ladder[k]  # produces 0-based index k + 1
        T = X[step.axis] * t[step.p - 1]
        scale = ip(T, T)
        lo = degs[k + 1] - 2
        window = [j for j in range(k + 1) if degs[j] >= lo]
        for _ in range(2 if reorthogonalize else 1):
            for j in window:
                T -= ip(T, t[j]) * t[j]
        I = ip(T, T)
        if I <= breakdown_tol * scale:
            broke = True
            log.info("recurrence breakdown at k=%d (I=%.3e)", k + 1, I)
            break
        t[k + 1] = T / np.sqrt(I)
        g = float(lam @ t[k + 1][M:])
        gammas.append(g)
        W += g * t[k + 1][:M]
        N += 1
        # keep only the last three degrees
        for j in [j for j in t if degs[j] < lo]:
            del t[j]

    full_degree = 0
    while dim_polyspace(q, full_degree + 1) <= N:
        full_degree += 1
    if full_degree < 2:
        raise ConstructionError(f"recurrence broke down after {N} polynomials (degree < 2)")
    weights = v * W
    rule = QuadratureRule(C.points, weights, full_degree)
    achieved = certified_degree(rule, full_degree, tol=cert_tol)
    info = {"construction": "rec", "N": N, "N_target": N_target, "breakdown": broke,
            "full_degree": full_degree, "certified_degree": achieved,
            "seconds": time.perf_counter() - t0}
    return QuadratureRule(C.points, weights, max(achieved, 0), info), achieved
