"""Special functions: B-splines, the cutoff filters h_m, Gegenbauer and
orthonormal Jacobi polynomials, dimension counts and a real spherical
harmonic basis on S^2.

All harmonic bases are orthonormal with respect to the normalized surface
measure (total mass one), so the constant harmonic is identically 1.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InvalidParameterError

__all__ = [
    "Filter",
    "bspline_eval",
    "filter_eval",
    "dim_harmonic",
    "dim_polyspace",
    "sphere_constant",
    "gegenbauer_normalized_seq",
    "jacobi_orthonormal_seq",
    "sph_harm_basis",
    "harmonic_matrix",
    "harmonic_degrees",
    "harmonic_labels",
]


def bspline_eval(m, x):
    """Cardinal B-spline B_m of order ``m`` with support (0, m].

    Evaluated by the two-term recursion

        B_1 = indicator of (0, 1]
        B_m(x) = x/(m-1) B_{m-1}(x) + (m-x)/(m-1) B_{m-1}(x-1)

    unrolled into a triangular table, so the cost is O(m^2) per point.
    Accepts scalars or arrays; returns the same shape.
    """
    m = int(m)
    if m < 1:
        raise InvalidParameterError(f"B-spline order must be >= 1, got {m}")
    x = np.asarray(x, dtype=float)
    # table[i] holds B_j(x - i) for the current order j
    shifts = x[..., None] - np.arange(m)
    table = ((shifts > 0.0) & (shifts <= 1.0)).astype(float)
    for j in range(2, m + 1):
        lo = shifts[..., : m - j + 1]
        table = (lo * table[..., : m - j + 1]
                 + (j - lo) * table[..., 1: m - j + 2]) / (j - 1)
    out = table[..., 0]
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Filter:
    """Cutoff h_m(x) = sum_{k=-m}^{m} B_m(2 m x - k) on [0, inf).

    h_m equals 1 on [0, 1/2], vanishes beyond 1 and is non-increasing.
    ``order`` 1 gives the indicator of [0, 1] (the hyperinterpolation
    cutoff); for order m >= 3 the filter is m-2 times continuously
    differentiable and the kernel decay exponent is ``smoothness = m - 1``.
    """

    order: int

    def __post_init__(self):
        if int(self.order) < 1:
            raise InvalidParameterError(f"filter order must be >= 1, got {self.order}")

    @property
    def smoothness(self):
        return self.order - 1

    def __call__(self, x):
        return filter_eval(self, x)

    def coefficients(self, n):
        """Values h(l/n) for l = 0..n (the filter vanishes for l > n)."""
        if n < 1:
            raise InvalidParameterError(f"degree must be >= 1, got {n}")
        return np.asarray(filter_eval(self, np.arange(n + 1) / n), dtype=float)


def filter_eval(f, x):
    m = f.order
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("filter is defined on [0, inf) only")
    y = 2.0 * m * x
    total = np.zeros_like(y)
    for k in range(-m, m + 1):
        total += bspline_eval(m, y - k)
    # partition of unity is exact on [0, 1/2]; rounding in the sum is not
    total = np.where(x <= 0.5, 1.0, np.clip(total, 0.0, 1.0))
    return float(total) if total.ndim == 0 else total


def dim_harmonic(q, ell):
    """Dimension d_l^q of the space of degree-``ell`` harmonics on S^q."""
    if q < 1 or ell < 0:
        raise InvalidParameterError("need q >= 1 and ell >= 0")
    if ell == 0:
        return 1
    return (2 * ell + q - 1) * math.comb(ell + q - 1, ell) // (ell + q - 1)


def dim_polyspace(q, n):
    """Dimension of the spherical polynomials of degree <= n on S^q."""
    if q < 1 or n < 0:
        raise InvalidParameterError("need q >= 1 and n >= 0")
    return dim_harmonic(q + 1, n)


def sphere_constant(q):
    """c_q = 2^{q-1} Gamma(q/2)^2 / Gamma(q) from the addition formula."""
    return math.exp((q - 1) * math.log(2.0) + 2 * gammaln(q / 2.0) - gammaln(q))


def _check_interval(t):
    t = np.asarray(t, dtype=float)
    if np.any(np.abs(t) > 1.0):
        raise DomainError("argument must lie in [-1, 1]")
    return t


def gegenbauer_normalized_seq(q, lmax, t):
    """Gegenbauer polynomials for S^q normalized to 1 at t = 1.

    Returns an array of shape ``(lmax + 1,) + t.shape`` with rows
    P_l(t) / P_l(1), l = 0..lmax.  With this normalization the addition
    formula reads  sum_k Y_{l,k}(x) Y_{l,k}(z) = d_l^q P_l(x . z).
    For q = 2 these are the Legendre polynomials.
    """
    t = _check_interval(t)
    lam = (q - 1) / 2.0
    out = np.empty((lmax + 1,) + t.shape)
    out[0] = 1.0
    if lmax >= 1:
        out[1] = t
    for ell in range(1, lmax):
        out[ell + 1] = (2.0 * (ell + lam) * t * out[ell] - ell * out[ell - 1]) / (ell + 2.0 * lam)
    return out


def jacobi_orthonormal_seq(q, lmax, t):
    """Orthonormal Jacobi polynomials p_l^{(a,a)}, a = q/2 - 1.

    Unit norm against the weight (1 - t^2)^a on [-1, 1], positive leading
    coefficient.  Uses the symmetric orthonormal three-term recurrence
    t p_l = b_{l+1} p_{l+1} + b_l p_{l-1}; it is independent of
    :func:`gegenbauer_normalized_seq`, which makes the identity
    c_q p_l(1)^2 = d_l^q a genuine check.  Returns shape ``(lmax+1,) + t.shape``.
    """
    t = _check_interval(t)
    a = q / 2.0 - 1.0
    out = np.empty((lmax + 1,) + t.shape)
    # p_0 = 1 / sqrt(int (1-t^2)^a dt) = 1 / sqrt(B(1/2, a + 1))
    log_mass = gammaln(0.5) + gammaln(a + 1.0) - gammaln(a + 1.5)
    out[0] = math.exp(-0.5 * log_mass)

    def b(ell):
        if ell == 1 and q == 1:
            return math.sqrt(0.5)
        s = 2.0 * ell + 2.0 * a
        return math.sqrt(ell * (ell + 2.0 * a) / ((s + 1.0) * (s - 1.0)))

    if lmax >= 1:
        out[1] = t * out[0] / b(1)
    for ell in range(1, lmax):
        out[ell + 1] = (t * out[ell] - b(ell) * out[ell - 1]) / b(ell + 1)
    return out


def harmonic_degrees(n):
    """Degree l of each basis function in the ordering of :func:`sph_harm_basis`."""
    return np.repeat(np.arange(n + 1), 2 * np.arange(n + 1) + 1)


def harmonic_labels(n):
    """List of (l, m, kind) labels; kind is 'c' (cos m phi) or 's' (sin m phi).

    Within degree l the order is m = 0, then (cos, sin) pairs for m = 1..l.
    """
    labels = []
    for ell in range(n + 1):
        labels.append((ell, 0, "c"))
        for m in range(1, ell + 1):
            labels.append((ell, m, "c"))
            labels.append((ell, m, "s"))
    return labels


def _as_unit_points(x, tol=1e-12):
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != 3:
        raise DomainError("harmonic basis is implemented on S^2 (3-vectors) only")
    r = np.linalg.norm(x, axis=-1)
    if np.any(np.abs(r - 1.0) > tol):
        raise DomainError("points must have unit Euclidean norm")
    return x


def harmonic_matrix(n, points, check=True):
    """Real orthonormal harmonics of degree <= n as an (N, M) matrix.

    Row k is the k-th basis function evaluated at the M points (the matrix
    Y of the least-squares construction).  Associated Legendre functions
    use the fully normalized forward recurrence in degree, vectorized over
    the order m, which stays accurate far beyond degree 200.
    """
    pts = _as_unit_points(points) if check else np.asarray(points, dtype=float)
    pts = pts.reshape(-1, 3)
    npts = pts.shape[0]
    z = np.clip(pts[:, 2], -1.0, 1.0)
    s = np.hypot(pts[:, 0], pts[:, 1])
    phi = np.arctan2(pts[:, 1], pts[:, 0])
    mphi = np.outer(np.arange(1, n + 1), phi)
    cosm = np.cos(mphi)
    sinm = np.sin(mphi)

    Y = np.empty(((n + 1) ** 2, npts))
    # pm2, pm1: normalized P_{l-2,m}, P_{l-1,m} for m = 0..l-2, l-1
    pm2 = None
    pm1 = np.ones((1, npts))
    Y[0] = 1.0
    for ell in range(1, n + 1):
        cur = np.empty((ell + 1, npts))
        if ell >= 2:
            m = np.arange(ell - 1)[:, None]
            a = np.sqrt((2.0 * ell - 1) * (2.0 * ell + 1) / ((ell - m) * (ell + m)))
            b = np.sqrt((2.0 * ell + 1) * (ell + m - 1) * (ell - m - 1)
                        / ((ell - m) * (ell + m) * (2.0 * ell - 3)))
            cur[: ell - 1] = a * z * pm1[: ell - 1] - b * pm2[: ell - 1]
        cur[ell - 1] = math.sqrt(2.0 * ell + 1) * z * pm1[ell - 1]
        if ell == 1:
            cur[1] = math.sqrt(3.0) * s
        else:
            cur[ell] = math.sqrt((2.0 * ell + 1) / (2.0 * ell)) * s * pm1[ell - 1]
        base = ell * ell
        Y[base] = cur[0]
        Y[base + 1: base + 2 * ell + 1: 2] = cur[1:] * cosm[:ell]
        Y[base + 2: base + 2 * ell + 1: 2] = cur[1:] * sinm[:ell]
        pm2, pm1 = pm1, cur
    return Y


def sph_harm_basis(n, x):
    """All real harmonics Y_{l,k}(x), l <= n, at unit point(s) ``x`` on S^2.

    For a single 3-vector returns ``(n+1)**2`` values; for an (M, 3) array
    returns an (M, (n+1)**2) array.  Lower degrees come first.

    >>> sph_harm_basis(0, [0.0, 0.0, 1.0])
    array([1.])
    """
    x = _as_unit_points(x)
    Y = harmonic_matrix(n, x.reshape(-1, 3), check=False)
    if x.ndim == 1:
        return Y[:, 0].copy()
    return Y.T.reshape(x.shape[:-1] + (Y.shape[0],))
