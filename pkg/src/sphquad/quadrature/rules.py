"""Quadrature rule container and the reference product rule on S^2."""
from dataclasses import dataclass, field

import numpy as np
from scipy.special import roots_legendre

from ..errors import InvalidParameterError, ResourceLimitError
from ..geometry import PointSet

MAX_REFERENCE_DEGREE = 2000


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Nodes with signed weights and the degree the rule claims to integrate.

    Weights integrate against the normalized surface measure, so an exact
    rule has ``weights.sum() == 1``.  ``info`` carries construction metadata
    (solver statistics, seeds, ...).
    """

    nodes: np.ndarray
    weights: np.ndarray
    exactness_degree: int
    info: dict = field(default_factory=dict)

    def __post_init__(self):
        nodes = np.ascontiguousarray(self.nodes, dtype=float)
        w = np.ascontiguousarray(self.weights, dtype=float)
        if nodes.ndim != 2 or w.shape != (nodes.shape[0],):
            raise InvalidParameterError("need (M, q+1) nodes and M weights")
        nodes.setflags(write=False)
        w.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", w)

    def __len__(self):
        return self.nodes.shape[0]

    def validate(self, tol=1e-10):
        total = self.weights.sum()
        if abs(total - 1.0) > tol:
            raise InvalidParameterError(f"weights sum to {total!r}, expected 1")
        return self

    def integrate(self, f):
        """Apply the rule to a callable of an (M, 3) array or to sample values."""
        vals = f(self.nodes) if callable(f) else np.asarray(f, dtype=float)
        return np.tensordot(self.weights, vals, axes=(0, 0))

    def as_point_set(self):
        """The nodes with the weights as measure (weights must be positive)."""
        return PointSet(self.nodes, self.weights, "external")


def reference_rule(degree):
    """Product rule exact for all polynomials of degree <= ``degree`` on S^2.

    Gauss-Legendre in z = cos(theta) with ceil((degree+1)/2) nodes times
    degree+1 equispaced azimuths.  All weights are positive.
    """
    degree = int(degree)
    if degree < 0:
        raise InvalidParameterError("degree must be >= 0")
    if degree > MAX_REFERENCE_DEGREE:
        raise ResourceLimitError(f"reference rule degree capped at {MAX_REFERENCE_DEGREE}")
    nz = (degree + 2) // 2
    nphi = degree + 1
    z, wz = roots_legendre(nz)
    phi = 2.0 * np.pi * np.arange(nphi) / nphi
    s = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    nodes = np.stack([
        np.outer(s, np.cos(phi)).ravel(),
        np.outer(s, np.sin(phi)).ravel(),
        np.repeat(z, nphi),
    ], axis=1)
    nodes /= np.linalg.norm(nodes, axis=1, keepdims=True)
    w = np.repeat(wz / 2.0, nphi) / nphi
    return QuadratureRule(nodes, w, degree, {"construction": "reference"})
