"""Quadrature rules for scattered nodes on the sphere and localized
filtered polynomial approximation built on them.

Submodules: :mod:`specfun` (harmonics, Gegenbauer/Jacobi sequences,
B-spline filters), :mod:`geometry` (point sets, dyadic triangulation),
:mod:`kernel` (the filtered kernel Phi_n), :mod:`quadrature` (LSQ and REC
weights, verification), :mod:`operators` (sigma_n and sigma*_n),
:mod:`experiments` and :mod:`cli`.
"""
from .errors import (ConstructionError, ConvergenceError, DataFormatError,
                     DomainError, InvalidParameterError, ResourceLimitError,
                     SphquadError)
from .geometry import (PointSet, SphericalCap, dyadic_triangulation, geodesic_dist,
                       locate, mesh_norm, random_points, triangulated_measure)
from .kernel import KernelSpec, kernel_diagnostics, kernel_eval, kernel_profile
from .operators import (HarmonicCoeffs, OperatorSpec, approx_error, fourier_coeffs,
                        least_squares_coeffs, sigma_eval, sigma_star, synthesize)
from .quadrature import (QuadratureRule, SolverOptions, VerificationReport,
                         gram_matvec, gram_spectrum, lsq_weights, monomial_ladder,
                         mz_check, rec_weights, reference_rule, verify_exactness)
from .specfun import (Filter, bspline_eval, dim_harmonic, dim_polyspace,
                      gegenbauer_normalized_seq, jacobi_orthonormal_seq,
                      sph_harm_basis)

__version__ = "0.1.0"

__all__ = [
    "ConstructionError", "ConvergenceError", "DataFormatError", "DomainError",
    "InvalidParameterError", "ResourceLimitError", "SphquadError",
    "PointSet", "SphericalCap", "dyadic_triangulation", "geodesic_dist", "locate",
    "mesh_norm", "random_points", "triangulated_measure",
    "KernelSpec", "kernel_diagnostics", "kernel_eval", "kernel_profile",
    "HarmonicCoeffs", "OperatorSpec", "approx_error", "fourier_coeffs",
    "least_squares_coeffs", "sigma_eval", "sigma_star", "synthesize",
    "QuadratureRule", "SolverOptions", "VerificationReport", "gram_matvec",
    "gram_spectrum", "lsq_weights", "monomial_ladder", "mz_check", "rec_weights",
    "reference_rule", "verify_exactness",
    "Filter", "bspline_eval", "dim_harmonic", "dim_polyspace",
    "gegenbauer_normalized_seq", "jacobi_orthonormal_seq", "sph_harm_basis",
]
