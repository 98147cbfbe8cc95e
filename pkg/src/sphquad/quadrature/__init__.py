"""Quadrature rules on S^2: the reference product rule, least-squares and
recurrence-based weights for scattered nodes, and verification tools."""
from .design import HarmonicDesign, gram_matvec
from .lsq import SolverOptions, lsq_weights, solve_gram
from .rules import QuadratureRule, reference_rule
from .verify import (MZStats, VerificationReport, certified_degree, gram_spectrum,
                     moment_errors, mz_check, verify_exactness)

__all__ = [
    "HarmonicDesign", "gram_matvec", "SolverOptions", "lsq_weights", "solve_gram",
    "QuadratureRule", "reference_rule", "MZStats", "VerificationReport",
    "certified_degree", "gram_spectrum", "moment_errors", "mz_check",
    "verify_exactness",
]
from .rec import LadderStep, monomial_ladder, rec_weights, reduced_monomials  # noqa: E402

__all__ += ["LadderStep", "monomial_ladder", "rec_weights", "reduced_monomials"]
