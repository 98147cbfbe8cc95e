"""
Quadrature weights for scattered points
=======================================

Random points on the sphere carry no natural weights.  Here we compute
weights that integrate every spherical polynomial of a given degree
exactly, check them, and look at the spectrum of the Gram matrix that
certifies the construction.
"""

import numpy as np

from sphquad.geometry import random_points, dyadic_triangulation
from sphquad.quadrature import gram_spectrum, lsq_weights, rec_weights, verify_exactness

# 8192 uniformly distributed points, each starting with mass 1/8192
C = random_points(seed=1, M=8192)

# weights exact for polynomials of degree 14
rule = lsq_weights(C, 14)
report = verify_exactness(rule, 14)
print("largest Gram error     :", report.gcom_max_err)
print("weights in             :", rule.weights.min(), rule.weights.max())

# the Gram matrix of the harmonics on these points is well conditioned
lmin, lmax, _ = gram_spectrum(C, 14)
print("eigenvalues of G       :", lmin, lmax, "condition", lmax / lmin)

###############################################################################
# Points from a triangulation come with area weights, which lets the same
# algorithm reach a much higher degree on the same number of points.

T = dyadic_triangulation(5).point_set()
rule44 = lsq_weights(T, 44)
print("degree 44 on 8192 centers:", verify_exactness(rule44, 44).gcom_max_err)

###############################################################################
# The recurrence method builds weights without a linear solve.  It is
# accurate at moderate degree and loses orthogonality as the degree grows.

for degree in (8, 16):
    r, _ = rec_weights(T, degree)
    print("recurrence degree", degree, ":", verify_exactness(r, degree).gcom_max_err,
          "all positive" if (r.weights > 0).all() else "some negative")
