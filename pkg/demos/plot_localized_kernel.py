"""
Localized kernels and the choice of filter
==========================================

A sharp cutoff in the harmonic expansion produces a kernel with long,
slowly decaying tails.  Smooth B-spline filters trade a little of the
peak for far better decay away from the center.
"""

import numpy as np

from sphquad.kernel import KernelSpec, kernel_diagnostics, kernel_profile
from sphquad.specfun import Filter

n = 64
for m in (1, 3, 5):
    d = kernel_diagnostics(KernelSpec(2, n, Filter(m)))
    print(f"h{m}: peak {d.peak:9.1f}  L1 norm {d.l1_norm:6.3f}  fitted decay {d.decay_slope:6.2f}")

###############################################################################
# Sampling the profile shows the tails directly.

theta, phi1 = kernel_profile(KernelSpec(2, n, Filter(1)), count=7, theta_max=1.5)
_, phi5 = kernel_profile(KernelSpec(2, n, Filter(5)), count=7, theta_max=1.5)
for t, a, b in zip(theta, phi1, phi5):
    print(f"theta={t:5.2f}  |Phi h1|={abs(a):10.3e}  |Phi h5|={abs(b):10.3e}")

###############################################################################
# Approximating a function that is only smooth away from a few points shows
# the same effect: the filtered operator is far more accurate where the
# function is smooth.

from sphquad.experiments import LOCALIZATION_CAP, benchmark
from sphquad.operators import fourier_coeffs, synthesize
from sphquad.quadrature import reference_rule

f = benchmark("g1")
rule = reference_rule(2 * 31)
coeffs = fourier_coeffs(rule, f(rule.nodes), 31)
K = LOCALIZATION_CAP.sample(500, np.random.default_rng(0))
for m in (1, 5):
    err = np.abs(synthesize(coeffs, K, Filter(m), 31) - f(K)).max()
    print(f"largest error on the cap with h{m}: {err:.2e}")
