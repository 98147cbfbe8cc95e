"""
Approximation from noisy samples
================================

The summability operator is linear, so applying it to pure noise shows how
much of the noise survives in the approximation.  We compare the sharp
cutoff, the smooth filter and an unfiltered least-squares fit.
"""

import numpy as np

from sphquad.experiments import run_experiment

res = run_experiment("noise", overrides={"points": {"count": 4096}, "quad_degree": 30,
                                         "n": 15, "test_count": 2000, "repetitions": 20,
                                         "noise_kinds": ["uniform"]})
print(",".join(res.columns))
for row in res.rows:
    print(",".join(str(row[c]) for c in res.columns))

###############################################################################
# Dividing the mean error by the noise level gives the same number for
# every level, which is linearity seen through the data.

for row in res.tables["scaling"][1]:
    print(row["method"], row["epsilon"], round(row["mean_err_over_eps"], 4))
