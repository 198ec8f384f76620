"""Large-deviation cost of atypical bulk densities.

The rate function I(u) is the Legendre transform of log z; for Geometric(1/2)
it has a closed form, and the Chernoff bound on the bulk table follows.

    python demos/06_rate_function.py
"""

import math

import numpy as np
from scipy.special import logsumexp

from condlab import BulkWeights, ModelSpec, PerturbationParams, rate_function
from condlab.partition import build_bulk_table

model = ModelSpec(BulkWeights.geometric(0.5), PerturbationParams(0.1, 1.0, 0.0), 512, 1024)
print("   u      phi(u)    I(u)       closed form")
for u in (0.0, 0.25, 0.5, 1.0, 1.5, 2.0, 3.0):
    r = rate_function(model, u)
    closed = (u + 1) * math.log(2) + (u * math.log(u) if u else 0.0) - (u + 1) * math.log1p(u)
    print(f"{u:5.2f}  {r.phi:9.6f}  {r.I:9.6f}  {closed:9.6f}")

t = build_bulk_table(model.bulk, 40, 40)
print("\nP(sum of M bulk sites <= 0.05 M) against exp(-M I(0.05)):")
for M in (10, 20, 40):
    k = int(0.05 * M)
    p = math.exp(logsumexp(t.log_z[M, : k + 1]))
    print(f"  M={M:2d}: {p:.3e}  vs  {math.exp(-M * rate_function(model, 0.05).I):.3e}")
