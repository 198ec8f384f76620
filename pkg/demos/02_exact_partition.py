"""Exact partition functions and the size-biased cluster law.

Builds the log-space table Z_{l,m}, checks it against enumeration on a small
system, and compares the exact ratio Z_{L-1,N-n}/Z_{L,N} with exp(-n/C_L).

    python demos/02_exact_partition.py
"""

import math

import numpy as np

from condlab import BulkWeights, ModelSpec, PerturbationParams, build_table, cluster_scale
from condlab.oracle import brute_measure
from condlab.partition import log_z_asymptotic, size_biased_marginal, z_ratio_exact

bulk = BulkWeights.geometric(0.5)


def model(L, N, kappa=0.0):
    return ModelSpec(bulk, PerturbationParams(0.1, 1.0, kappa), L, N)


small = model(4, 6, kappa=0.5)
print(f"Z_4,6 recursion   {math.exp(build_table(small).log_z[4, 6]):.15f}")
print(f"Z_4,6 enumeration {brute_measure(small).Z:.15f}")

print("\n   L   C_L      Z ratio at n=C_L   exp(-1)   log Z exact   saddle term   gap / L^alpha")
for L in (128, 256, 512, 1024):
    m = model(L, 2 * L)
    t = build_table(m)
    c = cluster_scale(m)
    r = z_ratio_exact(t, L, 2 * L, int(c))
    asym = log_z_asymptotic(m)
    print(f"{L:5d} {c:8.3f}   {r:.5f}            {math.exp(-1):.5f}   {t.log_z[L, 2 * L]:10.4f}    {asym.log_z:10.4f}   {abs(t.log_z[L, 2 * L] - asym.log_z) / L**asym.saddle.alpha:.4f}")

m = model(512, 1024)
law = size_biased_marginal(build_table(m), 512, 1024)
print(f"\nsize-biased law sums to {law.sum():.15f}")
print(f"mass of the law above C_L: {law[int(cluster_scale(m)) + 1:].sum():.4f}")
print(f"mean of the law: {np.dot(np.arange(1025), law):.2f} particles")
