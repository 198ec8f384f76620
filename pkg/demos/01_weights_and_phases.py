"""Weights, fugacities and the phase diagram.

Walks through the Geometric(1/2) bulk with a size-dependent perturbation,
inverts the density to a fugacity and classifies a few parameter points.

    python demos/01_weights_and_phases.py
"""

import numpy as np

from condlab import BulkWeights, ModelSpec, PerturbationParams, classify_phase, grand_canonical, invert_density

bulk = BulkWeights.geometric(0.5)
print(f"bulk: rho_c = {bulk.rho_c:.6f}, phi_bar = {bulk.phi_bar}")

# The perturbation adds theta L^-gamma (n+1)^kappa: tiny per site, but it
# decides where the excess mass above rho_c goes.
model = ModelSpec(bulk, PerturbationParams(theta=0.1, gamma=1.0, kappa=0.0), L=512, N=1024)
n = np.arange(6)
print("w(n)   ", np.round(bulk.pmf(n), 6))
print("w_L(n) ", np.round(model.weights(5), 6))

# Below rho_c the canonical marginal looks like a tilted product law.
for rho in (0.25, 0.5, 0.9, 2.0):
    phi = invert_density(model, rho)
    print(f"rho = {rho:<4}  Phi = {phi:.6f}")

gc = grand_canonical(model, 0.9)
print(f"at phi=0.9: z = {gc.z:.6f}, z_L = {gc.z_L:.6f}, R = {gc.R:.6f}, R_L = {gc.R_L:.6f}")

print("\nphase diagram samples (rho = 2):")
for kappa, gamma in [(0.0, 1.0), (1.0, 1.0), (0.0, 2.0), (-0.5, 2.0), (-1.0, 2.0)]:
    pert = PerturbationParams(0.1, gamma, kappa, allow_boundary_kappa=kappa == -1.0)
    rep = classify_phase(ModelSpec(bulk, pert, 512, 1024))
    scale = "-" if rep.c_l is None else f"{rep.c_l:.2f}"
    print(f"  kappa={kappa:5.1f} gamma={gamma:3.1f}: {rep.regime.value:<26} C_L={scale:<8} {rep.note}")
