"""
Checking the step-size rule on a small crop
===========================================

For grids of at most 400 pixels the operator and the one-step iteration
matrix can be assembled and diagonalized densely. This script compares
the matrix-free operator with its assembled form. It then shows that the
safeguarded step keeps every eigenvalue of the iteration matrix inside
the unit disc, and scans larger multiples of that step to see how much
room the bound leaves.
"""

import numpy as np

from dampedflow import (
    FlowConfig,
    FlowState,
    SafeguardedStep,
    add_gaussian_noise,
    apply_F,
    assemble_A,
    assemble_F,
    choose_dt,
    smooth_phantom,
    vec,
    verify_spectrum,
)

# crop 16 x 16 pixels out of a noisy phantom, keeping the original grid step
full = add_gaussian_noise(smooth_phantom(128), 20.0, seed=1)
crop = full.with_values(full.values[40:56, 60:76])

for kind in ("tvf", "mcf"):
    cfg = FlowConfig(kind=kind, eta=5.0, eps=1e-2, dt_policy=SafeguardedStep(1.0))

    F = assemble_F(crop, cfg.eps, cfg.exponent)
    ref = vec(apply_F(crop, cfg.eps, cfg.exponent))
    gap = np.linalg.norm(F.matvec(vec(crop)) - ref) / np.linalg.norm(ref)
    print(f"{kind}: assembled vs matrix-free relative error {gap:.1e}")

    dt = choose_dt(FlowState.initial(crop), cfg)
    report = verify_spectrum(crop, cfg, dt)
    print(f"  safeguarded dt = {dt:.3e}")
    print(f"  max |mu| = {report.max_mu_abs:.15f}, regimes {report.regime_counts}")

    for factor in (2, 4, 8, 16, 32):
        mu = np.linalg.eigvals(assemble_A(crop, cfg, factor * dt).to_dense())
        if np.abs(mu).max() > 1 + 1e-10:
            print(f"  contraction lost at {factor} dt (max |mu| = {np.abs(mu).max():.4f})")
            break
    else:
        print("  still contracting at 32 dt")
