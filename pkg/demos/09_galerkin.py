#!/usr/bin/env python3
"""Band-projected flow against the full flow.

With modes above the band evolving freely, the projected flow converges to
the full one as the band widens.  At desk amplitudes the error is dominated
by nonlinear phase drift of the untreated high modes, which grows with the
wavenumber, so the error stays nearly flat until the band reaches the data
truncation; the per-band split below makes that structure visible.
"""

import numpy as np

from kdvlab import (
    GaussianSpec,
    SolverConfig,
    evolve,
    evolve_projected,
    project,
    sample_gaussian,
    sobolev_norm,
)

u0 = sample_gaussian(GaussianSpec(n_modes=64, seed=2), 1).field(0)
cfg = SolverConfig(n_modes=96)
t = 0.5
reference = evolve(u0, t, cfg)

print(f"|u0|_L2 = {sobolev_norm(u0, 0.0):.3f}, |u0|_H^0.45 = {sobolev_norm(u0, 0.45):.3f}")
print(f"\n{'band':>5} {'error':>10} {'low-band part':>14} {'high-band part':>15}")
for band in (4, 8, 16, 32, 64):
    approx = evolve_projected(u0, t, band, cfg)
    diff = approx - reference
    err = sobolev_norm(diff, 0.2)
    low = sobolev_norm(project(diff, band), 0.2)
    high = np.sqrt(max(err**2 - low**2, 0.0))
    print(f"{band:5d} {err:10.4f} {low:14.4f} {high:15.4f}")

print("\nat the data truncation (band 64) only genuinely generated high modes remain;")
print("projected and full flow coincide once the band covers the solver truncation:")
full_band = evolve_projected(u0, t, 96, cfg)
print(f"band 96 error = {sobolev_norm(full_band - reference, 0.2):.2e}")
