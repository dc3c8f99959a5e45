#!/usr/bin/env python3
"""Coupled ensembles under the flow: the combined distance barely moves.

A perturbed copy of a Gibbs ensemble is evolved alongside the original; the
time-zero optimal coupling, pushed through the flow, upper-bounds the
re-optimised distance at every time.  The measured ratio stays within a
fraction of a percent of one: the flow acts almost isometrically on these
ensembles, far inside the exponential envelope the continuity estimate
guarantees.
"""

from kdvlab.experiments import parse_config_text, run_continuity

cfg = parse_config_text(
    """
experiment = continuity
measure = gibbs
modes = 16
ensemble_size = 128
solver_modes = 48
time_grid = 0.25, 0.5, 1.0
perturbation = mode_shift
perturbation_mode = 3
perturbation_delta = 1e-3
seed = 0
"""
)
report = run_continuity(cfg)

print(f"base distance |mu - nu| = {report.summary['base_distance']:.6f}")
print(f"{'t':>5} {'combined':>10} {'plan bound':>11} {'ratio':>9}")
for row in report.series:
    print(f"{row['t']:5.2f} {row['combined']:10.6f} {row['bound_combined']:11.6f} "
          f"{row['ratio']:9.5f}")
print(f"\nlog-ratio slope {report.summary['log_ratio_slope']:+.2e} "
      f"(fit R^2 {report.summary['log_ratio_r_squared']:.3f})")
print(f"envelope ingredients: R1 = {report.summary['r1_l2_sup_pow12']:.1f}, "
      f"R2 = {report.summary['r2_hs_moment_sum']:.3f}")
print(f"coupled-plan bound dominates everywhere: {report.summary['bound_dominates']}")
