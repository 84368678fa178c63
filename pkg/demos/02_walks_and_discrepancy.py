"""Rows of a weight field as random walks.

The horizontal-step passage time on the field equals the semi-discrete
passage time through its walk ensemble.  The full lattice passage time
differs from it by at most the sum of per-row maximal weights.
"""

from thinscale import (DistributionSpec, ScalingFrame, build_walk_ensemble, discrepancy_check,
                       horizontal_lpp, sample_weights, semidiscrete_lpp)

w = sample_weights(DistributionSpec("centered-exponential"), 200, 6, seed=7)
F = build_walk_ensemble(w)
h = horizontal_lpp(w, (0, 0), (200, 5)).value
s = semidiscrete_lpp(F, 0, 1, 200, 6).value
print(f"horizontal-step LPP {h:.6f}   walk-ensemble LPP {s:.6f}")

frame = ScalingFrame(8, "5/2")
w = sample_weights(DistributionSpec("symmetrized-pareto"), frame.width + 1, frame.n + 1, seed=3)
rep = discrepancy_check(w, frame)
print(f"\nframe n=8, beta=5/2: rectangle {frame.width} x {frame.n}")
print(f"|L_F - L_w| = {rep.max_discrepancy:.3f}, row-maximum bound {rep.bound:.3f}, "
      f"violations {rep.violations}")
