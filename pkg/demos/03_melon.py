"""Melon lines of a four-walk ensemble.

The top line is the passage time through all walks.  The lines never cross,
and with k equal to the number of walks they add up to the walks themselves.
"""

import numpy as np

from thinscale import DistributionSpec, build_walk_ensemble, melon_topk, sample_weights

F = build_walk_ensemble(sample_weights(DistributionSpec("gaussian"), 60, 4, seed=11))
m = melon_topk(F, 4, F.grid[::10])

print("   y   " + "  ".join(f"line{i}" for i in range(1, 5)))
for j, y in enumerate(m.eval_grid):
    print(f"{y:4.0f}  " + "  ".join(f"{v:+6.2f}" for v in m.lines[:, j]))

print("\nordered everywhere:", bool(np.all(np.diff(m.lines, axis=0) <= 1e-12)))
print("sum of lines equals sum of walks:",
      bool(np.allclose(m.lines.sum(axis=0), F.values[:, ::10].sum(axis=0))))
