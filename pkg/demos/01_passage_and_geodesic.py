"""Passage times and the right-most geodesic on a small field.

Prints the weight table, the two passage times between opposite corners and
the level-by-level entry columns of the right-most optimal path.
"""

import numpy as np

from thinscale import DistributionSpec, horizontal_lpp, lattice_lpp, sample_weights
from thinscale.passage import path_weight, profile_path

w = sample_weights(DistributionSpec("rademacher"), 8, 4, seed=2024)
print("weights, rows from the top level down:")
print(np.flipud(w.to_array().T).astype(int))

a, b = (0, 0), (7, 3)
full = lattice_lpp(w, a, b, want_geodesic=True)
horiz = horizontal_lpp(w, a, b, want_geodesic=True)
print(f"\nlattice passage time        {full.value:+.0f}")
print(f"horizontal-step passage time {horiz.value:+.0f}")

print("\nright-most geodesic, entry column per level:")
for level, entry in full.geodesic.csv_rows():
    print(f"  level {level}: enters at u = {entry:.0f}")

cells = profile_path(full.geodesic)
print(f"\nre-summing weights along the path gives {path_weight(w, cells):+.0f}")
