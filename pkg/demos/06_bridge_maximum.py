"""Maximum of a Brownian bridge against the larger of two |normals|.

Prints the two empirical CDFs on a grid of levels.  The bridge maximum is
stochastically smaller in the upper tail but not near the origin.
"""

import numpy as np

from thinscale import DistributionSpec, sample_weights
from thinscale.stats import bridge_maxima

s = bridge_maxima(10_000, seed=1)
z = np.abs(sample_weights(DistributionSpec("gaussian"), 10_000, 2, seed=2).to_array()).max(axis=1)
print("   x   P(bridge max <= x)   P(max |Z| <= x)")
for x in (0.3, 0.5, 0.7, 1.0, 1.5, 2.0):
    print(f"{x:5.1f}   {np.mean(s <= x):17.4f}   {np.mean(z <= x):15.4f}")
