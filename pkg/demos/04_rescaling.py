"""From lattice quantities to rescaled ones in a thin frame.

Shows the lattice rectangle behind a frame, one rescaled passage time and the
rescaled geodesic position at a few fractions of the height.
"""

from thinscale import (DistributionSpec, ScalingFrame, coord_map, lattice_lpp, rescale_geodesic,
                       rescale_passage, sample_weights)

frame = ScalingFrame(16, "5/2")
b = coord_map(0, 1, frame)
print(f"n = {frame.n}, beta = {frame.beta}: corner {tuple(b)}, "
      f"passage scale n^{frame.passage_exponent}, transversal scale n^{frame.transversal_exponent}")

w = sample_weights(DistributionSpec("gaussian"), b.u + 1, b.v + 1, seed=5)
res = lattice_lpp(w, (0, 0), b, want_geodesic=True)
d = rescale_passage(res.value, (0, 0, 0, 1), frame, seed=5)
print(f"L = {res.value:.3f}  ->  rescaled {d.value:+.4f}")

for v in (0.25, 0.5, 0.75):
    print(f"geodesic at v = {v}: rescaled position {rescale_geodesic(res.geodesic, frame, v):+.4f}")
