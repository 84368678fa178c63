"""Oracle-equivalence and exact-identity checks at enumeration scale.

Each check returns the number of mismatches it found.  Functions under test are
looked up on their modules at call time, so a patched implementation is what
gets checked.
"""

from __future__ import annotations

import hashlib

import numpy as np

from . import melon as melon_mod
from . import oracles
from . import passage
from . import stats
from .environment import DistributionSpec, WeightField, build_walk_ensemble, sample_weights

TOL = 1e-9
_FAMILIES = ("gaussian", "rademacher", "centered-exponential")


def _small_field(seed, max_side=5):
    rng = np.random.default_rng(seed)
    width, height = (int(x) for x in rng.integers(1, max_side + 1, size=2))
    dist = DistributionSpec(_FAMILIES[seed % len(_FAMILIES)])
    return sample_weights(dist, width, height, seed)


def _pairs(width, height):
    for au in range(width):
        for av in range(height):
            for bu in range(au, width):
                for bv in range(av, height):
                    yield (au, av), (bu, bv)


def check_lattice(seeds=range(100)):
    bad = 0
    for seed in seeds:
        w = _small_field(seed)
        arr = w.to_array()
        for a, b in _pairs(w.width, w.height):
            if a != b:
                res = passage.lattice_lpp(w, a, b, want_geodesic=True)
                val, entry = oracles.brute_lpp(arr, a, b)
                bad += res.value != val or entry is None or not np.array_equal(entry, res.geodesic.entry)
            res = passage.horizontal_lpp(w, a, b, want_geodesic=True)
            val, entry = oracles.brute_lpp(arr, a, b, horizontal=True)
            bad += res.value != val or entry is None or not np.array_equal(entry, res.geodesic.entry)
    return int(bad)


def check_semidiscrete(seeds=range(100)):
    bad = 0
    for seed in seeds:
        w = _small_field(seed)
        F = build_walk_ensemble(w)
        for kx in range(F.n_points):
            for ky in range(kx, F.n_points):
                for m in range(1, F.line_count + 1):
                    for n in range(m, F.line_count + 1):
                        res = passage.semidiscrete_lpp(F, kx, m, ky, n, want_geodesic=True)
                        val, entry = oracles.brute_semidiscrete(F, kx, m, ky, n)
                        bad += abs(res.value - val) > TOL * max(1.0, abs(val))
                        bad += entry is None or not np.array_equal(entry, res.geodesic.entry)
    return int(bad)


def check_walk_identity(seeds=range(100), side=10):
    """Semi-discrete passage on the walk ensemble equals horizontal-step LPP."""
    bad = 0
    for seed in seeds:
        w = sample_weights(DistributionSpec(_FAMILIES[seed % 3]), side, side, 10_000 + seed)
        F = build_walk_ensemble(w)
        rng = np.random.default_rng(seed)
        corners = [((0, 0), (side, side - 1))]
        for _ in range(10):
            au, bu = sorted(int(x) for x in rng.integers(0, side + 1, 2))
            av, bv = sorted(int(x) for x in rng.integers(0, side, 2))
            corners.append(((au, av), (bu, bv)))
        for (au, av), (bu, bv) in corners:
            h = passage.horizontal_lpp(w, (au, av), (bu, bv)).value
            s = passage.semidiscrete_lpp(F, au, av + 1, bu, bv + 1).value
            bad += abs(h - s) > TOL * max(1.0, abs(h))
    return int(bad)


def check_discrepancy(seeds=range(100), max_width=1024, max_height=16):
    bad = 0
    for seed in seeds:
        rng = np.random.default_rng(20_000 + seed)
        width = int(rng.integers(1, max_width + 1))
        height = int(rng.integers(1, max_height + 1))
        dist = DistributionSpec(_FAMILIES[seed % 3])
        w = sample_weights(dist, width, height, 20_000 + seed)
        pts = [((0, 0), (width - 1, height - 1))]
        for _ in range(4):
            au, bu = sorted(int(x) for x in rng.integers(0, width, 2))
            av, bv = sorted(int(x) for x in rng.integers(0, height, 2))
            pts.append(((au, av), (bu, bv)))
        bad += stats.discrepancy_check(w, None, pts).violations
    return int(bad)


def check_melon(seeds=range(100), max_lines=3, max_k=2, max_points=6):
    """Oracle agreement and ordering, top-line and sum identities."""
    bad = 0
    for seed in seeds:
        rng = np.random.default_rng(30_000 + seed)
        n = int(rng.integers(1, max_lines + 1))
        pts = int(rng.integers(2, max_points + 1))
        w = sample_weights(DistributionSpec(_FAMILIES[seed % 3]), pts - 1, n, 30_000 + seed)
        F = build_walk_ensemble(w)
        k = min(n, max_k)
        m = melon_mod.melon_topk(F, k, F.grid)
        for j, y in enumerate(F.grid):
            for kk in range(1, k + 1):
                ref = oracles.melon_oracle(F, kk, y)
                bad += abs(ref - m.cumulative[kk - 1, j]) > TOL * max(1.0, abs(ref))
        bad += melon_invariant_failures(F, seed)
    return int(bad)


def melon_invariant_failures(F, seed=0):
    """Ordering, top line = passage time, and the k = n sum, on one ensemble."""
    bad = 0
    n = F.line_count
    full = melon_mod.melon_topk(F, n, F.grid)
    bad += int(np.any(np.diff(full.lines, axis=0) > TOL))
    for j, y in enumerate(F.grid):
        top = passage.semidiscrete_lpp(F, 0.0, 1, y, n).value
        bad += abs(full.lines[0, j] - top) > TOL * max(1.0, abs(top))
    total = (F.values[:, :] - F.values[:, :1]).sum(axis=0)
    bad += int(np.any(np.abs(full.cumulative[-1] - total) > TOL * np.maximum(1.0, np.abs(total))))
    return int(bad)


CHECKS = {
    "lattice_and_horizontal_vs_enumeration": check_lattice,
    "semidiscrete_vs_enumeration": check_semidiscrete,
    "walk_ensemble_identity": check_walk_identity,
    "discrepancy_bound": check_discrepancy,
    "melon_vs_oracle": check_melon,
}


def run_all(n_seeds=25, log=print):
    """Run every check over ``n_seeds`` seeds; returns (failures, log digest)."""
    lines = []
    failures = 0
    for name, fn in CHECKS.items():
        bad = fn(range(n_seeds))
        failures += bad
        line = f"{name}: {'ok' if bad == 0 else f'{bad} mismatches'}"
        lines.append(line)
        log(line)
    digest = hashlib.sha256("\n".join(lines).encode()).hexdigest()
    log(f"log digest {digest}")
    return failures, digest


def from_table(weights) -> WeightField:
    return WeightField.from_array(weights)
